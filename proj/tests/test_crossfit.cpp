#include <doctest.h>

#include <cmath>
#include <set>

#include "ddml/crossfit.hpp"
#include "ddml/synthgen.hpp"

using namespace ddml;
using crossfit::EstimateOptions;
using crossfit::make_folds;
using crossfit::residual_regression;

namespace {

// Small architectures/configs keep the unit suite fast; the full-size paper
// settings run in the acceptance suite.
EstimateOptions small_options() {
  EstimateOptions opts;
  opts.arch.latent_dim = 4;
  opts.arch.encoder_hidden = {16};
  opts.arch.head_hidden = {16};
  opts.workers = 2;
  return opts;
}

nuisance::NuisanceSpec small_mlp() {
  nuisance::NuisanceSpec spec;
  spec.kind = nuisance::NuisanceKind::kMlp;
  spec.mlp_hidden = {16};
  spec.mlp_train.epochs = 60;
  return spec;
}

num::TrainConfig small_train() {
  num::TrainConfig cfg;
  cfg.epochs = 40;
  return cfg;
}

}  // namespace

TEST_CASE("make_folds: sizes, disjointness, determinism, errors") {
  SeededRng rng(1);
  const auto plan = make_folds(10, 5, rng);
  auto folds = plan.fold_indices();
  CHECK(folds.size() == 5);
  for (const auto& f : folds) CHECK(f.size() == 2);

  SeededRng rng2(2);
  const auto plan2 = make_folds(7, 3, rng2);
  std::multiset<std::size_t> sizes;
  for (const auto& f : plan2.fold_indices()) sizes.insert(f.size());
  CHECK(sizes == std::multiset<std::size_t>{2, 2, 3});

  SeededRng a(3), b(3);
  CHECK(make_folds(100, 5, a).assignment == make_folds(100, 5, b).assignment);

  std::set<int> seen;
  for (int idx : plan.assignment) {
    CHECK(idx >= 0);
    CHECK(idx < 5);
  }
  for (const auto& f : folds) {
    for (int i : f) CHECK(seen.insert(i).second);  // disjoint
  }
  CHECK(seen.size() == 10);  // cover

  SeededRng r(4);
  CHECK_THROWS_AS(make_folds(5, 6, r), InputError);
  CHECK_THROWS_AS(make_folds(5, 1, r), InputError);
}

TEST_CASE("residual_regression closed forms and oracle") {
  SUBCASE("y_res = 5 t_res") {
    Vector t(4);
    t << 1, 2, 1, 2;  // |t|^2 = 10
    const Vector y = 5.0 * t;
    const double theta = residual_regression(t, y, 1e-8);
    CHECK(theta == doctest::Approx(5.0 * 10.0 / (10.0 + 1e-8)).epsilon(1e-15));
  }

  SUBCASE("zero treatment residual is guarded to zero") {
    const Vector t = Vector::Zero(5);
    Vector y(5);
    y << 1, 2, 3, 4, 5;
    CHECK(residual_regression(t, y, 1e-8) == 0.0);
  }

  SUBCASE("random vectors match the two-line oracle") {
    SeededRng rng(7);
    Vector t(100), y(100);
    for (int i = 0; i < 100; ++i) {
      t[i] = rng.normal();
      y[i] = rng.normal();
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 100; ++i) {
      num += t[i] * y[i];
      den += t[i] * t[i];
    }
    CHECK(residual_regression(t, y, 1e-8) ==
          doctest::Approx(num / (den + 1e-8)).epsilon(1e-14));
  }

  SUBCASE("length checks") {
    Vector t(3), y(4);
    t.setZero();
    y.setZero();
    CHECK_THROWS_AS(residual_regression(t, y, 1e-8), ShapeError);
    Vector one(1);
    one.setZero();
    CHECK_THROWS_AS(residual_regression(one, one, 1e-8), InputError);
  }
}

TEST_CASE("injected zero predictions reduce the estimator to T'Y/(T'T+delta)") {
  synth::DgpConfig cfg;
  cfg.n = 200;
  cfg.d = 10;
  cfg.seed = 5;
  const Dataset data = synth::generate(cfg);
  // with t_hat = y_hat = 0 the residuals are the raw vectors
  const double direct = data.t.dot(data.y) / (data.t.dot(data.t) + 1e-8);
  CHECK(residual_regression(data.t - Vector::Zero(200), data.y - Vector::Zero(200), 1e-8) ==
        doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("classic DML recovers the effect on a noiseless linear PLM") {
  // y = 2 t + x.v exactly; t = x.w + noise
  SeededRng rng(11);
  const int n = 2000, d = 5;
  Matrix x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
  Vector w(d), v(d);
  w << 0.5, -0.3, 0.2, 0.0, 0.1;
  v << 1.0, 0.5, -0.7, 0.3, -0.2;
  Vector t(n), y(n);
  for (int i = 0; i < n; ++i) {
    t[i] = x.row(i).dot(w) + rng.normal();
    y[i] = 2.0 * t[i] + x.row(i).dot(v);
  }
  Dataset data;
  data.x = x;
  data.t = t;
  data.y = y;
  data.kind = TreatmentKind::kContinuous;

  nuisance::NuisanceSpec spec;
  spec.kind = nuisance::NuisanceKind::kMlp;
  SeededRng est_rng(13);
  EstimateOptions opts;
  opts.workers = 2;
  const auto report = crossfit::estimate_dml(data, 5, spec, est_rng, opts);
  CHECK(std::abs(report.theta_hat - 2.0) < 0.1);
  CHECK(report.wall_seconds > 0.0);
}

TEST_CASE("estimate smoke: K=2 and K=5 both return finite estimates") {
  synth::DgpConfig cfg;
  cfg.n = 300;
  cfg.d = 10;
  cfg.seed = 17;
  const Dataset data = synth::generate(cfg);
  for (int k : {2, 5}) {
    SeededRng rng(19);
    const auto report = crossfit::estimate_dml(data, k, small_mlp(), rng, small_options());
    CHECK(std::isfinite(report.theta_hat));
  }
}

TEST_CASE("cross-fit hygiene: every prediction comes from the sample's own fold") {
  synth::DgpConfig cfg;
  cfg.n = 120;
  cfg.d = 10;
  cfg.seed = 23;
  const Dataset data = synth::generate(cfg);
  SeededRng rng(29);
  const auto report = crossfit::estimate_dml(data, 4, small_mlp(), rng, small_options());
  // recover the fold plan exactly as the estimator derived it
  SeededRng probe(29);
  const SeededRng master = probe.derive(probe.next_u64());
  SeededRng fold_rng = master.derive("folds");
  const auto plan = make_folds(120, 4, fold_rng);
  for (int i = 0; i < 120; ++i) {
    CHECK(report.predictions.producing_fold[static_cast<std::size_t>(i)] ==
          plan.assignment[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("ddml with all flags false equals classic DML bit for bit") {
  synth::DgpConfig cfg;
  cfg.n = 240;
  cfg.d = 10;
  cfg.seed = 31;
  const Dataset data = synth::generate(cfg);

  SeededRng r1(37), r2(37);
  const auto dml = crossfit::estimate_dml(data, 4, small_mlp(), r1, small_options());
  train::AblationFlags off{false, false, false};
  const auto ddml = crossfit::estimate_ddml(data, 4, small_mlp(), {}, small_train(), off, r2,
                                            small_options());
  CHECK(std::abs(dml.theta_hat - ddml.theta_hat) < 1e-9);
  CHECK(dml.theta_hat == ddml.theta_hat);  // same stream derivations, same arithmetic
  CHECK((dml.predictions.t_hat - ddml.predictions.t_hat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ddml estimate: determinism and worker-count independence") {
  synth::DgpConfig cfg;
  cfg.n = 300;
  cfg.d = 10;
  cfg.seed = 41;
  const Dataset data = synth::generate(cfg);

  auto run = [&](int workers) {
    SeededRng rng(43);
    EstimateOptions opts = small_options();
    opts.workers = workers;
    return crossfit::estimate_ddml(data, 3, small_mlp(), {}, small_train(), {}, rng, opts);
  };
  const auto a = run(1);
  const auto b = run(2);
  const auto c = run(2);
  CHECK(a.theta_hat == b.theta_hat);
  CHECK(b.theta_hat == c.theta_hat);
  CHECK((a.t_res - b.t_res).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.probes.has_value());
  CHECK(a.probes->z_t.vs_t == b.probes->z_t.vs_t);
}

TEST_CASE("estimate rejects undersized samples") {
  synth::DgpConfig cfg;
  cfg.n = 8;
  cfg.d = 10;
  cfg.seed = 1;
  const Dataset data = synth::generate(cfg);
  SeededRng rng(1);
  CHECK_THROWS_AS(crossfit::estimate_dml(data, 5, small_mlp(), rng, small_options()),
                  InputError);
}

TEST_CASE("linear probes: separable, independent, and constant targets") {
  SeededRng rng(47);

  SUBCASE("perfectly separable 1-d latent gives AUC 1") {
    const int n = 40;
    train::RepresentationTriple z;
    z.z_c = Matrix::Zero(n, 1);
    z.z_t = Matrix::Zero(n, 1);
    z.z_y = Matrix::Zero(n, 1);
    Vector t(n);
    for (int i = 0; i < n; ++i) {
      t[i] = (i < 20) ? 0.0 : 1.0;
      z.z_t(i, 0) = t[i] * 2.0 - 1.0 + 0.1 * rng.uniform();
      z.z_c(i, 0) = rng.normal();
      z.z_y(i, 0) = rng.normal();
    }
    Vector y_star(n);
    for (int i = 0; i < n; ++i) y_star[i] = rng.normal();
    const auto grid = crossfit::linear_probe(z, t, y_star, TreatmentKind::kBinary);
    CHECK(grid.z_t.vs_t == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("independent latent explains almost nothing") {
    const int n = 1000;
    train::RepresentationTriple z;
    z.z_c = Matrix(n, 2);
    z.z_t = Matrix(n, 2);
    z.z_y = Matrix(n, 2);
    Vector t(n), y_star(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) {
        z.z_c(i, j) = rng.normal();
        z.z_t(i, j) = rng.normal();
        z.z_y(i, j) = rng.normal();
      }
      t[i] = (rng.uniform() < 0.5) ? 1.0 : 0.0;
      y_star[i] = rng.normal();
    }
    const auto grid = crossfit::linear_probe(z, t, y_star, TreatmentKind::kBinary);
    CHECK(grid.z_y.vs_y_star < 0.05);
    CHECK(grid.z_c.vs_y_star < 0.05);
  }

  SUBCASE("constant targets produce the defined defaults") {
    const int n = 25;
    train::RepresentationTriple z;
    z.z_c = Matrix::Random(n, 2);
    z.z_t = Matrix::Random(n, 2);
    z.z_y = Matrix::Random(n, 2);
    const Vector t = Vector::Ones(n);
    const Vector y_star = Vector::Constant(n, 3.0);
    const auto bin = crossfit::linear_probe(z, t, y_star, TreatmentKind::kBinary);
    CHECK(bin.z_t.vs_t == 0.5);
    CHECK(bin.z_t.vs_y_star == 0.0);
    const auto cont = crossfit::linear_probe(z, t, y_star, TreatmentKind::kContinuous);
    CHECK(cont.z_t.vs_t == 0.0);
  }
}

TEST_CASE("orthogonality probe: h=0 gives exactly zero and slopes are finite") {
  synth::DgpConfig cfg;
  cfg.n = 400;
  cfg.d = 10;
  cfg.seed = 53;
  const Dataset data = synth::generate(cfg);
  SeededRng rng(59);
  const auto report = crossfit::estimate_dml(data, 4, small_mlp(), rng, small_options());

  SeededRng dir_rng(61);
  const auto zero = crossfit::orthogonality_probe(data, report, 0.0, dir_rng);
  CHECK(zero.score_slope == 0.0);
  CHECK(zero.naive_slope == 0.0);

  const auto probe = crossfit::orthogonality_probe(data, report, 0.05, dir_rng);
  CHECK(std::isfinite(probe.score_slope));
  CHECK(std::isfinite(probe.naive_slope));
}

TEST_CASE("orthogonality probe slope is stable across the h sweep") {
  // The empirical moment is quadratic in h, so the central-difference slope
  // carries no h term; the magnitudes must be non-increasing toward h -> 0.
  synth::DgpConfig cfg;
  cfg.n = 500;
  cfg.d = 10;
  cfg.seed = 67;
  const Dataset data = synth::generate(cfg);
  SeededRng rng(71);
  const auto report = crossfit::estimate_dml(data, 5, small_mlp(), rng, small_options());

  double prev = std::numeric_limits<double>::infinity();
  for (double h : {0.2, 0.1, 0.05}) {
    SeededRng dir_rng(73);  // identical direction draw per h
    const auto probe = crossfit::orthogonality_probe(data, report, h, dir_rng);
    CHECK(std::abs(probe.score_slope) <= prev + 1e-12);
    prev = std::abs(probe.score_slope);
  }
}

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ddml/csv.hpp"
#include "ddml/synthgen.hpp"

using namespace ddml;
using synth::CsvSchema;
using synth::DgpConfig;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("covariates are bounded by the tanh + scaled sine construction") {
  DgpConfig cfg;
  cfg.n = 500;
  cfg.d = 20;
  cfg.seed = 3;
  SeededRng rng(cfg.seed);
  const auto cov = synth::generate_covariates(cfg, rng);
  CHECK(cov.x.maxCoeff() <= 1.2);
  CHECK(cov.x.minCoeff() >= -1.2);
}

TEST_CASE("zero entanglement degenerates to tanh of the latent draw") {
  DgpConfig cfg;
  cfg.n = 50;
  cfg.d = 10;
  cfg.lambda_mix = 0.0;
  cfg.seed = 7;
  SeededRng rng(cfg.seed);
  const auto cov = synth::generate_covariates(cfg, rng);

  // replay the documented draw order: Z row-major first
  SeededRng replay(cfg.seed);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double z = replay.normal();
      CHECK(cov.x(i, j) == doctest::Approx(std::tanh(z)).epsilon(1e-15));
    }
  }
}

TEST_CASE("covariates and factors match an independent scalar-loop recomputation") {
  DgpConfig cfg;
  cfg.n = 3;
  cfg.d = 10;
  cfg.seed = 11;
  SeededRng rng(cfg.seed);
  const auto cov = synth::generate_covariates(cfg, rng);

  // independent scalar implementation, same draw order
  SeededRng replay(cfg.seed);
  double z[3][10], m[10][10];
  for (auto& row : z)
    for (double& v : row) v = replay.normal();
  for (auto& row : m)
    for (double& v : row) v = cfg.lambda_mix * replay.normal();

  double xlin[3][10], x[3][10];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 10; ++j) {
      double mix = 0.0;
      for (int k = 0; k < 10; ++k) mix += z[i][k] * m[k][j];
      xlin[i][j] = z[i][j] + mix / 10.0;
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 10; ++j) {
      double mixt = 0.0;
      for (int k = 0; k < 10; ++k) mixt += xlin[i][k] * m[j][k];  // X_lin M^T
      x[i][j] = std::tanh(xlin[i][j]) + 0.2 * std::sin(mixt / 10.0);
      CHECK(std::abs(cov.x(i, j) - x[i][j]) < 1e-12);
    }
  }
  for (int i = 0; i < 3; ++i) {
    const double zc = 0.6 * x[i][0] * x[i][1] + 0.4 * x[i][2] * x[i][2] +
                      0.3 * std::sin(x[i][3] + x[i][4]);
    const double zt = 0.5 * x[i][5] * x[i][6] + 0.3 * std::tanh(x[i][7]) +
                      0.2 * std::cos(x[i][8] + x[i][9]);
    const double zy = 0.5 * x[i][1] * x[i][2] + 0.3 * std::cos(x[i][0] + x[i][3]);
    CHECK(std::abs(cov.z_c[i] - zc) < 1e-12);
    CHECK(std::abs(cov.z_t[i] - zt) < 1e-12);
    CHECK(std::abs(cov.z_y[i] - zy) < 1e-12);
  }
}

TEST_CASE("covariate generation rejects d < 10") {
  DgpConfig cfg;
  cfg.d = 9;
  SeededRng rng(1);
  CHECK_THROWS_AS(synth::generate_covariates(cfg, rng), InputError);
}

TEST_CASE("binary DGP: balanced assignment when both signals vanish") {
  DgpConfig cfg;
  cfg.n = 6000;
  cfg.d = 10;
  cfg.alpha_c = 0.0;
  cfg.alpha_t = 0.0;
  cfg.seed = 13;
  const Dataset data = synth::generate(cfg);
  const double rate = data.t.mean();
  // 3 sigma of a fair coin at n=6000
  CHECK(std::abs(rate - 0.5) < 3.0 * 0.5 / std::sqrt(6000.0));
}

TEST_CASE("binary DGP: noiseless outcome is exactly theta * T") {
  DgpConfig cfg;
  cfg.n = 300;
  cfg.d = 10;
  cfg.sigma_y = 0.0;
  cfg.alpha_out = 0.0;
  cfg.seed = 17;
  const Dataset data = synth::generate(cfg);
  for (int i = 0; i < 300; ++i) CHECK(data.y[i] == 5.0 * data.t[i]);

  const Vector t_c = data.t.array() - data.t.mean();
  const Vector y_c = data.y.array() - data.y.mean();
  const double theta = t_c.dot(y_c) / (t_c.dot(t_c) + 1e-8);
  CHECK(std::abs(theta - 5.0) < 1e-6);
}

TEST_CASE("binary DGP: three-sample trace recomputed by hand") {
  DgpConfig cfg;
  cfg.n = 3;
  cfg.d = 10;
  cfg.seed = 19;
  const Dataset data = synth::generate(cfg);
  REQUIRE(data.truth.has_value());
  const auto& truth = *data.truth;

  // replay the full stream: covariates, then one uniform per treatment draw,
  // then one normal per outcome noise draw
  SeededRng replay(cfg.seed);
  DgpConfig cov_cfg = cfg;
  const auto cov = synth::generate_covariates(cov_cfg, replay);
  for (int i = 0; i < 3; ++i) {
    const double p =
        1.0 / (1.0 + std::exp(-(cfg.alpha_c * cov.z_c[i] + cfg.alpha_t * cov.z_t[i])));
    const double t = (replay.uniform() < p) ? 1.0 : 0.0;
    CHECK(data.t[i] == t);
  }
  for (int i = 0; i < 3; ++i) {
    const double eps = cfg.sigma_y * replay.normal();
    CHECK(data.y[i] ==
          doctest::Approx(cfg.alpha_out * (truth.z_c[i] + truth.z_y[i]) + 5.0 * data.t[i] + eps)
              .epsilon(1e-15));
  }
}

TEST_CASE("continuous DGP: degenerate pieces vanish as in the construction") {
  // with alpha_t = 0 and z_c = 0 the pre-noise signal is exactly zero;
  // verified at the formula level on a zero vector
  const double zc = 0.0;
  const double signal = 4.0 * (zc + 0.5 * std::tanh(zc));
  CHECK(signal == 0.0);
}

TEST_CASE("continuous DGP: standardization and the effective effect") {
  DgpConfig cfg;
  cfg.treatment = TreatmentKind::kContinuous;
  cfg.n = 2000;
  cfg.d = 10;
  cfg.seed = 23;
  const Dataset data = synth::generate(cfg);
  REQUIRE(data.truth.has_value());
  const auto& truth = *data.truth;

  CHECK(std::abs(data.t.mean()) < 1e-12);
  const double var = (data.t.array() - data.t.mean()).square().mean();
  CHECK(std::abs(var - 1.0) < 1e-10);

  const double sd = std::sqrt((truth.t_raw.array() - truth.t_raw.mean()).square().mean());
  CHECK(truth.theta_eff == doctest::Approx(5.0 * sd).epsilon(1e-12));

  // outcome was generated against the raw treatment
  for (int i = 0; i < 20; ++i) {
    const double want = cfg.alpha_out * (truth.z_c[i] + truth.z_y[i]) +
                        cfg.theta_true * truth.t_raw[i] + truth.noise_y[i];
    CHECK(data.y[i] == doctest::Approx(want).epsilon(1e-15));
  }
}

TEST_CASE("continuous DGP without standardization keeps the raw treatment") {
  DgpConfig cfg;
  cfg.treatment = TreatmentKind::kContinuous;
  cfg.n = 200;
  cfg.d = 10;
  cfg.standardize_t = false;
  cfg.seed = 29;
  const Dataset data = synth::generate(cfg);
  CHECK(data.truth->theta_eff == 5.0);
  CHECK((data.t - data.truth->t_raw).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ground-truth fidelity: removing everything but theta T leaves theta T") {
  for (auto kind : {TreatmentKind::kBinary, TreatmentKind::kContinuous}) {
    DgpConfig cfg;
    cfg.treatment = kind;
    cfg.n = 400;
    cfg.d = 10;
    cfg.seed = 31;
    const Dataset data = synth::generate(cfg);
    const auto& truth = *data.truth;
    const Vector residual =
        data.y - cfg.alpha_out * (truth.z_c + truth.z_y) - truth.noise_y;
    CHECK((residual - cfg.theta_true * truth.t_raw).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("generation is deterministic per seed") {
  DgpConfig cfg;
  cfg.n = 100;
  cfg.d = 12;
  cfg.seed = 37;
  const Dataset a = synth::generate(cfg);
  const Dataset b = synth::generate(cfg);
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.t - b.t).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);

  cfg.seed = 38;
  const Dataset c = synth::generate(cfg);
  CHECK((a.x - c.x).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("csv round trip is exact at 17 significant digits") {
  DgpConfig cfg;
  cfg.n = 60;
  cfg.d = 10;
  cfg.seed = 41;
  const Dataset data = synth::generate(cfg);
  const auto path = temp_file("ddml_roundtrip.csv");
  synth::save_csv(data, path.string());

  CsvSchema schema;
  schema.kind = TreatmentKind::kBinary;
  const Dataset loaded = synth::load_csv(path.string(), schema);
  CHECK(loaded.n() == data.n());
  CHECK(loaded.d() == data.d());
  CHECK((loaded.x - data.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.t - data.t).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.y - data.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(loaded.truth.has_value());
  std::filesystem::remove(path);
}

TEST_CASE("csv loader: three-row well-formed file") {
  const auto path = temp_file("ddml_small.csv");
  {
    std::ofstream out(path);
    out << "t,y,x0,x1\n";
    out << "1,2.5,0.1,-0.2\n";
    out << "0,1.25,0.3,0.4\n";
    out << "1,-3,0.5,0.6\n";
  }
  CsvSchema schema;
  schema.kind = TreatmentKind::kBinary;
  const Dataset data = synth::load_csv(path.string(), schema);
  CHECK(data.n() == 3);
  CHECK(data.d() == 2);
  CHECK(data.t[0] == 1.0);
  CHECK(data.y[1] == 1.25);
  CHECK(data.x(2, 1) == 0.6);
  std::filesystem::remove(path);
}

TEST_CASE("csv loader error paths") {
  const auto path = temp_file("ddml_bad.csv");
  CsvSchema schema;

  SUBCASE("header only") {
    std::ofstream(path) << "t,y,x0\n";
    CHECK_THROWS_WITH_AS(synth::load_csv(path.string(), schema),
                         doctest::Contains("no data rows"), InputError);
  }

  SUBCASE("missing column") {
    std::ofstream(path) << "a,b\n1,2\n";
    CHECK_THROWS_WITH_AS(synth::load_csv(path.string(), schema), doctest::Contains("'t'"),
                         InputError);
  }

  SUBCASE("non-numeric cell names row and column") {
    std::ofstream(path) << "t,y,x0\n1,abc,0.5\n";
    try {
      synth::load_csv(path.string(), schema);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("row 1") != std::string::npos);
      CHECK(msg.find("'y'") != std::string::npos);
    }
  }

  SUBCASE("binary treatment outside {0,1}") {
    std::ofstream(path) << "t,y,x0\n0.5,1.0,0.2\n";
    schema.kind = TreatmentKind::kBinary;
    CHECK_THROWS_AS(synth::load_csv(path.string(), schema), InputError);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(synth::load_csv("/nonexistent/nope.csv", schema), InputError);
  }
  std::filesystem::remove(path);
}

TEST_CASE("explicit covariate schema selects and orders columns") {
  const auto path = temp_file("ddml_sel.csv");
  {
    std::ofstream out(path);
    out << "w,treat,out,v\n";
    out << "9,1,2,5\n";
    out << "8,0,3,6\n";
  }
  CsvSchema schema;
  schema.treatment_column = "treat";
  schema.outcome_column = "out";
  schema.covariate_columns = {"v", "w"};
  schema.kind = TreatmentKind::kBinary;
  const Dataset data = synth::load_csv(path.string(), schema);
  CHECK(data.x(0, 0) == 5.0);
  CHECK(data.x(0, 1) == 9.0);
  std::filesystem::remove(path);
}

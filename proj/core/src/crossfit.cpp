#include "ddml/crossfit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ddml/parallel.hpp"
#include "ddml/stats.hpp"

namespace ddml::crossfit {

std::vector<std::vector<int>> FoldPlan::fold_indices() const {
  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    folds[static_cast<std::size_t>(assignment[i])].push_back(static_cast<int>(i));
  }
  return folds;
}

FoldPlan make_folds(int n, int k, SeededRng& rng) {
  if (k < 2) throw InputError("make_folds: need at least 2 folds");
  if (k > n) throw InputError("make_folds: more folds than samples");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);

  FoldPlan plan;
  plan.k = k;
  plan.assignment.resize(static_cast<std::size_t>(n));
  // First n%k folds get one extra sample.
  const int base = n / k;
  const int extra = n % k;
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    for (int i = 0; i < size; ++i) {
      plan.assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos++)])] = f;
    }
  }
  return plan;
}

double residual_regression(const Vector& t_res, const Vector& y_res, double delta) {
  require_len(y_res, t_res.size(), "residual_regression");
  if (t_res.size() < 2) throw InputError("residual_regression: need at least 2 samples");
  return t_res.dot(y_res) / (t_res.dot(t_res) + delta);
}

namespace {

/// Fold-local standardization statistics, computed on the training split and
/// applied everywhere.
struct Scaler {
  Vector x_mean, x_sd;
  double y_mean = 0.0, y_sd = 1.0;
  double t_mean = 0.0, t_sd = 1.0;  // identity for binary treatments

  static Scaler fit(const Dataset& data, const std::vector<int>& tra) {
    Scaler s;
    const Eigen::Index d = data.d();
    const double n = static_cast<double>(tra.size());
    s.x_mean = Vector::Zero(d);
    s.x_sd = Vector::Zero(d);
    for (int i : tra) s.x_mean += data.x.row(i).transpose();
    s.x_mean /= n;
    for (int i : tra) {
      s.x_sd += (data.x.row(i).transpose() - s.x_mean).array().square().matrix();
    }
    s.x_sd = (s.x_sd / n).array().sqrt();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (s.x_sd[j] < 1e-12) s.x_sd[j] = 1.0;  // constant column
    }

    double ym = 0.0;
    for (int i : tra) ym += data.y[i];
    ym /= n;
    double yv = 0.0;
    for (int i : tra) yv += (data.y[i] - ym) * (data.y[i] - ym);
    s.y_mean = ym;
    s.y_sd = std::sqrt(yv / n);
    if (s.y_sd < 1e-12) s.y_sd = 1.0;

    if (data.kind == TreatmentKind::kContinuous) {
      double tm = 0.0;
      for (int i : tra) tm += data.t[i];
      tm /= n;
      double tv = 0.0;
      for (int i : tra) tv += (data.t[i] - tm) * (data.t[i] - tm);
      s.t_mean = tm;
      s.t_sd = std::sqrt(tv / n);
      if (s.t_sd < 1e-12) s.t_sd = 1.0;
    }
    return s;
  }

  Matrix scale_x(const Matrix& x, const std::vector<int>& rows) const {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.row(static_cast<Eigen::Index>(i)) =
          ((x.row(rows[i]).transpose() - x_mean).array() / x_sd.array()).transpose();
    }
    return out;
  }

  Vector pick(const Vector& v, const std::vector<int>& rows, double mean, double sd) const {
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out[static_cast<Eigen::Index>(i)] = (v[rows[i]] - mean) / sd;
    }
    return out;
  }
};

struct FoldOutput {
  std::vector<int> hold;
  Vector t_hat;  // original scale (probability for binary)
  Vector y_hat;  // original scale
  std::vector<train::EpochTrace> trainer_trace;
  // retained for post-hoc probing
  bool has_encoder = false;
  train::RepresentationTriple z_hold;
};

struct PipelineSpec {
  bool use_trainer = false;  // encoder path
  train::LossWeights weights;
  num::TrainConfig train_cfg;
  train::AblationFlags flags;
};

FoldOutput run_fold(const Dataset& data, const std::vector<std::vector<int>>& folds, int fold,
                    const nuisance::NuisanceSpec& spec, const PipelineSpec& pipe,
                    const SeededRng& master, const EstimateOptions& opts) {
  FoldOutput out;
  out.hold = folds[static_cast<std::size_t>(fold)];
  std::vector<int> tra;
  tra.reserve(data.x.rows() - static_cast<Eigen::Index>(out.hold.size()));
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (static_cast<int>(f) == fold) continue;
    tra.insert(tra.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(tra.begin(), tra.end());

  const Scaler scaler = Scaler::fit(data, tra);
  const bool binary = (data.kind == TreatmentKind::kBinary);

  const Matrix x_tra = scaler.scale_x(data.x, tra);
  const Matrix x_hold = scaler.scale_x(data.x, out.hold);
  const Vector t_tra = binary ? scaler.pick(data.t, tra, 0.0, 1.0)
                              : scaler.pick(data.t, tra, scaler.t_mean, scaler.t_sd);
  const Vector y_tra = scaler.pick(data.y, tra, scaler.y_mean, scaler.y_sd);

  Matrix fm_tra, fg_tra, fm_hold, fg_hold;
  if (pipe.use_trainer) {
    SeededRng trainer_rng = master.derive("trainer", static_cast<std::uint64_t>(fold));
    train::TrainSet trainset{x_tra, t_tra, y_tra, data.kind};
    train::FitResult fitted = train::fit(trainset, pipe.train_cfg, pipe.weights, pipe.flags,
                                         trainer_rng, opts.arch, opts.kernel);
    out.trainer_trace = std::move(fitted.trace);

    const auto z_tra = train::encode(fitted.encoder, x_tra);
    out.z_hold = train::encode(fitted.encoder, x_hold);
    out.has_encoder = true;
    fm_tra = hcat(z_tra.z_c, z_tra.z_t);
    fg_tra = hcat(z_tra.z_c, z_tra.z_y);
    fm_hold = hcat(out.z_hold.z_c, out.z_hold.z_t);
    fg_hold = hcat(out.z_hold.z_c, out.z_hold.z_y);
  } else {
    fm_tra = x_tra;
    fg_tra = x_tra;
    fm_hold = x_hold;
    fg_hold = x_hold;
  }

  nuisance::NuisanceSpec m_spec = spec;
  m_spec.task = binary ? nuisance::NuisanceTask::kBinaryProbability
                       : nuisance::NuisanceTask::kRegression;
  nuisance::NuisanceSpec g_spec = spec;
  g_spec.task = nuisance::NuisanceTask::kRegression;

  SeededRng m_rng = master.derive("nuisance-m", static_cast<std::uint64_t>(fold));
  SeededRng g_rng = master.derive("nuisance-g", static_cast<std::uint64_t>(fold));
  const auto m_model = nuisance::fit_nuisance(fm_tra, t_tra, m_spec, m_rng);
  const auto g_model = nuisance::fit_nuisance(fg_tra, y_tra, g_spec, g_rng);

  // De-standardize so accumulation and the final regression live on the
  // original scale.
  out.t_hat = m_model.predict(fm_hold);
  if (!binary) out.t_hat = (out.t_hat.array() * scaler.t_sd + scaler.t_mean).matrix();
  out.y_hat = (g_model.predict(fg_hold).array() * scaler.y_sd + scaler.y_mean).matrix();
  return out;
}

EstimationReport run_pipeline(const Dataset& data, int k, const nuisance::NuisanceSpec& spec,
                              const PipelineSpec& pipe, SeededRng& rng,
                              const EstimateOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  data.validate();
  spec.validate();
  const int n = static_cast<int>(data.n());
  if (n < 2 * k) throw InputError("estimate: need at least 2K samples");

  // One stream draw keys this run, so repeated calls on the same rng differ
  // while everything below is independent of evaluation order.
  const SeededRng master = rng.derive(rng.next_u64());
  SeededRng fold_rng = master.derive("folds");
  const FoldPlan plan = make_folds(n, k, fold_rng);
  const auto folds = plan.fold_indices();

  std::vector<FoldOutput> outputs(static_cast<std::size_t>(k));
  parallel_for(k, opts.workers, [&](int fold) {
    outputs[static_cast<std::size_t>(fold)] =
        run_fold(data, folds, fold, spec, pipe, master, opts);
  });

  EstimationReport report;
  report.predictions.t_hat = Vector::Zero(n);
  report.predictions.y_hat = Vector::Zero(n);
  report.predictions.producing_fold.assign(static_cast<std::size_t>(n), -1);
  for (int fold = 0; fold < k; ++fold) {
    const auto& out = outputs[static_cast<std::size_t>(fold)];
    for (std::size_t i = 0; i < out.hold.size(); ++i) {
      const int idx = out.hold[i];
      report.predictions.t_hat[idx] = out.t_hat[static_cast<Eigen::Index>(i)];
      report.predictions.y_hat[idx] = out.y_hat[static_cast<Eigen::Index>(i)];
      report.predictions.producing_fold[static_cast<std::size_t>(idx)] = fold;
    }
    report.fold_traces.push_back({fold, outputs[static_cast<std::size_t>(fold)].trainer_trace});
  }

  // Cross-fit hygiene: every sample's prediction must come from the model of
  // its own hold-out fold (trained without it).
  for (int i = 0; i < n; ++i) {
    if (report.predictions.producing_fold[static_cast<std::size_t>(i)] !=
        plan.assignment[static_cast<std::size_t>(i)]) {
      throw StateError("estimate: sample " + std::to_string(i) +
                       " predicted by a model trained on its own fold");
    }
  }

  report.t_res = data.t - report.predictions.t_hat;
  report.y_res = data.y - report.predictions.y_hat;
  report.theta_hat = residual_regression(report.t_res, report.y_res, pipe.weights.delta);
  if (!std::isfinite(report.theta_hat)) {
    throw NumericError("estimate: non-finite effect estimate");
  }
  report.residual_corr = std::abs(stats::pearson(
      report.t_res, report.y_res - report.theta_hat * report.t_res, pipe.weights.eps_corr));

  if (pipe.use_trainer && opts.compute_probes) {
    ProbeGrid grid;
    int grids = 0;
    for (int fold = 0; fold < k; ++fold) {
      const auto& out = outputs[static_cast<std::size_t>(fold)];
      if (!out.has_encoder) continue;
      const Eigen::Index m = static_cast<Eigen::Index>(out.hold.size());
      Vector t_hold(m), y_star(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        const int idx = out.hold[static_cast<std::size_t>(i)];
        t_hold[i] = data.t[idx];
        y_star[i] = data.y[idx] -
                    report.theta_hat * (data.t[idx] - report.predictions.t_hat[idx]);
      }
      const ProbeGrid g = linear_probe(out.z_hold, t_hold, y_star, data.kind);
      grid.z_c.vs_t += g.z_c.vs_t;
      grid.z_c.vs_y_star += g.z_c.vs_y_star;
      grid.z_t.vs_t += g.z_t.vs_t;
      grid.z_t.vs_y_star += g.z_t.vs_y_star;
      grid.z_y.vs_t += g.z_y.vs_t;
      grid.z_y.vs_y_star += g.z_y.vs_y_star;
      ++grids;
    }
    if (grids > 0) {
      const double inv = 1.0 / grids;
      grid.z_c.vs_t *= inv;
      grid.z_c.vs_y_star *= inv;
      grid.z_t.vs_t *= inv;
      grid.z_t.vs_y_star *= inv;
      grid.z_y.vs_t *= inv;
      grid.z_y.vs_y_star *= inv;
      report.probes = grid;
    }
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

EstimationReport estimate_dml(const Dataset& data, int k, const nuisance::NuisanceSpec& spec,
                              SeededRng& rng, const EstimateOptions& opts) {
  PipelineSpec pipe;
  pipe.use_trainer = false;
  pipe.flags = {false, false, false};
  return run_pipeline(data, k, spec, pipe, rng, opts);
}

EstimationReport estimate_ddml(const Dataset& data, int k, const nuisance::NuisanceSpec& spec,
                               const train::LossWeights& w, const num::TrainConfig& cfg,
                               const train::AblationFlags& flags, SeededRng& rng,
                               const EstimateOptions& opts) {
  w.validate();
  cfg.validate();
  PipelineSpec pipe;
  // Without the encoder the trained heads would feed nothing downstream (the
  // nuisances consume raw covariates), so the trainer only runs when the
  // encoder is enabled. This also makes flags all-false coincide with
  // estimate_dml exactly.
  pipe.use_trainer = flags.use_encoder;
  pipe.weights = w;
  pipe.train_cfg = cfg;
  pipe.flags = flags;
  return run_pipeline(data, k, spec, pipe, rng, opts);
}

ProbeGrid linear_probe(const train::RepresentationTriple& z, const Vector& t,
                       const Vector& y_star, TreatmentKind kind) {
  if (z.z_c.rows() != z.z_t.rows() || z.z_c.rows() != z.z_y.rows()) {
    throw ShapeError("linear_probe: latent blocks have different row counts");
  }
  if (t.size() != z.z_c.rows() || y_star.size() != z.z_c.rows()) {
    throw ShapeError("linear_probe: target length differs from latent rows");
  }

  auto probe_one = [&](const Matrix& sub) {
    SubspaceProbe p;
    const bool t_constant = (t.array() == t[0]).all();
    if (t_constant) {
      p.vs_t = (kind == TreatmentKind::kBinary) ? 0.5 : 0.0;
    } else {
      const Vector fitted = stats::linear_fitted(sub, t);
      p.vs_t = (kind == TreatmentKind::kBinary) ? stats::auc_score(fitted, t)
                                                : stats::spearman(fitted, t);
    }
    p.vs_y_star = stats::linear_r2(sub, y_star);
    return p;
  };

  ProbeGrid grid;
  grid.z_c = probe_one(z.z_c);
  grid.z_t = probe_one(z.z_t);
  grid.z_y = probe_one(z.z_y);
  return grid;
}

OrthogonalityProbe orthogonality_probe(const Dataset& data, const EstimationReport& report,
                                       double h, SeededRng& rng) {
  data.validate();
  const Eigen::Index n = data.n();
  require_len(report.t_res, n, "orthogonality_probe t_res");
  require_len(report.y_res, n, "orthogonality_probe y_res");
  if (h < 0.0) throw InputError("orthogonality_probe: h must be >= 0");
  if (h == 0.0) return {0.0, 0.0};

  const Vector t_hat = data.t - report.t_res;
  const Vector y_hat = data.y - report.y_res;
  const double theta = report.theta_hat;

  Vector dir_m(n), dir_g(n);
  for (Eigen::Index i = 0; i < n; ++i) dir_m[i] = 2.0 * rng.uniform() - 1.0;
  for (Eigen::Index i = 0; i < n; ++i) dir_g[i] = 2.0 * rng.uniform() - 1.0;

  auto moments = [&](double shift) {
    const Vector m = t_hat + shift * dir_m;
    const Vector g = y_hat + shift * dir_g;
    const Vector v = data.t - m;
    const Vector resid = data.y - g - theta * v;
    // orthogonal score and the plain residual moment
    return std::pair<double, double>{resid.cwiseProduct(v).mean(), resid.mean()};
  };
  const auto plus = moments(h);
  const auto minus = moments(-h);
  OrthogonalityProbe out;
  out.score_slope = (plus.first - minus.first) / (2.0 * h);
  out.naive_slope = (plus.second - minus.second) / (2.0 * h);
  return out;
}

}  // namespace ddml::crossfit

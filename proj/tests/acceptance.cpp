// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
// Desk-scale replications of the benchmark results plus the oracle and
// determinism gates. Estimates are cached across criteria, so shared runs
// (e.g. the Binary_100 seeds) execute once.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "ddml/crossfit.hpp"
#include "ddml/experiment.hpp"
#include "ddml/stats.hpp"
#include "ddml/synthgen.hpp"
#include "ddml/trainer.hpp"

using namespace ddml;

namespace {

constexpr int kSeeds = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<Outcome> g_results;

void report(int criterion, const std::string& name, const Outcome& outcome) {
  std::printf("[%s] criterion %2d: %s — %s\n", outcome.pass ? "PASS" : "FAIL", criterion,
              name.c_str(), outcome.detail.c_str());
  std::fflush(stdout);
  g_results.push_back(outcome);
}

synth::DgpConfig dgp_config(TreatmentKind kind, int d, int n, std::uint64_t seed) {
  synth::DgpConfig cfg;
  cfg.treatment = kind;
  cfg.d = d;
  cfg.n = n;
  cfg.seed = seed;
  return cfg;
}

crossfit::EstimateOptions default_options() {
  crossfit::EstimateOptions opts;
  opts.workers = 2;
  return opts;
}

struct RunResult {
  double theta_hat = 0.0;
  double theta_star = 0.0;
  double residual_corr = 0.0;
  std::optional<crossfit::ProbeGrid> probes;
};

std::map<std::string, RunResult> g_cache;

std::string run_key(TreatmentKind kind, int d, int n, const std::string& method,
                    std::uint64_t seed) {
  return std::string(kind == TreatmentKind::kBinary ? "b" : "c") + std::to_string(d) + "_n" +
         std::to_string(n) + "_" + method + "_s" + std::to_string(seed);
}

train::AblationFlags flags_for(const std::string& method) {
  train::AblationFlags flags;
  if (method == "ddml-wo_enc") flags.use_encoder = false;
  if (method == "ddml-wo_dis") flags.use_dis = false;
  if (method == "ddml-wo_ort") flags.use_ort = false;
  return flags;
}

const RunResult& get_run(TreatmentKind kind, int d, int n, const std::string& method,
                         std::uint64_t seed) {
  const std::string key = run_key(kind, d, n, method, seed);
  auto it = g_cache.find(key);
  if (it != g_cache.end()) return it->second;

  const auto start = std::chrono::steady_clock::now();
  const Dataset data = synth::generate(dgp_config(kind, d, n, seed));
  SeededRng rng(seed);
  nuisance::NuisanceSpec mlp;  // defaults: 2x64, 300 epochs, lr 1e-3
  crossfit::EstimationReport rep;
  if (method == "dml") {
    rep = crossfit::estimate_dml(data, 5, mlp, rng, default_options());
  } else {
    rep = crossfit::estimate_ddml(data, 5, mlp, train::LossWeights{}, num::TrainConfig{},
                                  flags_for(method), rng, default_options());
  }
  RunResult result;
  result.theta_hat = rep.theta_hat;
  result.theta_star = data.truth->theta_eff;
  result.residual_corr = rep.residual_corr;
  result.probes = rep.probes;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("    run %-28s theta=%9.4f (target %8.4f) corr=%.4f [%.0fs]\n", key.c_str(),
              result.theta_hat, result.theta_star, result.residual_corr, secs);
  std::fflush(stdout);
  return g_cache.emplace(key, result).first->second;
}

double mean_abs_error(TreatmentKind kind, int d, int n, const std::string& method) {
  double s = 0.0;
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    const auto& r = get_run(kind, d, n, method, seed);
    s += std::abs(r.theta_hat - r.theta_star);
  }
  return s / kSeeds;
}

char buffer[512];

std::string fmt(const char* f, auto... args) {
  std::snprintf(buffer, sizeof(buffer), f, args...);
  return buffer;
}

// --- criteria -------------------------------------------------------------

Outcome criterion_binary_recovery() {
  const double mae = mean_abs_error(TreatmentKind::kBinary, 20, 6000, "ddml");
  return {mae <= 0.3, fmt("Binary_20 DDML-MLP mean |theta-5| = %.4f (<= 0.3)", mae)};
}

Outcome criterion_relative_improvement() {
  const double ddml20 = mean_abs_error(TreatmentKind::kBinary, 20, 6000, "ddml");
  const double dml20 = mean_abs_error(TreatmentKind::kBinary, 20, 6000, "dml");
  const double ddml50 = mean_abs_error(TreatmentKind::kBinary, 50, 6000, "ddml");
  const double dml50 = mean_abs_error(TreatmentKind::kBinary, 50, 6000, "dml");
  const bool pass = ddml20 < 0.5 * dml20 && ddml50 < 0.5 * dml50;
  return {pass, fmt("d=20: %.4f vs %.4f, d=50: %.4f vs %.4f (DDML < 50%% of DML)", ddml20,
                    dml20, ddml50, dml50)};
}

Outcome criterion_continuous_recovery() {
  const double ddml = mean_abs_error(TreatmentKind::kContinuous, 20, 6000, "ddml");
  const double dml = mean_abs_error(TreatmentKind::kContinuous, 20, 6000, "dml");
  const bool pass = ddml <= 0.5 && ddml < dml;
  return {pass, fmt("Continuous_20 DDML mean |theta-theta_eff| = %.4f (<= 0.5), DML = %.4f",
                    ddml, dml)};
}

Outcome criterion_residual_dependence() {
  double ddml = 0.0, dml = 0.0;
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    ddml += get_run(TreatmentKind::kBinary, 100, 6000, "ddml", seed).residual_corr;
    dml += get_run(TreatmentKind::kBinary, 100, 6000, "dml", seed).residual_corr;
  }
  ddml /= kSeeds;
  dml /= kSeeds;
  return {ddml <= dml,
          fmt("Binary_100 mean |Corr(T~,eps)|: DDML %.4f <= DML %.4f", ddml, dml)};
}

Outcome criterion_probe_specialization() {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    const auto& run = get_run(TreatmentKind::kBinary, 100, 6000, "ddml", seed);
    if (!run.probes) continue;
    const auto& p = *run.probes;
    if (p.z_t.vs_t > p.z_t.vs_y_star && p.z_y.vs_y_star > p.z_y.vs_t) ++hits;
  }
  return {hits >= 4, fmt("Binary_100 probe pattern holds in %d/5 seeds (need >= 4)", hits)};
}

Outcome criterion_ablation_ordering() {
  const double full = mean_abs_error(TreatmentKind::kBinary, 100, 6000, "ddml");
  const double wo_enc = mean_abs_error(TreatmentKind::kBinary, 100, 6000, "ddml-wo_enc");
  const double wo_dis = mean_abs_error(TreatmentKind::kBinary, 100, 6000, "ddml-wo_dis");
  const double wo_ort = mean_abs_error(TreatmentKind::kBinary, 100, 6000, "ddml-wo_ort");
  const bool pass = full <= wo_enc && full <= wo_dis && full <= wo_ort;
  return {pass, fmt("Binary_100 MAE: full %.4f vs wo_enc %.4f, wo_dis %.4f, wo_ort %.4f",
                    full, wo_enc, wo_dis, wo_ort)};
}

Outcome criterion_consistency_trend() {
  std::vector<double> medians;
  for (int n : {500, 2000, 6000}) {
    std::vector<double> errs;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      const auto& r = get_run(TreatmentKind::kBinary, 20, n, "ddml", seed);
      errs.push_back(std::abs(r.theta_hat - r.theta_star));
    }
    medians.push_back(stats::median(errs));
  }
  int inversions = 0;
  bool tolerable = true;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    if (medians[i] > medians[i - 1]) {
      ++inversions;
      if (medians[i] > 1.2 * medians[i - 1]) tolerable = false;
    }
  }
  const bool pass = tolerable && inversions <= 1;
  return {pass, fmt("median |theta-5| over N {500,2000,6000} = {%.4f, %.4f, %.4f}, "
                    "inversions=%d",
                    medians[0], medians[1], medians[2], inversions)};
}

Outcome criterion_oracles() {
  // (a) HSIC trace form vs expanded-sum oracle on 50 random instances
  SeededRng rng(404);
  double max_hsic_diff = 0.0;
  for (int it = 0; it < 50; ++it) {
    const int n = 3 + static_cast<int>(rng.uniform_index(8));
    const int da = 1 + static_cast<int>(rng.uniform_index(3));
    const int db = 1 + static_cast<int>(rng.uniform_index(3));
    Matrix a(n, da), b(n, db);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < da; ++j) a(i, j) = rng.normal();
      for (int j = 0; j < db; ++j) b(i, j) = rng.normal();
    }
    hsic::KernelSpec spec;
    spec.bandwidth = 0.5 + rng.uniform();
    const double sigma = *spec.bandwidth;

    Matrix k(n, n), l(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        k(i, j) = std::exp(-(a.row(i) - a.row(j)).squaredNorm() / (2 * sigma * sigma));
        l(i, j) = std::exp(-(b.row(i) - b.row(j)).squaredNorm() / (2 * sigma * sigma));
      }
    }
    const double dn = n;
    double t1 = 0, sk = 0, sl = 0, t3 = 0;
    for (int i = 0; i < n; ++i) {
      double kr = 0, lr = 0;
      for (int j = 0; j < n; ++j) {
        t1 += k(i, j) * l(i, j);
        kr += k(i, j);
        lr += l(i, j);
        sk += k(i, j);
        sl += l(i, j);
      }
      t3 += kr * lr;
    }
    const double oracle =
        t1 / (dn * dn) + sk * sl / (dn * dn * dn * dn) - 2.0 * t3 / (dn * dn * dn);
    max_hsic_diff = std::max(max_hsic_diff, std::abs(hsic::hsic_value(a, b, spec) - oracle));
  }

  // (b) total-loss gradients vs central finite differences on a tiny net
  SeededRng net_rng(505);
  const int d = 3, lat = 2, n = 10;
  train::EncoderModel enc;
  auto widths = std::vector<int>{d, 4, lat};
  enc.net_c = num::FeedForwardNet::make(widths, net_rng);
  enc.net_t = num::FeedForwardNet::make(widths, net_rng);
  enc.net_y = num::FeedForwardNet::make(widths, net_rng);
  train::HeadModel heads;
  heads.t_head = num::FeedForwardNet::make({2 * lat, 4, 1}, net_rng);
  heads.y_head = num::FeedForwardNet::make({2 * lat, 4, 1}, net_rng);
  heads.kind = TreatmentKind::kContinuous;
  train::TrainSet batch;
  batch.x.resize(n, d);
  batch.t.resize(n);
  batch.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) batch.x(i, j) = net_rng.normal();
    batch.t[i] = net_rng.normal();
    batch.y[i] = net_rng.normal();
  }
  batch.kind = TreatmentKind::kContinuous;
  train::LossWeights w;
  train::AblationFlags flags;
  hsic::KernelSpec kernel;
  kernel.bandwidth = 1.0;
  const auto grads = train::total_loss_with_grads(enc, heads, batch, w, flags, kernel);
  double max_grad_rel = 0.0;
  auto fd_check = [&](num::FeedForwardNet& net, const num::NetGrads& g) {
    const double h = 1e-5;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      for (Eigen::Index r = 0; r < net.layers[l].w.rows(); ++r) {
        for (Eigen::Index c = 0; c < net.layers[l].w.cols(); ++c) {
          const double o = net.layers[l].w(r, c);
          net.layers[l].w(r, c) = o + h;
          const double up = train::total_loss(enc, heads, batch, w, flags, kernel);
          net.layers[l].w(r, c) = o - h;
          const double down = train::total_loss(enc, heads, batch, w, flags, kernel);
          net.layers[l].w(r, c) = o;
          const double fd = (up - down) / (2 * h);
          const double an = g.dw[l](r, c);
          max_grad_rel = std::max(
              max_grad_rel, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-7}));
        }
      }
    }
  };
  fd_check(enc.net_c, grads.enc_c);
  fd_check(enc.net_t, grads.enc_t);
  fd_check(enc.net_y, grads.enc_y);
  fd_check(heads.t_head, grads.head_t);
  fd_check(heads.y_head, grads.head_y);

  // (c) residual regression vs the dot-product oracle on 100 random pairs
  SeededRng rr_rng(606);
  double max_rr_diff = 0.0;
  for (int it = 0; it < 100; ++it) {
    const int m = 2 + static_cast<int>(rr_rng.uniform_index(50));
    Vector t(m), y(m);
    for (int i = 0; i < m; ++i) {
      t[i] = rr_rng.normal();
      y[i] = rr_rng.normal();
    }
    double num = 0, den = 0;
    for (int i = 0; i < m; ++i) {
      num += t[i] * y[i];
      den += t[i] * t[i];
    }
    max_rr_diff = std::max(max_rr_diff, std::abs(crossfit::residual_regression(t, y, 1e-8) -
                                                 num / (den + 1e-8)));
  }

  const bool pass = max_hsic_diff < 1e-10 && max_grad_rel <= 1e-4 && max_rr_diff < 1e-12;
  return {pass, fmt("hsic diff %.2e (<1e-10), grad rel %.2e (<=1e-4), resid diff %.2e "
                    "(<1e-12)",
                    max_hsic_diff, max_grad_rel, max_rr_diff)};
}

Outcome criterion_nemenyi_anchor() {
  const double cd = stats::nemenyi_cd(7, 12, 0.05);
  return {std::abs(cd - 2.60) <= 0.01, fmt("CD(7,12,0.05) = %.4f (2.60 +- 0.01)", cd)};
}

Outcome criterion_determinism() {
  bench::ExperimentConfig cfg;
  cfg.data.dgp = dgp_config(TreatmentKind::kBinary, 20, 600, 0);
  bench::MethodSpec ddml_m;
  ddml_m.estimator = "ddml";
  bench::MethodSpec dml_m;
  dml_m.estimator = "dml";
  cfg.methods = {ddml_m, dml_m};
  cfg.replications = 2;
  cfg.base_seed = 99;
  cfg.bundle.train_cfg.epochs = 60;
  cfg.bundle.mlp_spec.mlp_train.epochs = 80;
  cfg.workers = 2;

  const auto a = bench::run_experiment(cfg);
  const auto b = bench::run_experiment(cfg);
  bool identical = true;
  for (std::size_t m = 0; m < a.cells.size(); ++m) {
    for (std::size_t r = 0; r < a.cells[m].theta_hats.size(); ++r) {
      identical &= (a.cells[m].theta_hats[r] == b.cells[m].theta_hats[r]);
    }
  }
  return {identical, identical ? "re-run reproduced every theta-hat bit-identically"
                               : "re-run diverged"};
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  std::printf("acceptance suite: %d seeds per cell, K=5, paper-default hyperparameters\n",
              kSeeds);

  report(9, "Nemenyi anchor", criterion_nemenyi_anchor());
  report(8, "oracle equivalences", criterion_oracles());
  report(10, "run determinism", criterion_determinism());
  report(1, "synthetic binary recovery", criterion_binary_recovery());
  report(2, "relative improvement (binary)", criterion_relative_improvement());
  report(3, "synthetic continuous recovery", criterion_continuous_recovery());
  report(4, "residual-dependence reduction", criterion_residual_dependence());
  report(5, "probing specialization", criterion_probe_specialization());
  report(6, "ablation ordering", criterion_ablation_ordering());
  report(7, "consistency trend", criterion_consistency_trend());

  int failures = 0;
  for (const auto& r : g_results) failures += r.pass ? 0 : 1;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d/%zu criteria passed in %.0f s\n", static_cast<int>(g_results.size()) - failures,
              g_results.size(), secs);
  return failures == 0 ? 0 : 1;
}

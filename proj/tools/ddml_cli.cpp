// Benchmark CLI: synthetic data generation, experiment runs, diagnostics,
// effect-based feature ranking, and the Nemenyi critical difference.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ddml/experiment.hpp"
#include "ddml/stats.hpp"

using nlohmann::json;

namespace {

struct GenerateArgs {
  std::string kind = "binary";
  int n = 6000;
  int d = 20;
  std::uint64_t seed = 1;
  std::string out = "dataset.csv";
  double lambda_mix = 8.0;
  double alpha_c = 4.0;
  double alpha_t = 2.0;
  double sigma_t = 1.0;
  double sigma_y = 1.0;
  double theta = 5.0;
  double alpha_out = 1.0;
  bool no_standardize_t = false;
};

int cmd_generate(const GenerateArgs& args) {
  ddml::synth::DgpConfig cfg;
  if (args.kind == "binary") {
    cfg.treatment = ddml::TreatmentKind::kBinary;
  } else if (args.kind == "continuous") {
    cfg.treatment = ddml::TreatmentKind::kContinuous;
  } else {
    throw ddml::InputError("generate: kind must be 'binary' or 'continuous'");
  }
  cfg.n = args.n;
  cfg.d = args.d;
  cfg.seed = args.seed;
  cfg.lambda_mix = args.lambda_mix;
  cfg.alpha_c = args.alpha_c;
  cfg.alpha_t = args.alpha_t;
  cfg.sigma_t = args.sigma_t;
  cfg.sigma_y = args.sigma_y;
  cfg.theta_true = args.theta;
  cfg.alpha_out = args.alpha_out;
  cfg.standardize_t = !args.no_standardize_t;

  const ddml::Dataset data = ddml::synth::generate(cfg);
  ddml::synth::save_csv(data, args.out);

  const json truth = {{"schema_version", 1},
                      {"kind", args.kind},
                      {"n", cfg.n},
                      {"d", cfg.d},
                      {"seed", cfg.seed},
                      {"theta_true", data.truth->theta_true},
                      {"theta_eff", data.truth->theta_eff}};
  std::ofstream tf(args.out + ".truth.json");
  tf << truth.dump(2) << '\n';

  std::cout << "wrote " << args.out << " (" << data.n() << " rows, " << data.d()
            << " covariates), effective effect " << data.truth->theta_eff << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& output_dir, int workers,
            std::int64_t seed) {
  ddml::bench::ExperimentConfig cfg = ddml::bench::ExperimentConfig::load(config_path);
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (workers >= 0) cfg.workers = workers;
  if (seed >= 0) {
    cfg.base_seed = static_cast<std::uint64_t>(seed);
    cfg.seeds.clear();
  }

  const auto table = ddml::bench::run_experiment(cfg);
  ddml::bench::write_results(table, cfg, cfg.output_dir);

  std::printf("%-24s %12s %12s %12s %10s\n", "method", "mae", "rmse", "std", "seconds");
  for (const auto& cell : table.cells) {
    std::printf("%-24s %12.6f %12.6f %12.6f %10.1f\n", cell.method.c_str(), cell.mae,
                cell.rmse, cell.stddev, cell.seconds);
  }
  std::cout << "dataset " << table.dataset << ", reference effect " << table.theta_star
            << "; results in " << cfg.output_dir << "\n";
  return 0;
}

int cmd_diagnose(const std::string& config_path, const std::string& output_dir, int workers) {
  ddml::bench::ExperimentConfig cfg = ddml::bench::ExperimentConfig::load(config_path);
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (workers >= 0) cfg.workers = workers;

  const auto report = ddml::bench::run_diagnostics(cfg);
  std::printf("%-24s %18s\n", "method", "mean |corr(T~,eps)|");
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    double s = 0.0;
    int k = 0;
    for (double v : report.residual_corr[m]) {
      if (!std::isnan(v)) {
        s += v;
        ++k;
      }
    }
    std::printf("%-24s %18.6f\n", report.methods[m].c_str(), k ? s / k : 0.0);
  }
  if (report.probes) {
    const auto& p = *report.probes;
    std::printf("\nprobe grid        %10s %10s\n", "vs T", "vs Y*");
    std::printf("z_t               %10.4f %10.4f\n", p.z_t.vs_t, p.z_t.vs_y_star);
    std::printf("z_y               %10.4f %10.4f\n", p.z_y.vs_t, p.z_y.vs_y_star);
    std::printf("z_c               %10.4f %10.4f\n", p.z_c.vs_t, p.z_c.vs_y_star);
  }
  std::cout << "tables written to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_rank_features(const std::string& config_path, const std::string& out_path,
                      int workers) {
  ddml::bench::ExperimentConfig cfg = ddml::bench::ExperimentConfig::load(config_path);
  const auto seeds = cfg.replication_seeds();
  const ddml::Dataset data = ddml::bench::realize_dataset(cfg.data, seeds.front());
  ddml::SeededRng rng(seeds.front());

  const int worker_count = (workers >= 0) ? workers : cfg.workers;
  const auto effects =
      ddml::bench::rank_features(data, cfg.methods.front(), cfg.bundle, rng, worker_count);

  std::ofstream out(out_path);
  if (!out) throw ddml::InputError("rank-features: cannot open '" + out_path + "'");
  out << "rank,column,theta_hat,constant\n";
  char buf[64];
  for (std::size_t r = 0; r < effects.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%.17g", effects[r].theta_hat);
    out << (r + 1) << ",x" << effects[r].column << ',' << buf << ','
        << (effects[r].constant ? 1 : 0) << '\n';
  }
  std::cout << "ranked " << effects.size() << " features into " << out_path << "\n";
  for (std::size_t r = 0; r < std::min<std::size_t>(effects.size(), 10); ++r) {
    std::printf("  %2zu. x%-4d theta=%.4f%s\n", r + 1, effects[r].column,
                effects[r].theta_hat, effects[r].constant ? " (constant)" : "");
  }
  return 0;
}

int cmd_nemenyi(int methods, int tasks, double alpha) {
  const double cd = ddml::stats::nemenyi_cd(methods, tasks, alpha);
  std::printf("CD(alpha=%.2f, methods=%d, tasks=%d) = %.4f\n", alpha, methods, tasks, cd);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disentangled double machine learning benchmark runner"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Emit a synthetic dataset as CSV");
  generate->add_option("--kind", gen.kind, "binary|continuous")->capture_default_str();
  generate->add_option("--n", gen.n)->capture_default_str();
  generate->add_option("--d", gen.d)->capture_default_str();
  generate->add_option("--seed", gen.seed)->capture_default_str();
  generate->add_option("--out", gen.out)->capture_default_str();
  generate->add_option("--lambda-mix", gen.lambda_mix)->capture_default_str();
  generate->add_option("--alpha-c", gen.alpha_c)->capture_default_str();
  generate->add_option("--alpha-t", gen.alpha_t)->capture_default_str();
  generate->add_option("--sigma-t", gen.sigma_t)->capture_default_str();
  generate->add_option("--sigma-y", gen.sigma_y)->capture_default_str();
  generate->add_option("--theta", gen.theta)->capture_default_str();
  generate->add_option("--alpha-out", gen.alpha_out)->capture_default_str();
  generate->add_flag("--no-standardize-t", gen.no_standardize_t,
                     "Keep the continuous treatment on its raw scale");

  std::string config_path, output_dir, rank_out = "feature_ranking.csv";
  int workers = -1;
  std::int64_t seed_override = -1;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--output-dir", output_dir, "Override the config output dir");
  run->add_option("--workers", workers, "Concurrent replications (0 = hardware)");
  run->add_option("--seed", seed_override, "Override the base seed");

  auto* diagnose = app.add_subcommand("diagnose", "Residual-correlation and probe diagnostics");
  diagnose->add_option("--config", config_path)->required();
  diagnose->add_option("--output-dir", output_dir);
  diagnose->add_option("--workers", workers);

  auto* rank = app.add_subcommand("rank-features", "Rank covariates by estimated effect");
  rank->add_option("--config", config_path)->required();
  rank->add_option("--out", rank_out)->capture_default_str();
  rank->add_option("--workers", workers);

  int nm_methods = 7, nm_tasks = 12;
  double nm_alpha = 0.05;
  auto* nemenyi = app.add_subcommand("nemenyi", "Nemenyi critical difference");
  nemenyi->add_option("--methods", nm_methods)->capture_default_str();
  nemenyi->add_option("--tasks", nm_tasks)->capture_default_str();
  nemenyi->add_option("--alpha", nm_alpha)->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*generate) return cmd_generate(gen);
    if (*run) return cmd_run(config_path, output_dir, workers, seed_override);
    if (*diagnose) return cmd_diagnose(config_path, output_dir, workers);
    if (*rank) return cmd_rank_features(config_path, rank_out, workers);
    if (*nemenyi) return cmd_nemenyi(nm_methods, nm_tasks, nm_alpha);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    const json err = {{"error", {{"type", typeid(e).name()}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}

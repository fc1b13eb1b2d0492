#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddml/crossfit.hpp"
#include "ddml/csv.hpp"
#include "ddml/synthgen.hpp"

#include <nlohmann/json_fwd.hpp>

namespace ddml::bench {

struct MethodSpec {
  std::string estimator = "ddml";  // "dml" | "ddml"
  nuisance::NuisanceKind nuisance_kind = nuisance::NuisanceKind::kMlp;
  train::AblationFlags flags;  // ddml only
  std::string label;           // optional; derived from the fields when empty

  std::string resolved_label() const;
  void validate() const;
};

struct CsvSource {
  std::string path;
  synth::CsvSchema schema;
  std::optional<double> theta_star;  // reference effect for metrics
};

/// Either a synthetic DGP or an external CSV file.
struct DataSource {
  std::optional<synth::DgpConfig> dgp;
  std::optional<CsvSource> csv;

  void validate() const;
  std::string label() const;
};

/// Everything needed to run one estimator on one dataset.
struct EstimatorBundle {
  int folds = 5;
  train::LossWeights weights;
  num::TrainConfig train_cfg;
  std::optional<int> batch_size;  // unset = full batch up to 8192 rows, else 256
  nuisance::NuisanceSpec mlp_spec;
  nuisance::NuisanceSpec rf_spec;
  crossfit::EstimateOptions options;

  EstimatorBundle();
};

struct ExperimentConfig {
  int schema_version = 1;
  DataSource data;
  std::vector<MethodSpec> methods;
  int replications = 5;
  std::uint64_t base_seed = 1;
  std::vector<std::uint64_t> seeds;  // optional explicit list (length = replications)
  EstimatorBundle bundle;
  int workers = 0;  // 0 = hardware concurrency
  std::string output_dir = "results";

  void validate() const;
  std::vector<std::uint64_t> replication_seeds() const;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static ExperimentConfig load(const std::string& path);
};

struct CellResult {
  std::string method;
  std::vector<double> theta_hats;       // NaN for failed replications
  std::vector<double> residual_corrs;   // NaN for failed replications
  std::vector<std::string> errors;      // empty string = success
  double mae = 0.0;
  double rmse = 0.0;
  double stddev = 0.0;
  double seconds = 0.0;
};

struct ResultTable {
  int schema_version = 1;
  std::string dataset;
  double theta_star = 0.0;
  int replications = 0;
  std::vector<CellResult> cells;
};

/// Runs every (replication × method) cell; replications share the seed-derived
/// dataset and fold plan across methods. Failures are recorded per cell and
/// the table is still produced.
ResultTable run_experiment(const ExperimentConfig& cfg);

/// summary.csv and details.json under `dir` (created if missing).
void write_results(const ResultTable& table, const ExperimentConfig& cfg,
                   const std::string& dir);

nlohmann::json results_to_json(const ResultTable& table, const ExperimentConfig& cfg);

/// One estimator run; the rng's seed determines folds, so methods run with
/// fresh streams of the same seed share the fold plan.
crossfit::EstimationReport run_method(const Dataset& data, const MethodSpec& method,
                                      const EstimatorBundle& bundle, SeededRng& rng);

/// Materializes the configured dataset for one replication seed.
Dataset realize_dataset(const DataSource& source, std::uint64_t seed);

struct DiagnosticsReport {
  std::vector<std::string> methods;
  std::vector<std::vector<double>> residual_corr;  // per method, per replication
  std::optional<crossfit::ProbeGrid> probes;       // seed-averaged, encoder methods only
};

/// Residual-correlation distribution across seeds plus the probe grid,
/// written as diagnostics.csv / probes.csv under cfg.output_dir.
DiagnosticsReport run_diagnostics(const ExperimentConfig& cfg);

struct FeatureEffect {
  int column = -1;
  double theta_hat = 0.0;
  bool constant = false;
};

/// Treats each covariate column in turn as the treatment (against the
/// remaining columns) and ranks features by |effect|, ties broken by column
/// index. Binary columns are those whose value set is within {0,1}.
std::vector<FeatureEffect> rank_features(const Dataset& data, const MethodSpec& method,
                                         const EstimatorBundle& bundle, SeededRng& rng,
                                         int workers = 1);

}  // namespace ddml::bench

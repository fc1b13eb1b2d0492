#include "ddml/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "ddml/parallel.hpp"
#include "ddml/stats.hpp"

namespace ddml::bench {

using nlohmann::json;

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int effective_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}
}  // namespace

std::string MethodSpec::resolved_label() const {
  if (!label.empty()) return label;
  std::string s = estimator;
  s += (nuisance_kind == nuisance::NuisanceKind::kMlp) ? "-mlp" : "-rf";
  if (estimator == "ddml") {
    if (!flags.use_encoder) s += "-wo_enc";
    if (!flags.use_dis) s += "-wo_dis";
    if (!flags.use_ort) s += "-wo_ort";
  }
  return s;
}

void MethodSpec::validate() const {
  if (estimator != "dml" && estimator != "ddml") {
    throw InputError("MethodSpec: estimator must be 'dml' or 'ddml', got '" + estimator + "'");
  }
}

void DataSource::validate() const {
  if (dgp.has_value() == csv.has_value()) {
    throw InputError("DataSource: exactly one of dgp/csv must be set");
  }
  if (dgp) dgp->validate();
}

std::string DataSource::label() const {
  if (dgp) {
    std::string s = (dgp->treatment == TreatmentKind::kBinary) ? "binary_" : "continuous_";
    s += std::to_string(dgp->d) + "_n" + std::to_string(dgp->n);
    return s;
  }
  return std::filesystem::path(csv->path).stem().string();
}

EstimatorBundle::EstimatorBundle() {
  mlp_spec.kind = nuisance::NuisanceKind::kMlp;
  rf_spec.kind = nuisance::NuisanceKind::kRandomForest;
}

void ExperimentConfig::validate() const {
  data.validate();
  if (methods.empty()) throw InputError("ExperimentConfig: no methods configured");
  for (const auto& m : methods) m.validate();
  if (replications < 1) throw InputError("ExperimentConfig: replications must be >= 1");
  if (!seeds.empty() && static_cast<int>(seeds.size()) != replications) {
    throw InputError("ExperimentConfig: explicit seed list length must equal replications");
  }
  if (bundle.folds < 2) throw InputError("ExperimentConfig: folds must be >= 2");
  bundle.weights.validate();
  bundle.train_cfg.validate();
}

std::vector<std::uint64_t> ExperimentConfig::replication_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(replications));
  const SeededRng base(base_seed);
  for (int r = 0; r < replications; ++r) {
    out.push_back(base.derive("replication", static_cast<std::uint64_t>(r)).seed());
  }
  return out;
}

Dataset realize_dataset(const DataSource& source, std::uint64_t seed) {
  source.validate();
  if (source.dgp) {
    synth::DgpConfig cfg = *source.dgp;
    cfg.seed = seed;
    return synth::generate(cfg);
  }
  return synth::load_csv(source.csv->path, source.csv->schema);
}

crossfit::EstimationReport run_method(const Dataset& data, const MethodSpec& method,
                                      const EstimatorBundle& bundle, SeededRng& rng) {
  method.validate();
  const auto& spec = (method.nuisance_kind == nuisance::NuisanceKind::kMlp) ? bundle.mlp_spec
                                                                            : bundle.rf_spec;
  num::TrainConfig cfg = bundle.train_cfg;
  if (bundle.batch_size) {
    cfg.batch_size = *bundle.batch_size;
  } else {
    const Eigen::Index train_rows = data.n() - data.n() / bundle.folds;
    cfg.batch_size = (train_rows <= 8192) ? 0 : 256;
  }
  if (method.estimator == "dml") {
    return crossfit::estimate_dml(data, bundle.folds, spec, rng, bundle.options);
  }
  return crossfit::estimate_ddml(data, bundle.folds, spec, bundle.weights, cfg, method.flags,
                                 rng, bundle.options);
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto seeds = cfg.replication_seeds();
  const int reps = cfg.replications;
  const int n_methods = static_cast<int>(cfg.methods.size());

  ResultTable table;
  table.dataset = cfg.data.label();
  table.replications = reps;
  table.theta_star = kNaN;
  if (cfg.data.dgp) {
    // filled from the first realized dataset below
  } else if (cfg.data.csv && cfg.data.csv->theta_star) {
    table.theta_star = *cfg.data.csv->theta_star;
  } else {
    throw InputError("run_experiment: no ground-truth effect available for metrics");
  }

  for (const auto& m : cfg.methods) {
    CellResult cell;
    cell.method = m.resolved_label();
    cell.theta_hats.assign(static_cast<std::size_t>(reps), kNaN);
    cell.residual_corrs.assign(static_cast<std::size_t>(reps), kNaN);
    cell.errors.assign(static_cast<std::size_t>(reps), "");
    table.cells.push_back(std::move(cell));
  }

  std::vector<double> theta_stars(static_cast<std::size_t>(reps), table.theta_star);
  std::vector<double> cell_seconds(static_cast<std::size_t>(reps * n_methods), 0.0);

  // One task per (replication, method); the dataset is regenerated inside the
  // task so tasks stay independent.
  parallel_for(reps * n_methods, effective_workers(cfg.workers), [&](int task) {
    const int r = task / n_methods;
    const int m = task % n_methods;
    auto& cell = table.cells[static_cast<std::size_t>(m)];
    try {
      const Dataset data = realize_dataset(cfg.data, seeds[static_cast<std::size_t>(r)]);
      // only one task per replication records the target
      if (m == 0 && data.truth) theta_stars[static_cast<std::size_t>(r)] = data.truth->theta_eff;
      SeededRng rng(seeds[static_cast<std::size_t>(r)]);
      const auto report = run_method(data, cfg.methods[static_cast<std::size_t>(m)],
                                     cfg.bundle, rng);
      cell.theta_hats[static_cast<std::size_t>(r)] = report.theta_hat;
      cell.residual_corrs[static_cast<std::size_t>(r)] = report.residual_corr;
      cell_seconds[static_cast<std::size_t>(task)] = report.wall_seconds;
    } catch (const std::exception& e) {
      cell.errors[static_cast<std::size_t>(r)] = e.what();
    }
  });

  if (cfg.data.dgp) {
    table.theta_star = theta_stars.front();
    for (double ts : theta_stars) {
      if (std::isnan(ts)) throw NumericError("run_experiment: missing ground truth");
    }
    // Continuous DGPs rescale the target per replication; metrics compare each
    // estimate to its own replication's effective effect, so fold the
    // per-replication targets into the error computation below.
  }

  for (int m = 0; m < n_methods; ++m) {
    auto& cell = table.cells[static_cast<std::size_t>(m)];
    std::vector<double> errors_abs;
    std::vector<double> oks;
    for (int r = 0; r < reps; ++r) {
      const double th = cell.theta_hats[static_cast<std::size_t>(r)];
      if (std::isnan(th)) continue;
      errors_abs.push_back(th - theta_stars[static_cast<std::size_t>(r)]);
      oks.push_back(th);
      cell.seconds += cell_seconds[static_cast<std::size_t>(r * n_methods + m)];
    }
    if (!errors_abs.empty()) {
      double mae = 0.0, mse = 0.0;
      for (double e : errors_abs) {
        mae += std::abs(e);
        mse += e * e;
      }
      mae /= static_cast<double>(errors_abs.size());
      mse /= static_cast<double>(errors_abs.size());
      cell.mae = mae;
      cell.rmse = std::sqrt(mse);
      cell.stddev = stats::stddev(oks);
      if (cell.mae > cell.rmse + 1e-12) {
        throw NumericError("run_experiment: MAE exceeds RMSE");  // Jensen violation
      }
    } else {
      cell.mae = cell.rmse = cell.stddev = kNaN;
    }
  }
  return table;
}

json results_to_json(const ResultTable& table, const ExperimentConfig& cfg) {
  json cells = json::array();
  for (const auto& cell : table.cells) {
    json thetas = json::array();
    json corrs = json::array();
    for (double v : cell.theta_hats) thetas.push_back(std::isnan(v) ? json() : json(v));
    for (double v : cell.residual_corrs) corrs.push_back(std::isnan(v) ? json() : json(v));
    cells.push_back({{"method", cell.method},
                     {"theta_hats", thetas},
                     {"residual_corrs", corrs},
                     {"errors", cell.errors},
                     {"mae", cell.mae},
                     {"rmse", cell.rmse},
                     {"std", cell.stddev},
                     {"seconds", cell.seconds}});
  }
  return json{{"schema_version", table.schema_version},
              {"dataset", table.dataset},
              {"theta_star", table.theta_star},
              {"replications", table.replications},
              {"seeds", cfg.replication_seeds()},
              {"config", cfg.to_json()},
              {"cells", cells}};
}

void write_results(const ResultTable& table, const ExperimentConfig& cfg,
                   const std::string& dir) {
  std::filesystem::create_directories(dir);

  const auto summary_path = std::filesystem::path(dir) / "summary.csv";
  std::ofstream out(summary_path);
  if (!out) throw InputError("write_results: cannot open " + summary_path.string());
  out << "schema_version,dataset,method,replications,theta_star,mae,rmse,std,seconds\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (const auto& cell : table.cells) {
    out << table.schema_version << ',' << table.dataset << ',' << cell.method << ','
        << table.replications << ',';
    put(table.theta_star);
    out << ',';
    put(cell.mae);
    out << ',';
    put(cell.rmse);
    out << ',';
    put(cell.stddev);
    out << ',';
    put(cell.seconds);
    out << '\n';
  }

  const auto details_path = std::filesystem::path(dir) / "details.json";
  std::ofstream jout(details_path);
  if (!jout) throw InputError("write_results: cannot open " + details_path.string());
  jout << results_to_json(table, cfg).dump(2) << '\n';
}

DiagnosticsReport run_diagnostics(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto seeds = cfg.replication_seeds();
  const int reps = cfg.replications;
  const int n_methods = static_cast<int>(cfg.methods.size());

  DiagnosticsReport report;
  report.methods.reserve(cfg.methods.size());
  for (const auto& m : cfg.methods) report.methods.push_back(m.resolved_label());
  report.residual_corr.assign(cfg.methods.size(),
                              std::vector<double>(static_cast<std::size_t>(reps), kNaN));

  std::vector<std::optional<crossfit::ProbeGrid>> grids(
      static_cast<std::size_t>(reps * n_methods));

  parallel_for(reps * n_methods, effective_workers(cfg.workers), [&](int task) {
    const int r = task / n_methods;
    const int m = task % n_methods;
    const Dataset data = realize_dataset(cfg.data, seeds[static_cast<std::size_t>(r)]);
    SeededRng rng(seeds[static_cast<std::size_t>(r)]);
    const auto res = run_method(data, cfg.methods[static_cast<std::size_t>(m)], cfg.bundle, rng);
    report.residual_corr[static_cast<std::size_t>(m)][static_cast<std::size_t>(r)] =
        res.residual_corr;
    grids[static_cast<std::size_t>(task)] = res.probes;
  });

  crossfit::ProbeGrid sum;
  int count = 0;
  for (const auto& g : grids) {
    if (!g) continue;
    sum.z_c.vs_t += g->z_c.vs_t;
    sum.z_c.vs_y_star += g->z_c.vs_y_star;
    sum.z_t.vs_t += g->z_t.vs_t;
    sum.z_t.vs_y_star += g->z_t.vs_y_star;
    sum.z_y.vs_t += g->z_y.vs_t;
    sum.z_y.vs_y_star += g->z_y.vs_y_star;
    ++count;
  }
  if (count > 0) {
    const double inv = 1.0 / count;
    sum.z_c.vs_t *= inv;
    sum.z_c.vs_y_star *= inv;
    sum.z_t.vs_t *= inv;
    sum.z_t.vs_y_star *= inv;
    sum.z_y.vs_t *= inv;
    sum.z_y.vs_y_star *= inv;
    report.probes = sum;
  }

  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream out(std::filesystem::path(cfg.output_dir) / "diagnostics.csv");
    out << "schema_version,dataset,method,replication,seed,residual_corr\n";
    for (int m = 0; m < n_methods; ++m) {
      for (int r = 0; r < reps; ++r) {
        out << cfg.schema_version << ',' << cfg.data.label() << ',' << report.methods[m] << ','
            << r << ',' << seeds[static_cast<std::size_t>(r)] << ','
            << report.residual_corr[static_cast<std::size_t>(m)][static_cast<std::size_t>(r)]
            << '\n';
      }
    }
  }
  if (report.probes) {
    std::ofstream out(std::filesystem::path(cfg.output_dir) / "probes.csv");
    out << "schema_version,subspace,vs_t,vs_y_star\n";
    const auto& p = *report.probes;
    out << cfg.schema_version << ",z_t," << p.z_t.vs_t << ',' << p.z_t.vs_y_star << '\n';
    out << cfg.schema_version << ",z_y," << p.z_y.vs_t << ',' << p.z_y.vs_y_star << '\n';
    out << cfg.schema_version << ",z_c," << p.z_c.vs_t << ',' << p.z_c.vs_y_star << '\n';
  }
  return report;
}

std::vector<FeatureEffect> rank_features(const Dataset& data, const MethodSpec& method,
                                         const EstimatorBundle& bundle, SeededRng& rng,
                                         int workers) {
  data.validate();
  const int d = static_cast<int>(data.d());
  if (d < 2) throw InputError("rank_features: need at least 2 covariate columns");
  const SeededRng master = rng.derive(rng.next_u64());

  std::vector<FeatureEffect> effects(static_cast<std::size_t>(d));
  parallel_for(d, effective_workers(workers), [&](int j) {
    auto& eff = effects[static_cast<std::size_t>(j)];
    eff.column = j;

    const Vector col = data.x.col(j);
    if ((col.array() == col[0]).all()) {
      eff.constant = true;
      eff.theta_hat = 0.0;
      return;
    }
    const bool is_binary = ((col.array() == 0.0) || (col.array() == 1.0)).all();

    Dataset sub;
    sub.kind = is_binary ? TreatmentKind::kBinary : TreatmentKind::kContinuous;
    sub.t = col;
    sub.y = data.y;
    sub.x.resize(data.n(), d - 1);
    Eigen::Index c = 0;
    for (int jj = 0; jj < d; ++jj) {
      if (jj == j) continue;
      sub.x.col(c++) = data.x.col(jj);
    }
    SeededRng col_rng = master.derive("feature", static_cast<std::uint64_t>(j));
    const auto report = run_method(sub, method, bundle, col_rng);
    eff.theta_hat = report.theta_hat;
  });

  std::sort(effects.begin(), effects.end(), [](const FeatureEffect& a, const FeatureEffect& b) {
    const double aa = std::abs(a.theta_hat);
    const double bb = std::abs(b.theta_hat);
    if (aa != bb) return aa > bb;
    return a.column < b.column;
  });
  return effects;
}

// ---------------------------------------------------------------------------
// JSON config (de)serialization
// ---------------------------------------------------------------------------

namespace {

TreatmentKind parse_kind(const std::string& s) {
  if (s == "binary") return TreatmentKind::kBinary;
  if (s == "continuous") return TreatmentKind::kContinuous;
  throw InputError("config: unknown treatment kind '" + s + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.schema_version = j.value("schema_version", 1);

  const json& ds = j.at("dataset");
  const std::string kind = ds.value("kind", "binary");
  if (kind == "csv") {
    CsvSource src;
    src.path = ds.at("path").get<std::string>();
    src.schema.treatment_column = ds.value("treatment_column", "t");
    src.schema.outcome_column = ds.value("outcome_column", "y");
    src.schema.covariate_columns =
        ds.value("covariate_columns", std::vector<std::string>{});
    src.schema.kind = parse_kind(ds.value("treatment_kind", "binary"));
    if (ds.contains("theta_star")) src.theta_star = ds.at("theta_star").get<double>();
    cfg.data.csv = std::move(src);
  } else {
    synth::DgpConfig dgp;
    dgp.treatment = parse_kind(kind);
    dgp.n = ds.value("n", dgp.n);
    dgp.d = ds.value("d", dgp.d);
    dgp.lambda_mix = ds.value("lambda_mix", dgp.lambda_mix);
    dgp.alpha_c = ds.value("alpha_c", dgp.alpha_c);
    dgp.alpha_t = ds.value("alpha_t", dgp.alpha_t);
    dgp.sigma_t = ds.value("sigma_t", dgp.sigma_t);
    dgp.sigma_y = ds.value("sigma_y", dgp.sigma_y);
    dgp.theta_true = ds.value("theta", dgp.theta_true);
    dgp.alpha_out = ds.value("alpha_out", dgp.alpha_out);
    dgp.standardize_t = ds.value("standardize_t", dgp.standardize_t);
    cfg.data.dgp = dgp;
  }

  if (j.contains("methods")) {
    for (const auto& jm : j.at("methods")) {
      MethodSpec m;
      m.estimator = jm.value("estimator", "ddml");
      const std::string nk = jm.value("nuisance", "mlp");
      if (nk == "mlp") {
        m.nuisance_kind = nuisance::NuisanceKind::kMlp;
      } else if (nk == "rf") {
        m.nuisance_kind = nuisance::NuisanceKind::kRandomForest;
      } else {
        throw InputError("config: unknown nuisance kind '" + nk + "'");
      }
      m.flags.use_encoder = jm.value("use_encoder", true);
      m.flags.use_dis = jm.value("use_dis", true);
      m.flags.use_ort = jm.value("use_ort", true);
      m.label = jm.value("label", "");
      cfg.methods.push_back(std::move(m));
    }
  }
  if (cfg.methods.empty()) cfg.methods.push_back(MethodSpec{});

  cfg.replications = j.value("replications", cfg.replications);
  cfg.base_seed = j.value("seed", cfg.base_seed);
  cfg.seeds = j.value("seeds", std::vector<std::uint64_t>{});
  cfg.bundle.folds = j.value("folds", cfg.bundle.folds);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);

  if (j.contains("loss_weights")) {
    const json& lw = j.at("loss_weights");
    cfg.bundle.weights.lambda_dis = lw.value("lambda_dis", cfg.bundle.weights.lambda_dis);
    cfg.bundle.weights.lambda_ort = lw.value("lambda_ort", cfg.bundle.weights.lambda_ort);
    cfg.bundle.weights.delta = lw.value("delta", cfg.bundle.weights.delta);
    cfg.bundle.weights.eps_corr = lw.value("eps_corr", cfg.bundle.weights.eps_corr);
    cfg.bundle.weights.detach_theta_tra =
        lw.value("detach_theta_tra", cfg.bundle.weights.detach_theta_tra);
  }
  if (j.contains("train")) {
    const json& tr = j.at("train");
    auto& t = cfg.bundle.train_cfg;
    t.learning_rate = tr.value("learning_rate", t.learning_rate);
    t.epochs = tr.value("epochs", t.epochs);
    t.weight_decay = tr.value("weight_decay", t.weight_decay);
    if (tr.contains("batch_size")) cfg.bundle.batch_size = tr.at("batch_size").get<int>();
    if (tr.contains("grad_clip")) {
      if (tr.at("grad_clip").is_null()) {
        t.grad_clip.reset();
      } else {
        t.grad_clip = tr.at("grad_clip").get<double>();
      }
    }
  }
  if (j.contains("trainer_arch")) {
    const json& ar = j.at("trainer_arch");
    auto& a = cfg.bundle.options.arch;
    a.latent_dim = ar.value("latent_dim", a.latent_dim);
    a.encoder_hidden = ar.value("encoder_hidden", a.encoder_hidden);
    a.head_hidden = ar.value("head_hidden", a.head_hidden);
    a.hsic_subsample = ar.value("hsic_subsample", a.hsic_subsample);
  }
  if (j.contains("nuisance")) {
    const json& nu = j.at("nuisance");
    auto& mlp = cfg.bundle.mlp_spec;
    mlp.mlp_hidden = nu.value("mlp_hidden", mlp.mlp_hidden);
    mlp.mlp_train.epochs = nu.value("mlp_epochs", mlp.mlp_train.epochs);
    mlp.mlp_train.learning_rate = nu.value("mlp_learning_rate", mlp.mlp_train.learning_rate);
    auto& rf = cfg.bundle.rf_spec;
    rf.rf_trees = nu.value("rf_trees", rf.rf_trees);
    rf.rf_min_leaf = nu.value("rf_min_leaf", rf.rf_min_leaf);
    rf.rf_max_depth = nu.value("rf_max_depth", rf.rf_max_depth);
    rf.rf_bootstrap = nu.value("rf_bootstrap", rf.rf_bootstrap);
  }
  cfg.validate();
  return cfg;
}

json ExperimentConfig::to_json() const {
  json ds;
  if (data.dgp) {
    const auto& g = *data.dgp;
    ds = {{"kind", g.treatment == TreatmentKind::kBinary ? "binary" : "continuous"},
          {"n", g.n},
          {"d", g.d},
          {"lambda_mix", g.lambda_mix},
          {"alpha_c", g.alpha_c},
          {"alpha_t", g.alpha_t},
          {"sigma_t", g.sigma_t},
          {"sigma_y", g.sigma_y},
          {"theta", g.theta_true},
          {"alpha_out", g.alpha_out},
          {"standardize_t", g.standardize_t}};
  } else {
    ds = {{"kind", "csv"},
          {"path", data.csv->path},
          {"treatment_column", data.csv->schema.treatment_column},
          {"outcome_column", data.csv->schema.outcome_column},
          {"covariate_columns", data.csv->schema.covariate_columns},
          {"treatment_kind",
           data.csv->schema.kind == TreatmentKind::kBinary ? "binary" : "continuous"}};
    if (data.csv->theta_star) ds["theta_star"] = *data.csv->theta_star;
  }

  json methods_json = json::array();
  for (const auto& m : methods) {
    json jm = {{"estimator", m.estimator},
               {"nuisance", m.nuisance_kind == nuisance::NuisanceKind::kMlp ? "mlp" : "rf"},
               {"use_encoder", m.flags.use_encoder},
               {"use_dis", m.flags.use_dis},
               {"use_ort", m.flags.use_ort}};
    if (!m.label.empty()) jm["label"] = m.label;
    methods_json.push_back(std::move(jm));
  }

  json train = {{"learning_rate", bundle.train_cfg.learning_rate},
                {"epochs", bundle.train_cfg.epochs},
                {"weight_decay", bundle.train_cfg.weight_decay}};
  if (bundle.batch_size) train["batch_size"] = *bundle.batch_size;
  if (bundle.train_cfg.grad_clip) {
    train["grad_clip"] = *bundle.train_cfg.grad_clip;
  } else {
    train["grad_clip"] = nullptr;
  }

  return json{
      {"schema_version", schema_version},
      {"dataset", ds},
      {"methods", methods_json},
      {"replications", replications},
      {"seed", base_seed},
      {"seeds", seeds},
      {"folds", bundle.folds},
      {"loss_weights",
       {{"lambda_dis", bundle.weights.lambda_dis},
        {"lambda_ort", bundle.weights.lambda_ort},
        {"delta", bundle.weights.delta},
        {"eps_corr", bundle.weights.eps_corr},
        {"detach_theta_tra", bundle.weights.detach_theta_tra}}},
      {"train", train},
      {"trainer_arch",
       {{"latent_dim", bundle.options.arch.latent_dim},
        {"encoder_hidden", bundle.options.arch.encoder_hidden},
        {"head_hidden", bundle.options.arch.head_hidden},
        {"hsic_subsample", bundle.options.arch.hsic_subsample}}},
      {"nuisance",
       {{"mlp_hidden", bundle.mlp_spec.mlp_hidden},
        {"mlp_epochs", bundle.mlp_spec.mlp_train.epochs},
        {"mlp_learning_rate", bundle.mlp_spec.mlp_train.learning_rate},
        {"rf_trees", bundle.rf_spec.rf_trees},
        {"rf_min_leaf", bundle.rf_spec.rf_min_leaf},
        {"rf_max_depth", bundle.rf_spec.rf_max_depth},
        {"rf_bootstrap", bundle.rf_spec.rf_bootstrap}}},
      {"workers", workers},
      {"output_dir", output_dir}};
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("config: failed to parse '" + path + "': " + e.what());
  }
  return from_json(j);
}

}  // namespace ddml::bench

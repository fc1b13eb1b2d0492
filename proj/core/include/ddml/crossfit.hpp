#pragma once

#include <optional>
#include <vector>

#include "ddml/data.hpp"
#include "ddml/nuisance.hpp"
#include "ddml/trainer.hpp"

namespace ddml::crossfit {

/// Deterministic partition of sample indices into K disjoint folds whose
/// sizes differ by at most one.
struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // fold index per sample

  std::vector<std::vector<int>> fold_indices() const;
};

FoldPlan make_folds(int n, int k, SeededRng& rng);

/// theta = t_res . y_res / (t_res . t_res + delta), exactly as written.
double residual_regression(const Vector& t_res, const Vector& y_res, double delta);

/// Out-of-fold predictions aligned to the full sample; producing_fold[i]
/// records which fold's model predicted sample i.
struct NuisancePredictions {
  Vector t_hat;
  Vector y_hat;
  std::vector<int> producing_fold;
};

struct SubspaceProbe {
  double vs_t = 0.0;       // AUC (binary) or Spearman (continuous) against T
  double vs_y_star = 0.0;  // R^2 against the residualized outcome
};

/// 3×2 probe grid: one row per latent subspace.
struct ProbeGrid {
  SubspaceProbe z_c, z_t, z_y;
};

struct FoldTrace {
  int fold = -1;
  std::vector<train::EpochTrace> trainer;  // empty when no encoder was trained
};

struct EstimationReport {
  double theta_hat = 0.0;
  Vector t_res, y_res;
  NuisancePredictions predictions;
  std::vector<FoldTrace> fold_traces;
  double residual_corr = 0.0;  // |Corr(T_res, Y_res - theta T_res)|
  std::optional<ProbeGrid> probes;
  double wall_seconds = 0.0;
};

struct EstimateOptions {
  int workers = 1;  // concurrent folds
  train::TrainerArch arch;
  hsic::KernelSpec kernel;
  bool compute_probes = true;
};

/// Classic DML: per fold, nuisances fit on the (fold-standardized) raw
/// covariates, out-of-fold predictions accumulated, then residual-on-residual
/// regression.
EstimationReport estimate_dml(const Dataset& data, int k, const nuisance::NuisanceSpec& spec,
                              SeededRng& rng, const EstimateOptions& opts = {});

/// Disentangled DML: per fold, the encoder and heads are trained on the
/// training split, both splits are encoded, the treatment nuisance is fit on
/// (Z_c,Z_t) and the outcome nuisance on (Z_c,Z_y), hold-out predictions are
/// accumulated, and the final effect comes from residual-on-residual
/// regression. flags all false reproduces estimate_dml bit for bit.
EstimationReport estimate_ddml(const Dataset& data, int k, const nuisance::NuisanceSpec& spec,
                               const train::LossWeights& w, const num::TrainConfig& cfg,
                               const train::AblationFlags& flags, SeededRng& rng,
                               const EstimateOptions& opts = {});

/// Simple linear probes per subspace: least-squares fitted scores against T
/// (AUC for binary, Spearman for continuous) and R^2 against y_star.
ProbeGrid linear_probe(const train::RepresentationTriple& z, const Vector& t,
                       const Vector& y_star, TreatmentKind kind);

struct OrthogonalityProbe {
  double score_slope = 0.0;  // central-difference slope of the orthogonal moment
  double naive_slope = 0.0;  // same perturbation on the plain residual moment
};

/// Central-difference directional derivative of the empirical moments when
/// the fitted nuisance predictions are perturbed by ±h along a random
/// direction bounded in [-1,1].
OrthogonalityProbe orthogonality_probe(const Dataset& data, const EstimationReport& report,
                                       double h, SeededRng& rng);

}  // namespace ddml::crossfit

#pragma once

#include <vector>

#include "ddml/data.hpp"
#include "ddml/hsic.hpp"
#include "ddml/net.hpp"

namespace ddml::train {

/// Per-sample latent blocks produced by the disentangling encoder.
struct RepresentationTriple {
  Matrix z_c;
  Matrix z_t;
  Matrix z_y;
};

/// Three subnetworks, one per causal-role subspace.
struct EncoderModel {
  num::FeedForwardNet net_c, net_t, net_y;

  int input_width() const { return net_c.input_width(); }
  int dim_c() const { return net_c.output_width(); }
  int dim_t() const { return net_t.output_width(); }
  int dim_y() const { return net_y.output_width(); }
};

RepresentationTriple encode(const EncoderModel& model, const Matrix& x);

/// Dual prediction heads: treatment head over concat(Z_c, Z_t), outcome head
/// over concat(Z_c, Z_y). The treatment head emits a logit for binary
/// treatments and a raw prediction for continuous ones.
struct HeadModel {
  num::FeedForwardNet t_head, y_head;
  TreatmentKind kind = TreatmentKind::kBinary;
};

struct LossWeights {
  double lambda_dis = 1.0;
  double lambda_ort = 1.0;
  double delta = 1e-8;      // stabilizer in the training-set effect quotient
  double eps_corr = 1e-8;   // stabilizer in the Pearson correlation denominator
  bool detach_theta_tra = false;

  void validate() const;
};

/// Module toggles: all-true is the full method; use_encoder=false routes raw
/// covariates into both heads (and downstream nuisances).
struct AblationFlags {
  bool use_encoder = true;
  bool use_dis = true;
  bool use_ort = true;
};

struct TrainSet {
  Matrix x;
  Vector t;
  Vector y;
  TreatmentKind kind = TreatmentKind::kBinary;
};

struct TrainerArch {
  int latent_dim = 16;  // capped at the input width
  std::vector<int> encoder_hidden = {64, 64};
  std::vector<int> head_hidden = {64, 64};
  int hsic_subsample = 1024;  // rows above this use a seeded subsample per step
};

/// l_T + l_Y on the heads' outputs: logit binary cross-entropy or MSE for the
/// treatment (by kind), MSE for the outcome.
double supervised_loss(const HeadModel& heads, const RepresentationTriple& z,
                       const Vector& t, const Vector& y);

struct RdoResult {
  double theta_tra = 0.0;
  double loss = 0.0;
};

/// Residual-dependence orthogonalization penalty. v = t - t_pred,
/// e = y - y_pred, theta_tra = v'e / (v'v + delta), u = e - theta_tra v,
/// loss = |Corr(v, u)| with an eps-stabilized denominator. For binary
/// treatments t_pred is the predicted probability.
RdoResult rdo_loss(const Vector& t, const Vector& y, const Vector& t_pred,
                   const Vector& y_pred, const LossWeights& w);

struct RdoGrad {
  double theta_tra = 0.0;
  double loss = 0.0;
  Vector d_t_pred;
  Vector d_y_pred;
};

/// rdo_loss plus gradients w.r.t. both prediction vectors. Gradients flow
/// through theta_tra unless w.detach_theta_tra is set.
RdoGrad rdo_loss_with_grad(const Vector& t, const Vector& y, const Vector& t_pred,
                           const Vector& y_pred, const LossWeights& w);

struct LossTerms {
  double sup = 0.0;
  double dis = 0.0;
  double ort = 0.0;
  double total = 0.0;
};

/// Weighted sum of the enabled terms on one batch. Disabled flags zero their
/// terms; with use_encoder=false both heads consume the raw covariates and the
/// encoder argument is ignored. Weight decay is an optimizer concern and never
/// appears here.
LossTerms total_loss_terms(const EncoderModel& encoder, const HeadModel& heads,
                           const TrainSet& batch, const LossWeights& w,
                           const AblationFlags& flags, const hsic::KernelSpec& kernel);

double total_loss(const EncoderModel& encoder, const HeadModel& heads, const TrainSet& batch,
                  const LossWeights& w, const AblationFlags& flags,
                  const hsic::KernelSpec& kernel);

struct StepGrads {
  LossTerms terms;
  num::NetGrads enc_c, enc_t, enc_y, head_t, head_y;
};

/// One training step's loss terms and parameter gradients. hsic_rows, when
/// non-null, restricts the disentanglement term to those batch rows.
StepGrads total_loss_with_grads(const EncoderModel& encoder, const HeadModel& heads,
                                const TrainSet& batch, const LossWeights& w,
                                const AblationFlags& flags, const hsic::KernelSpec& kernel,
                                const std::vector<int>* hsic_rows = nullptr);

struct EpochTrace {
  double sup = 0.0;
  double dis = 0.0;
  double ort = 0.0;
  double total = 0.0;
};

struct FitResult {
  EncoderModel encoder;  // untouched (zero-layer nets) when use_encoder=false
  HeadModel heads;
  std::vector<EpochTrace> trace;
};

/// Trains encoder and heads by minimizing
/// L_sup + lambda_dis L_dis + lambda_ort L_ort (weight decay via the
/// optimizer). Deterministic for a fixed rng seed and config.
FitResult fit(const TrainSet& trainset, const num::TrainConfig& cfg, const LossWeights& w,
              const AblationFlags& flags, SeededRng& rng, const TrainerArch& arch = {},
              const hsic::KernelSpec& kernel = {});

}  // namespace ddml::train

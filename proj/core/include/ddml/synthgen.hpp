#pragma once

#include <cstdint>

#include "ddml/data.hpp"
#include "ddml/rng.hpp"

namespace ddml::synth {

/// Synthetic DGP parameters. Defaults match the benchmark setting: N=6000,
/// entanglement lambda=8, confounding alpha_c=4, treatment-signal alpha_t=2,
/// unit noise scales, true effect 5.
struct DgpConfig {
  int n = 6000;
  int d = 20;  // >= 10; the latent-factor formulas index columns 0-9
  double lambda_mix = 8.0;
  double alpha_c = 4.0;
  double alpha_t = 2.0;
  double sigma_t = 1.0;
  double sigma_y = 1.0;
  double theta_true = 5.0;
  double alpha_out = 1.0;
  TreatmentKind treatment = TreatmentKind::kBinary;
  bool standardize_t = true;  // continuous treatments only
  std::uint64_t seed = 0;

  void validate() const;
};

struct CovariateDraw {
  Matrix x;
  Vector z_c, z_t, z_y;
};

/// Covariates and scalar latent factors.
///
/// Draw order from `rng`: Z entries row-major (n×d standard normals), then
/// mixing-matrix entries row-major (d×d normals scaled by lambda). Then
///   X_lin = Z + (1/d) Z M
///   X     = tanh(X_lin) + 0.2 sin(X_lin M^T / d)
///   Z_c   = 0.6 X0*X1 + 0.4 X2^2 + 0.3 sin(X3+X4)
///   Z_t   = 0.5 X5*X6 + 0.3 tanh(X7) + 0.2 cos(X8+X9)
///   Z_y   = 0.5 X1*X2 + 0.3 cos(X0+X3)
CovariateDraw generate_covariates(const DgpConfig& cfg, SeededRng& rng);

/// T ~ Bernoulli(sigmoid(alpha_c Z_c + alpha_t Z_t)); one uniform per sample,
/// then Y = alpha_out (Z_c + Z_y) + theta T + eps with one normal per sample.
Dataset generate_binary(const DgpConfig& cfg, SeededRng& rng);

/// T_raw = alpha_c (Z_c + 0.5 tanh Z_c) + alpha_t (Z_t + 0.3 sin Z_t) + eta,
/// one normal per sample; Y uses the pre-standardization treatment. When
/// standardize_t is set the published T has zero mean and unit variance and
/// the recorded effective effect is theta_true * sd(T_raw).
Dataset generate_continuous(const DgpConfig& cfg, SeededRng& rng);

/// Convenience wrapper seeding a fresh stream from cfg.seed.
Dataset generate(const DgpConfig& cfg);

}  // namespace ddml::synth

#pragma once

#include <optional>

#include "ddml/matrix.hpp"

namespace ddml::hsic {

enum class KernelKind { kGaussianRbf };

/// Gaussian RBF kernel spec. An unset bandwidth means the median heuristic:
/// the median pairwise distance of the sample block, recomputed per call and
/// never part of any gradient.
struct KernelSpec {
  KernelKind kind = KernelKind::kGaussianRbf;
  std::optional<double> bandwidth;  // unset -> median heuristic
  double bandwidth_floor = 1e-8;

  void validate() const;
};

/// Bandwidth actually used for a sample block under `spec`.
double resolve_bandwidth(const Matrix& samples, const KernelSpec& spec);

/// n×n Gaussian RBF Gram matrix, K_ij = exp(-|x_i-x_j|^2 / (2 sigma^2)).
/// Symmetric with unit diagonal. Requires at least 2 rows.
Matrix gram_matrix(const Matrix& samples, const KernelSpec& spec);

/// Biased V-statistic HSIC = (1/n^2) trace(K H L H) with H = I - (1/n) 1 1^T,
/// computed through double-centered Grams so the value is exactly symmetric
/// in (a, b).
double hsic_value(const Matrix& a, const Matrix& b, const KernelSpec& spec);

struct HsicGrad {
  double value = 0.0;
  Matrix da;
  Matrix db;
};

/// hsic_value plus gradients with respect to both sample blocks (bandwidths
/// treated as constants).
HsicGrad hsic_with_grad(const Matrix& a, const Matrix& b, const KernelSpec& spec);

}  // namespace ddml::hsic

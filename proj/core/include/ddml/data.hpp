#pragma once

#include <optional>

#include "ddml/matrix.hpp"

namespace ddml {

enum class TreatmentKind { kBinary, kContinuous };

/// Generator-side state kept for verification: the scalar latent factors, the
/// outcome noise, and (for continuous treatments) the pre-standardization
/// treatment. theta_eff is the effect of the published treatment column on Y;
/// it differs from theta_true only when the treatment was standardized.
struct GroundTruth {
  double theta_true = 0.0;
  double theta_eff = 0.0;
  Vector z_c, z_t, z_y;
  Vector noise_y;
  Vector t_raw;
};

/// The unit of all estimation: covariates X (N×d), treatment T, outcome Y.
struct Dataset {
  Matrix x;
  Vector t;
  Vector y;
  TreatmentKind kind = TreatmentKind::kBinary;
  std::optional<GroundTruth> truth;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }

  void validate() const {
    if (t.size() != x.rows() || y.size() != x.rows()) {
      throw ShapeError("Dataset: t/y length must equal covariate rows");
    }
    if (kind == TreatmentKind::kBinary) {
      for (Eigen::Index i = 0; i < t.size(); ++i) {
        if (t[i] != 0.0 && t[i] != 1.0) {
          throw InputError("Dataset: binary treatment has value outside {0,1} at row " +
                           std::to_string(i));
        }
      }
    }
  }
};

}  // namespace ddml

#include "ddml/synthgen.hpp"

#include <cmath>

#include "ddml/net.hpp"

namespace ddml::synth {

void DgpConfig::validate() const {
  if (n < 1) throw InputError("DgpConfig: n must be >= 1");
  if (d < 10) throw InputError("DgpConfig: d must be >= 10 (factor formulas use columns 0-9)");
  if (sigma_t < 0.0 || sigma_y < 0.0) throw InputError("DgpConfig: noise scales must be >= 0");
}

CovariateDraw generate_covariates(const DgpConfig& cfg, SeededRng& rng) {
  cfg.validate();
  const int n = cfg.n;
  const int d = cfg.d;

  Matrix z(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) z(i, j) = rng.normal();
  }
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = cfg.lambda_mix * rng.normal();
  }

  const double inv_d = 1.0 / static_cast<double>(d);
  Matrix x_lin = z + inv_d * (z * m);
  Matrix x = x_lin.array().tanh() + 0.2 * (inv_d * (x_lin * m.transpose())).array().sin();

  CovariateDraw out;
  out.x = std::move(x);
  const auto& xc = out.x;
  out.z_c = (0.6 * xc.col(0).array() * xc.col(1).array() + 0.4 * xc.col(2).array().square() +
             0.3 * (xc.col(3).array() + xc.col(4).array()).sin())
                .matrix();
  out.z_t = (0.5 * xc.col(5).array() * xc.col(6).array() + 0.3 * xc.col(7).array().tanh() +
             0.2 * (xc.col(8).array() + xc.col(9).array()).cos())
                .matrix();
  out.z_y = (0.5 * xc.col(1).array() * xc.col(2).array() +
             0.3 * (xc.col(0).array() + xc.col(3).array()).cos())
                .matrix();
  return out;
}

Dataset generate_binary(const DgpConfig& cfg, SeededRng& rng) {
  if (cfg.treatment != TreatmentKind::kBinary) {
    throw InputError("generate_binary: config treatment kind is not binary");
  }
  CovariateDraw cov = generate_covariates(cfg, rng);
  const int n = cfg.n;

  Vector t(n);
  for (int i = 0; i < n; ++i) {
    const double p = num::sigmoid(cfg.alpha_c * cov.z_c[i] + cfg.alpha_t * cov.z_t[i]);
    t[i] = (rng.uniform() < p) ? 1.0 : 0.0;
  }
  Vector eps(n);
  for (int i = 0; i < n; ++i) eps[i] = cfg.sigma_y * rng.normal();

  Dataset data;
  data.x = std::move(cov.x);
  data.t = t;
  data.y = cfg.alpha_out * (cov.z_c + cov.z_y) + cfg.theta_true * t + eps;
  data.kind = TreatmentKind::kBinary;

  GroundTruth truth;
  truth.theta_true = cfg.theta_true;
  truth.theta_eff = cfg.theta_true;
  truth.z_c = std::move(cov.z_c);
  truth.z_t = std::move(cov.z_t);
  truth.z_y = std::move(cov.z_y);
  truth.noise_y = std::move(eps);
  truth.t_raw = std::move(t);
  data.truth = std::move(truth);
  return data;
}

Dataset generate_continuous(const DgpConfig& cfg, SeededRng& rng) {
  if (cfg.treatment != TreatmentKind::kContinuous) {
    throw InputError("generate_continuous: config treatment kind is not continuous");
  }
  CovariateDraw cov = generate_covariates(cfg, rng);
  const int n = cfg.n;

  Vector t_raw(n);
  for (int i = 0; i < n; ++i) {
    const double zc = cov.z_c[i];
    const double zt = cov.z_t[i];
    t_raw[i] = cfg.alpha_c * (zc + 0.5 * std::tanh(zc)) +
               cfg.alpha_t * (zt + 0.3 * std::sin(zt)) + cfg.sigma_t * rng.normal();
  }
  Vector eps(n);
  for (int i = 0; i < n; ++i) eps[i] = cfg.sigma_y * rng.normal();

  // Outcomes use the pre-standardization treatment.
  Vector y = cfg.alpha_out * (cov.z_c + cov.z_y) + cfg.theta_true * t_raw + eps;

  Dataset data;
  data.x = std::move(cov.x);
  data.y = std::move(y);
  data.kind = TreatmentKind::kContinuous;

  GroundTruth truth;
  truth.theta_true = cfg.theta_true;
  truth.z_c = std::move(cov.z_c);
  truth.z_t = std::move(cov.z_t);
  truth.z_y = std::move(cov.z_y);
  truth.noise_y = std::move(eps);
  truth.t_raw = t_raw;

  if (cfg.standardize_t) {
    const double mean = t_raw.mean();
    const double sd = std::sqrt((t_raw.array() - mean).square().mean());
    if (!(sd > 0.0)) throw NumericError("generate_continuous: treatment has zero variance");
    data.t = (t_raw.array() - mean) / sd;
    truth.theta_eff = cfg.theta_true * sd;
  } else {
    data.t = t_raw;
    truth.theta_eff = cfg.theta_true;
  }
  data.truth = std::move(truth);
  return data;
}

Dataset generate(const DgpConfig& cfg) {
  SeededRng rng(cfg.seed);
  return (cfg.treatment == TreatmentKind::kBinary) ? generate_binary(cfg, rng)
                                                   : generate_continuous(cfg, rng);
}

}  // namespace ddml::synth

#include "ddml/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ddml::train {

using num::FeedForwardNet;
using num::ForwardCache;
using num::NetGrads;

void LossWeights::validate() const {
  if (lambda_dis < 0.0 || lambda_ort < 0.0) {
    throw InputError("LossWeights: lambda_dis and lambda_ort must be >= 0");
  }
  if (!(delta > 0.0)) throw InputError("LossWeights: delta must be > 0");
  if (!(eps_corr > 0.0)) throw InputError("LossWeights: eps_corr must be > 0");
}

RepresentationTriple encode(const EncoderModel& model, const Matrix& x) {
  RepresentationTriple z;
  z.z_c = model.net_c.forward(x);
  z.z_t = model.net_t.forward(x);
  z.z_y = model.net_y.forward(x);
  return z;
}

namespace {

void require_equal_len(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) throw ShapeError(std::string(what) + ": length mismatch");
}

Vector head_predictions(const FeedForwardNet& head, const Matrix& in) {
  return head.forward(in).col(0);
}

}  // namespace

double supervised_loss(const HeadModel& heads, const RepresentationTriple& z,
                       const Vector& t, const Vector& y) {
  if (z.z_c.rows() != z.z_t.rows() || z.z_c.rows() != z.z_y.rows()) {
    throw ShapeError("supervised_loss: latent blocks have different row counts");
  }
  if (t.size() != z.z_c.rows() || y.size() != z.z_c.rows()) {
    throw ShapeError("supervised_loss: target length differs from latent rows");
  }
  const Vector t_out = head_predictions(heads.t_head, hcat(z.z_c, z.z_t));
  const Vector y_out = head_predictions(heads.y_head, hcat(z.z_c, z.z_y));
  const double lt = (heads.kind == TreatmentKind::kBinary) ? num::bce_logits_loss(t_out, t)
                                                           : num::mse_loss(t_out, t);
  return lt + num::mse_loss(y_out, y);
}

RdoGrad rdo_loss_with_grad(const Vector& t, const Vector& y, const Vector& t_pred,
                           const Vector& y_pred, const LossWeights& w) {
  w.validate();
  require_equal_len(t, t_pred, "rdo_loss");
  require_equal_len(y, y_pred, "rdo_loss");
  require_equal_len(t, y, "rdo_loss");
  const Eigen::Index n = t.size();
  if (n < 2) throw InputError("rdo_loss: need at least 2 samples");

  const Vector v = t - t_pred;
  const Vector e = y - y_pred;
  const double a_dot = v.dot(e);
  const double b_dot = v.dot(v) + w.delta;
  const double theta = a_dot / b_dot;
  const Vector u = e - theta * v;

  const Vector vc = v.array() - v.mean();
  const Vector uc = u.array() - u.mean();
  const double s_vu = vc.dot(uc);
  const double s_vv = vc.dot(vc);
  const double s_uu = uc.dot(uc);
  const double rv = std::sqrt(s_vv);
  const double ru = std::sqrt(s_uu);
  const double denom = rv * ru + w.eps_corr;
  const double corr = s_vu / denom;
  const double sign = (corr > 0.0) ? 1.0 : (corr < 0.0 ? -1.0 : 0.0);

  RdoGrad out;
  out.theta_tra = theta;
  out.loss = std::abs(corr);

  // d|corr|/dv (direct) and d|corr|/du; centered components because the means
  // cancel in the sums.
  const double inv_d2 = 1.0 / (denom * denom);
  Vector g_v = Vector::Zero(n);
  Vector g_u = Vector::Zero(n);
  if (sign != 0.0) {
    Vector d_svv_term = (s_vv > 0.0) ? Vector((ru / rv) * vc) : Vector(Vector::Zero(n));
    Vector d_suu_term = (s_uu > 0.0) ? Vector((rv / ru) * uc) : Vector(Vector::Zero(n));
    g_v = sign * inv_d2 * (uc * denom - s_vu * d_svv_term);
    g_u = sign * inv_d2 * (vc * denom - s_vu * d_suu_term);
  }

  // u = e - theta v
  Vector g_e = g_u;
  double g_theta = -g_u.dot(v);
  g_v += -theta * g_u;

  // theta = v'e / (v'v + delta)
  if (!w.detach_theta_tra) {
    g_v += g_theta * (e * b_dot - 2.0 * a_dot * v) / (b_dot * b_dot);
    g_e += g_theta * v / b_dot;
  }

  out.d_t_pred = -g_v;
  out.d_y_pred = -g_e;
  return out;
}

RdoResult rdo_loss(const Vector& t, const Vector& y, const Vector& t_pred,
                   const Vector& y_pred, const LossWeights& w) {
  const RdoGrad g = rdo_loss_with_grad(t, y, t_pred, y_pred, w);
  return {g.theta_tra, g.loss};
}

StepGrads total_loss_with_grads(const EncoderModel& encoder, const HeadModel& heads,
                                const TrainSet& batch, const LossWeights& w,
                                const AblationFlags& flags, const hsic::KernelSpec& kernel,
                                const std::vector<int>* hsic_rows) {
  w.validate();
  if (batch.x.rows() == 0) throw InputError("total_loss: empty batch");
  require_equal_len(batch.t, batch.y, "total_loss targets");
  if (batch.t.size() != batch.x.rows()) {
    throw ShapeError("total_loss: target length differs from batch rows");
  }
  const Eigen::Index n = batch.x.rows();

  StepGrads out;

  // Forward passes.
  ForwardCache cache_c, cache_t, cache_y;
  Matrix t_in, y_in;
  if (flags.use_encoder) {
    cache_c = num::net_forward_cached(encoder.net_c, batch.x);
    cache_t = num::net_forward_cached(encoder.net_t, batch.x);
    cache_y = num::net_forward_cached(encoder.net_y, batch.x);
    t_in = hcat(cache_c.output(), cache_t.output());
    y_in = hcat(cache_c.output(), cache_y.output());
  } else {
    t_in = batch.x;
    y_in = batch.x;
  }
  ForwardCache cache_th = num::net_forward_cached(heads.t_head, t_in);
  ForwardCache cache_yh = num::net_forward_cached(heads.y_head, y_in);
  const Vector t_out = cache_th.output().col(0);
  const Vector y_out = cache_yh.output().col(0);

  // Supervised term.
  Vector d_tout, d_yout;
  if (heads.kind == TreatmentKind::kBinary) {
    out.terms.sup = num::bce_logits_loss(t_out, batch.t) + num::mse_loss(y_out, batch.y);
    d_tout = num::bce_logits_loss_grad(t_out, batch.t);
  } else {
    out.terms.sup = num::mse_loss(t_out, batch.t) + num::mse_loss(y_out, batch.y);
    d_tout = num::mse_loss_grad(t_out, batch.t);
  }
  d_yout = num::mse_loss_grad(y_out, batch.y);

  // Orthogonalization term on this batch's residuals.
  if (flags.use_ort) {
    const Vector t_pred =
        (heads.kind == TreatmentKind::kBinary) ? num::sigmoid(t_out) : t_out;
    const RdoGrad rdo = rdo_loss_with_grad(batch.t, batch.y, t_pred, y_out, w);
    out.terms.ort = rdo.loss;
    Vector d_tp = w.lambda_ort * rdo.d_t_pred;
    if (heads.kind == TreatmentKind::kBinary) {
      // chain through the sigmoid
      d_tp.array() *= t_pred.array() * (1.0 - t_pred.array());
    }
    d_tout += d_tp;
    d_yout += w.lambda_ort * rdo.d_y_pred;
  }

  // Head backprop; collect gradients flowing into the latent blocks.
  out.head_t = NetGrads::zeros_like(heads.t_head);
  out.head_y = NetGrads::zeros_like(heads.y_head);
  Matrix d_tout_m(n, 1), d_yout_m(n, 1);
  d_tout_m.col(0) = d_tout;
  d_yout_m.col(0) = d_yout;
  Matrix d_tin = num::net_backward(heads.t_head, cache_th, d_tout_m, out.head_t);
  Matrix d_yin = num::net_backward(heads.y_head, cache_yh, d_yout_m, out.head_y);

  if (!flags.use_encoder) {
    out.terms.total = out.terms.sup + w.lambda_ort * out.terms.ort;
    return out;
  }

  const Eigen::Index dc = encoder.dim_c();
  const Eigen::Index dt = encoder.dim_t();
  const Eigen::Index dy = encoder.dim_y();
  Matrix d_zc = d_tin.leftCols(dc) + d_yin.leftCols(dc);
  Matrix d_zt = d_tin.rightCols(dt);
  Matrix d_zy = d_yin.rightCols(dy);

  // Disentanglement term: pairwise HSIC among the three latent blocks,
  // optionally on a row subset.
  if (flags.use_dis) {
    const Matrix& zc = cache_c.output();
    const Matrix& zt = cache_t.output();
    const Matrix& zy = cache_y.output();
    auto run_pair = [&](const Matrix& a, const Matrix& b, Matrix& ga, Matrix& gb) {
      const auto res = hsic::hsic_with_grad(a, b, kernel);
      ga += w.lambda_dis * res.da;
      gb += w.lambda_dis * res.db;
      return res.value;
    };
    if (hsic_rows == nullptr) {
      out.terms.dis = 0.0;
      out.terms.dis += run_pair(zc, zt, d_zc, d_zt);
      out.terms.dis += run_pair(zc, zy, d_zc, d_zy);
      out.terms.dis += run_pair(zt, zy, d_zt, d_zy);
    } else {
      const auto& rows = *hsic_rows;
      const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
      Matrix sc(m, dc), st(m, dt), sy(m, dy);
      for (Eigen::Index i = 0; i < m; ++i) {
        sc.row(i) = zc.row(rows[i]);
        st.row(i) = zt.row(rows[i]);
        sy.row(i) = zy.row(rows[i]);
      }
      Matrix gc = Matrix::Zero(m, dc), gt = Matrix::Zero(m, dt), gy = Matrix::Zero(m, dy);
      out.terms.dis = 0.0;
      out.terms.dis += run_pair(sc, st, gc, gt);
      out.terms.dis += run_pair(sc, sy, gc, gy);
      out.terms.dis += run_pair(st, sy, gt, gy);
      for (Eigen::Index i = 0; i < m; ++i) {
        d_zc.row(rows[i]) += gc.row(i);
        d_zt.row(rows[i]) += gt.row(i);
        d_zy.row(rows[i]) += gy.row(i);
      }
    }
  }

  out.enc_c = NetGrads::zeros_like(encoder.net_c);
  out.enc_t = NetGrads::zeros_like(encoder.net_t);
  out.enc_y = NetGrads::zeros_like(encoder.net_y);
  num::net_backward(encoder.net_c, cache_c, d_zc, out.enc_c);
  num::net_backward(encoder.net_t, cache_t, d_zt, out.enc_t);
  num::net_backward(encoder.net_y, cache_y, d_zy, out.enc_y);

  out.terms.total =
      out.terms.sup + w.lambda_dis * out.terms.dis + w.lambda_ort * out.terms.ort;
  return out;
}

LossTerms total_loss_terms(const EncoderModel& encoder, const HeadModel& heads,
                           const TrainSet& batch, const LossWeights& w,
                           const AblationFlags& flags, const hsic::KernelSpec& kernel) {
  w.validate();
  if (batch.x.rows() == 0) throw InputError("total_loss: empty batch");
  LossTerms terms;
  Matrix t_in, y_in;
  RepresentationTriple z;
  if (flags.use_encoder) {
    z = encode(encoder, batch.x);
    t_in = hcat(z.z_c, z.z_t);
    y_in = hcat(z.z_c, z.z_y);
  } else {
    t_in = batch.x;
    y_in = batch.x;
  }
  const Vector t_out = head_predictions(heads.t_head, t_in);
  const Vector y_out = head_predictions(heads.y_head, y_in);
  if (heads.kind == TreatmentKind::kBinary) {
    terms.sup = num::bce_logits_loss(t_out, batch.t) + num::mse_loss(y_out, batch.y);
  } else {
    terms.sup = num::mse_loss(t_out, batch.t) + num::mse_loss(y_out, batch.y);
  }
  if (flags.use_dis && flags.use_encoder) {
    terms.dis = hsic::hsic_value(z.z_c, z.z_t, kernel) +
                hsic::hsic_value(z.z_c, z.z_y, kernel) +
                hsic::hsic_value(z.z_t, z.z_y, kernel);
  }
  if (flags.use_ort) {
    const Vector t_pred =
        (heads.kind == TreatmentKind::kBinary) ? num::sigmoid(t_out) : t_out;
    terms.ort = rdo_loss(batch.t, batch.y, t_pred, y_out, w).loss;
  }
  terms.total = terms.sup + w.lambda_dis * terms.dis + w.lambda_ort * terms.ort;
  return terms;
}

double total_loss(const EncoderModel& encoder, const HeadModel& heads, const TrainSet& batch,
                  const LossWeights& w, const AblationFlags& flags,
                  const hsic::KernelSpec& kernel) {
  return total_loss_terms(encoder, heads, batch, w, flags, kernel).total;
}

namespace {

std::vector<int> make_widths(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> widths;
  widths.push_back(in);
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(out);
  return widths;
}

void check_finite_terms(const LossTerms& terms, int epoch) {
  if (!std::isfinite(terms.sup)) {
    throw NumericError("fit: L_sup is non-finite at epoch " + std::to_string(epoch));
  }
  if (!std::isfinite(terms.dis)) {
    throw NumericError("fit: L_dis is non-finite at epoch " + std::to_string(epoch));
  }
  if (!std::isfinite(terms.ort)) {
    throw NumericError("fit: L_ort is non-finite at epoch " + std::to_string(epoch));
  }
}

}  // namespace

FitResult fit(const TrainSet& trainset, const num::TrainConfig& cfg, const LossWeights& w,
              const AblationFlags& flags, SeededRng& rng, const TrainerArch& arch,
              const hsic::KernelSpec& kernel) {
  cfg.validate();
  w.validate();
  const Eigen::Index n = trainset.x.rows();
  const int d = static_cast<int>(trainset.x.cols());
  if (n < 2) throw InputError("fit: need at least 2 samples");
  if (trainset.t.size() != n || trainset.y.size() != n) {
    throw ShapeError("fit: target length differs from covariate rows");
  }
  if (trainset.kind == TreatmentKind::kBinary) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (trainset.t[i] != 0.0 && trainset.t[i] != 1.0) {
        throw InputError("fit: binary treatment has value outside {0,1}");
      }
    }
  }

  const int lat = std::min(arch.latent_dim, d);
  FitResult result;
  result.heads.kind = trainset.kind;
  if (flags.use_encoder) {
    result.encoder.net_c = FeedForwardNet::make(make_widths(d, arch.encoder_hidden, lat), rng);
    result.encoder.net_t = FeedForwardNet::make(make_widths(d, arch.encoder_hidden, lat), rng);
    result.encoder.net_y = FeedForwardNet::make(make_widths(d, arch.encoder_hidden, lat), rng);
    result.heads.t_head = FeedForwardNet::make(make_widths(2 * lat, arch.head_hidden, 1), rng);
    result.heads.y_head = FeedForwardNet::make(make_widths(2 * lat, arch.head_hidden, 1), rng);
  } else {
    result.heads.t_head = FeedForwardNet::make(make_widths(d, arch.head_hidden, 1), rng);
    result.heads.y_head = FeedForwardNet::make(make_widths(d, arch.head_hidden, 1), rng);
  }

  num::AdamState st_c, st_t, st_y;
  if (flags.use_encoder) {
    st_c = num::AdamState::zeros_like(result.encoder.net_c);
    st_t = num::AdamState::zeros_like(result.encoder.net_t);
    st_y = num::AdamState::zeros_like(result.encoder.net_y);
  }
  num::AdamState st_th = num::AdamState::zeros_like(result.heads.t_head);
  num::AdamState st_yh = num::AdamState::zeros_like(result.heads.y_head);

  const int batch_size =
      (cfg.batch_size == 0 || cfg.batch_size >= n) ? static_cast<int>(n) : cfg.batch_size;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  int step = 0;
  result.trace.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch_size < n) rng.shuffle(order);
    EpochTrace trace;
    int steps_in_epoch = 0;
    for (Eigen::Index start = 0; start < n; start += batch_size) {
      const Eigen::Index m = std::min<Eigen::Index>(batch_size, n - start);
      TrainSet batch;
      batch.kind = trainset.kind;
      if (m == n) {
        batch.x = trainset.x;
        batch.t = trainset.t;
        batch.y = trainset.y;
      } else {
        batch.x.resize(m, d);
        batch.t.resize(m);
        batch.y.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) {
          batch.x.row(i) = trainset.x.row(order[start + i]);
          batch.t[i] = trainset.t[order[start + i]];
          batch.y[i] = trainset.y[order[start + i]];
        }
      }

      // Seeded HSIC subsample for large batches.
      std::vector<int> sub;
      const std::vector<int>* sub_ptr = nullptr;
      if (flags.use_encoder && flags.use_dis && m > arch.hsic_subsample) {
        std::vector<int> rows(static_cast<std::size_t>(m));
        std::iota(rows.begin(), rows.end(), 0);
        for (int i = 0; i < arch.hsic_subsample; ++i) {
          const auto j = i + rng.uniform_index(static_cast<std::uint64_t>(m - i));
          std::swap(rows[static_cast<std::size_t>(i)], rows[j]);
        }
        sub.assign(rows.begin(), rows.begin() + arch.hsic_subsample);
        sub_ptr = &sub;
      }

      StepGrads g = total_loss_with_grads(result.encoder, result.heads, batch, w, flags,
                                          kernel, sub_ptr);
      check_finite_terms(g.terms, epoch);

      if (cfg.grad_clip) {
        double sq = g.head_t.squared_norm() + g.head_y.squared_norm();
        if (flags.use_encoder) {
          sq += g.enc_c.squared_norm() + g.enc_t.squared_norm() + g.enc_y.squared_norm();
        }
        const double norm = std::sqrt(sq);
        if (norm > *cfg.grad_clip) {
          const double s = *cfg.grad_clip / norm;
          g.head_t.scale(s);
          g.head_y.scale(s);
          if (flags.use_encoder) {
            g.enc_c.scale(s);
            g.enc_t.scale(s);
            g.enc_y.scale(s);
          }
        }
      }

      ++step;
      if (flags.use_encoder) {
        num::adam_step(result.encoder.net_c, g.enc_c, st_c, cfg, step);
        num::adam_step(result.encoder.net_t, g.enc_t, st_t, cfg, step);
        num::adam_step(result.encoder.net_y, g.enc_y, st_y, cfg, step);
      }
      num::adam_step(result.heads.t_head, g.head_t, st_th, cfg, step);
      num::adam_step(result.heads.y_head, g.head_y, st_yh, cfg, step);

      trace.sup += g.terms.sup;
      trace.dis += g.terms.dis;
      trace.ort += g.terms.ort;
      trace.total += g.terms.total;
      ++steps_in_epoch;
    }
    const double inv = 1.0 / static_cast<double>(steps_in_epoch);
    trace.sup *= inv;
    trace.dis *= inv;
    trace.ort *= inv;
    trace.total *= inv;
    result.trace.push_back(trace);
  }
  return result;
}

}  // namespace ddml::train

#include "ddml/net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ddml::num {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InputError("TrainConfig: learning rate must be > 0");
  if (epochs < 0) throw InputError("TrainConfig: epochs must be >= 0");
  if (weight_decay < 0.0) throw InputError("TrainConfig: weight decay must be >= 0");
  if (batch_size < 0) throw InputError("TrainConfig: batch size must be >= 0");
  if (grad_clip && !(*grad_clip > 0.0)) throw InputError("TrainConfig: gradient clip must be > 0");
}

FeedForwardNet FeedForwardNet::make(const std::vector<int>& widths, SeededRng& rng) {
  if (widths.size() < 2) throw InputError("FeedForwardNet: need at least input and output widths");
  for (int w : widths) {
    if (w < 1) throw InputError("FeedForwardNet: layer widths must be positive");
  }
  FeedForwardNet net;
  net.layers.reserve(widths.size() - 1);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    Layer layer;
    const int fan_in = widths[i];
    const int fan_out = widths[i + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    layer.w.resize(fan_in, fan_out);
    for (int r = 0; r < fan_in; ++r) {
      for (int c = 0; c < fan_out; ++c) {
        layer.w(r, c) = (2.0 * rng.uniform() - 1.0) * bound;
      }
    }
    layer.b = Vector::Zero(fan_out);
    layer.act = (i + 2 < widths.size()) ? Activation::kRelu : Activation::kIdentity;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

int FeedForwardNet::input_width() const {
  if (layers.empty()) throw StateError("FeedForwardNet: empty net");
  return static_cast<int>(layers.front().w.rows());
}

int FeedForwardNet::output_width() const {
  if (layers.empty()) throw StateError("FeedForwardNet: empty net");
  return static_cast<int>(layers.back().w.cols());
}

std::size_t FeedForwardNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) {
    n += static_cast<std::size_t>((l.w.rows() + 1) * l.w.cols());
  }
  return n;
}

Matrix FeedForwardNet::forward(const Matrix& x) const {
  if (layers.empty()) throw StateError("FeedForwardNet: empty net");
  require_cols(x, layers.front().w.rows(), "net forward input");
  Matrix a = x;
  for (const auto& l : layers) {
    Matrix z = a * l.w;
    z.rowwise() += l.b.transpose();
    if (l.act == Activation::kRelu) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

ForwardCache net_forward_cached(const FeedForwardNet& net, const Matrix& x) {
  if (net.layers.empty()) throw StateError("FeedForwardNet: empty net");
  require_cols(x, net.layers.front().w.rows(), "net forward input");
  ForwardCache cache;
  cache.acts.reserve(net.layers.size() + 1);
  cache.pre.reserve(net.layers.size());
  cache.acts.push_back(x);
  for (const auto& l : net.layers) {
    Matrix z = cache.acts.back() * l.w;
    z.rowwise() += l.b.transpose();
    cache.pre.push_back(z);
    if (l.act == Activation::kRelu) z = z.cwiseMax(0.0);
    cache.acts.push_back(std::move(z));
  }
  return cache;
}

NetGrads NetGrads::zeros_like(const FeedForwardNet& net) {
  NetGrads g;
  g.dw.reserve(net.layers.size());
  g.db.reserve(net.layers.size());
  for (const auto& l : net.layers) {
    g.dw.push_back(Matrix::Zero(l.w.rows(), l.w.cols()));
    g.db.push_back(Vector::Zero(l.b.size()));
  }
  return g;
}

double NetGrads::squared_norm() const {
  double s = 0.0;
  for (const auto& m : dw) s += m.squaredNorm();
  for (const auto& v : db) s += v.squaredNorm();
  return s;
}

void NetGrads::scale(double s) {
  for (auto& m : dw) m *= s;
  for (auto& v : db) v *= s;
}

Matrix net_backward(const FeedForwardNet& net, const ForwardCache& cache,
                    const Matrix& loss_grad_at_output, NetGrads& grads) {
  if (!cache.valid()) throw StateError("net_backward: no cached forward pass");
  const std::size_t nl = net.layers.size();
  if (cache.acts.size() != nl + 1 || cache.pre.size() != nl) {
    throw StateError("net_backward: cache does not match net");
  }
  if (loss_grad_at_output.rows() != cache.acts.back().rows() ||
      loss_grad_at_output.cols() != cache.acts.back().cols()) {
    throw ShapeError("net_backward: output gradient shape mismatch");
  }
  if (grads.dw.size() != nl) grads = NetGrads::zeros_like(net);

  Matrix delta = loss_grad_at_output;
  for (std::size_t i = nl; i-- > 0;) {
    const auto& l = net.layers[i];
    if (l.act == Activation::kRelu) {
      delta = delta.cwiseProduct((cache.pre[i].array() > 0.0).cast<double>().matrix());
    }
    grads.dw[i].noalias() += cache.acts[i].transpose() * delta;
    grads.db[i] += delta.colwise().sum().transpose();
    delta = delta * l.w.transpose();
  }
  return delta;
}

AdamState AdamState::zeros_like(const FeedForwardNet& net) {
  AdamState s;
  for (const auto& l : net.layers) {
    s.mw.push_back(Matrix::Zero(l.w.rows(), l.w.cols()));
    s.vw.push_back(Matrix::Zero(l.w.rows(), l.w.cols()));
    s.mb.push_back(Vector::Zero(l.b.size()));
    s.vb.push_back(Vector::Zero(l.b.size()));
  }
  return s;
}

void adam_step(FeedForwardNet& net, const NetGrads& grads, AdamState& state,
               const TrainConfig& cfg, int step_index) {
  if (step_index < 1) throw InputError("adam_step: step index is 1-based");
  if (grads.dw.size() != net.layers.size() || state.mw.size() != net.layers.size()) {
    throw ShapeError("adam_step: gradient/state layer count mismatch");
  }
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  const double bc1 = 1.0 - std::pow(kBeta1, step_index);
  const double bc2 = 1.0 - std::pow(kBeta2, step_index);
  const double lr = cfg.learning_rate;

  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!all_finite(grads.dw[i]) || !all_finite(grads.db[i])) {
      throw NumericError("adam_step: non-finite gradient in layer " + std::to_string(i));
    }
    auto& l = net.layers[i];
    state.mw[i] = kBeta1 * state.mw[i] + (1.0 - kBeta1) * grads.dw[i];
    state.vw[i] = kBeta2 * state.vw[i].array() + (1.0 - kBeta2) * grads.dw[i].array().square();
    state.mb[i] = kBeta1 * state.mb[i] + (1.0 - kBeta1) * grads.db[i];
    state.vb[i] = kBeta2 * state.vb[i].array() + (1.0 - kBeta2) * grads.db[i].array().square();

    l.w.array() -= lr * (state.mw[i].array() / bc1) /
                   ((state.vw[i].array() / bc2).sqrt() + kEps);
    l.b.array() -= lr * (state.mb[i].array() / bc1) /
                   ((state.vb[i].array() / bc2).sqrt() + kEps);
    if (cfg.weight_decay > 0.0) {
      l.w *= (1.0 - lr * cfg.weight_decay);
      l.b *= (1.0 - lr * cfg.weight_decay);
    }
  }
}

double mse_loss(const Vector& pred, const Vector& target) {
  require_len(target, pred.size(), "mse_loss target");
  if (pred.size() == 0) return 0.0;
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

Vector mse_loss_grad(const Vector& pred, const Vector& target) {
  require_len(target, pred.size(), "mse_loss target");
  return 2.0 / static_cast<double>(pred.size()) * (pred - target);
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector sigmoid(const Vector& x) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = sigmoid(x[i]);
  return out;
}

namespace {
void check_binary_targets(const Vector& targets, const char* what) {
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    if (targets[i] != 0.0 && targets[i] != 1.0) {
      throw InputError(std::string(what) + ": target at index " + std::to_string(i) +
                       " is not in {0,1}");
    }
  }
}
}  // namespace

double bce_logits_loss(const Vector& logits, const Vector& targets) {
  require_len(targets, logits.size(), "bce_logits_loss target");
  check_binary_targets(targets, "bce_logits_loss");
  if (logits.size() == 0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double z = logits[i];
    // log(1 + e^z) - t*z, computed without overflow
    s += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - targets[i] * z;
  }
  return s / static_cast<double>(logits.size());
}

Vector bce_logits_loss_grad(const Vector& logits, const Vector& targets) {
  require_len(targets, logits.size(), "bce_logits_loss target");
  check_binary_targets(targets, "bce_logits_loss");
  Vector g(logits.size());
  const double inv_n = 1.0 / static_cast<double>(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    g[i] = (sigmoid(logits[i]) - targets[i]) * inv_n;
  }
  return g;
}

void fit_supervised(FeedForwardNet& net, const Matrix& x, const Vector& target,
                    SupervisedLoss loss, const TrainConfig& cfg, SeededRng& rng) {
  cfg.validate();
  if (x.rows() != target.size()) throw ShapeError("fit_supervised: rows/target mismatch");
  if (net.output_width() != 1) throw ShapeError("fit_supervised: net must have scalar output");
  if (loss == SupervisedLoss::kBceLogits) check_binary_targets(target, "fit_supervised");

  const int n = static_cast<int>(x.rows());
  const int batch = (cfg.batch_size == 0 || cfg.batch_size >= n) ? n : cfg.batch_size;
  AdamState state = AdamState::zeros_like(net);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  int step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < n) rng.shuffle(order);
    for (int start = 0; start < n; start += batch) {
      const int m = std::min(batch, n - start);
      Matrix xb(m, x.cols());
      Vector tb(m);
      if (m == n) {
        xb = x;
        tb = target;
      } else {
        for (int i = 0; i < m; ++i) {
          xb.row(i) = x.row(order[start + i]);
          tb[i] = target[order[start + i]];
        }
      }
      ForwardCache cache = net_forward_cached(net, xb);
      Vector pred = cache.output().col(0);
      Vector dpred = (loss == SupervisedLoss::kMse) ? mse_loss_grad(pred, tb)
                                                    : bce_logits_loss_grad(pred, tb);
      NetGrads grads = NetGrads::zeros_like(net);
      Matrix dout(m, 1);
      dout.col(0) = dpred;
      net_backward(net, cache, dout, grads);
      if (cfg.grad_clip) {
        const double norm = std::sqrt(grads.squared_norm());
        if (norm > *cfg.grad_clip) grads.scale(*cfg.grad_clip / norm);
      }
      adam_step(net, grads, state, cfg, ++step);
    }
  }
}

}  // namespace ddml::num

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ddml/matrix.hpp"
#include "ddml/rng.hpp"

namespace ddml::num {

enum class Activation { kIdentity, kRelu };

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 300;
  double weight_decay = 0.0;
  int batch_size = 0;  // 0 = full batch
  std::optional<double> grad_clip = 5.0;

  void validate() const;
};

/// Dense feed-forward network. Layer i maps acts[i] (n×in) to
/// act(acts[i]·w + b) with w of shape in×out.
class FeedForwardNet {
 public:
  struct Layer {
    Matrix w;
    Vector b;
    Activation act = Activation::kIdentity;
  };

  std::vector<Layer> layers;

  /// He-style uniform fan-in init (U(-sqrt(6/fan_in), +sqrt(6/fan_in)), zero
  /// biases); hidden layers ReLU, output layer linear.
  static FeedForwardNet make(const std::vector<int>& widths, SeededRng& rng);

  int input_width() const;
  int output_width() const;
  std::size_t parameter_count() const;

  Matrix forward(const Matrix& x) const;
};

/// Intermediates kept from a forward pass for backprop.
/// acts[0] is the input, acts[i+1] the post-activation output of layer i,
/// pre[i] the pre-activation of layer i.
struct ForwardCache {
  std::vector<Matrix> acts;
  std::vector<Matrix> pre;

  bool valid() const { return !acts.empty(); }
  const Matrix& output() const { return acts.back(); }
};

ForwardCache net_forward_cached(const FeedForwardNet& net, const Matrix& x);

struct NetGrads {
  std::vector<Matrix> dw;
  std::vector<Vector> db;

  static NetGrads zeros_like(const FeedForwardNet& net);
  double squared_norm() const;
  void scale(double s);
};

/// Backprop from dL/d(output); accumulates parameter gradients into `grads`
/// and returns dL/d(input). Throws StateError when no cached forward pass is
/// available or the cache does not match the net/output gradient.
Matrix net_backward(const FeedForwardNet& net, const ForwardCache& cache,
                    const Matrix& loss_grad_at_output, NetGrads& grads);

/// Adam moment buffers (decoupled weight decay applied at step time).
struct AdamState {
  std::vector<Matrix> mw, vw;
  std::vector<Vector> mb, vb;

  static AdamState zeros_like(const FeedForwardNet& net);
};

/// One adaptive-moment update with decoupled weight decay. step_index is
/// 1-based (used for bias correction). Throws NumericError naming the layer
/// when a gradient is non-finite.
void adam_step(FeedForwardNet& net, const NetGrads& grads, AdamState& state,
               const TrainConfig& cfg, int step_index);

// Scalar losses over batched predictions, with gradients w.r.t. predictions.
double mse_loss(const Vector& pred, const Vector& target);
Vector mse_loss_grad(const Vector& pred, const Vector& target);

/// Mean binary cross-entropy on raw logits (numerically stable form).
/// Targets must be exactly 0 or 1.
double bce_logits_loss(const Vector& logits, const Vector& targets);
Vector bce_logits_loss_grad(const Vector& logits, const Vector& targets);

double sigmoid(double x);
Vector sigmoid(const Vector& x);

enum class SupervisedLoss { kMse, kBceLogits };

/// Full training loop for a scalar-output net: Adam with global-norm gradient
/// clipping, full-batch or shuffled mini-batches per cfg.batch_size.
void fit_supervised(FeedForwardNet& net, const Matrix& x, const Vector& target,
                    SupervisedLoss loss, const TrainConfig& cfg, SeededRng& rng);

}  // namespace ddml::num

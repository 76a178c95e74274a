#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "airsig/rng.hpp"

namespace airsig::nn {

// Dense row-major tensor of 64-bit floats. All layers below run in double
// precision so finite-difference checks are meaningful.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s);

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape[i]; }
  bool empty() const { return data.empty(); }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape); }
};

struct TrainConfig {
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 200;
  std::uint64_t seed = 0;
};

// --- Convolution (valid padding, stride 1) ----------------------------------
// x: [N, Ci, H, W], kernels: [Co, Ci, kH, kW], bias: [Co] or empty.
// Output: [N, Co, H-kH+1, W-kW+1]. Throws std::invalid_argument when the
// kernel exceeds the input.
Tensor conv2d(const Tensor& x, const Tensor& kernels, const Tensor& bias);

struct Conv2dGrads {
  Tensor dx, dkernels, dbias;
};
Conv2dGrads conv2d_backward(const Tensor& x, const Tensor& kernels,
                            const Tensor& dy);

// --- Pointwise activation -----------------------------------------------------
Tensor leaky_relu(const Tensor& x, double slope = 0.01);
Tensor leaky_relu_backward(const Tensor& x, const Tensor& dy,
                           double slope = 0.01);

// --- Layer normalization over the whole per-sample feature map ---------------
// x: [N, ...]; each sample (everything past the batch axis) is normalized
// to zero mean / unit variance. No learnable affine.
struct LayerNormResult {
  Tensor y;
  std::vector<double> inv_std;  // per sample
};
LayerNormResult layer_norm(const Tensor& x, double eps = 1e-5);
Tensor layer_norm_backward(const LayerNormResult& fwd, const Tensor& dy);

// --- Max pooling, window 2 along the last axis --------------------------------
// Odd trailing element dropped; ties route the gradient to the first element.
struct MaxPoolResult {
  Tensor y;
  std::vector<std::uint32_t> argmax;  // 0 or 1 within each window
};
MaxPoolResult max_pool2(const Tensor& x);
Tensor max_pool2_backward(const MaxPoolResult& fwd,
                          const std::vector<std::size_t>& x_shape,
                          const Tensor& dy);

// --- Fully connected -----------------------------------------------------------
// x: [N, n], weights: [m, n], bias: [m] -> [N, m].
Tensor linear(const Tensor& x, const Tensor& weights, const Tensor& bias);

struct LinearGrads {
  Tensor dx, dweights, dbias;
};
LinearGrads linear_backward(const Tensor& x, const Tensor& weights,
                            const Tensor& dy);

// --- Dropout (inverted scaling) -----------------------------------------------
struct DropoutResult {
  Tensor y;
  std::vector<std::uint8_t> keep;
};
DropoutResult dropout(const Tensor& x, double p, bool training, Rng& rng);
Tensor dropout_backward(const DropoutResult& fwd, double p, const Tensor& dy);

// --- Softmax + cross entropy ----------------------------------------------------
// logits: [N, C]; loss is the batch mean; dlogits = (softmax - onehot)/N.
struct SoftmaxXentResult {
  double loss = 0.0;
  Tensor probs;
  Tensor dlogits;
};
SoftmaxXentResult softmax_cross_entropy(const Tensor& logits,
                                        const std::vector<int>& labels);

// --- Adam ------------------------------------------------------------------------
struct AdamState {
  Tensor m, v;
};

// Standard bias-corrected update; step_index starts at 1.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state,
               const TrainConfig& cfg, std::int64_t step_index);

// --- Checkpoint I/O -----------------------------------------------------------------
// Versioned binary layout: magic, version, variant tag, t, num_classes,
// tensor count, then per tensor (name, rank, extents, raw little-endian
// doubles).
struct NamedTensor {
  std::string name;
  const Tensor* tensor;
};

void save_checkpoint(const std::string& path, std::uint32_t variant_tag,
                     std::uint32_t t, std::uint32_t num_classes,
                     const std::vector<NamedTensor>& tensors);

struct LoadedCheckpoint {
  std::uint32_t variant_tag = 0;
  std::uint32_t t = 0;
  std::uint32_t num_classes = 0;
  std::vector<std::pair<std::string, Tensor>> tensors;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace airsig::nn

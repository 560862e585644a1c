#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "intentforge/nn/batchnorm.hpp"
#include "intentforge/nn/layers.hpp"
#include "intentforge/nn/loss.hpp"
#include "intentforge/nn/lstm.hpp"
#include "intentforge/rng.hpp"

namespace intentforge::nn {

inline constexpr std::size_t kLstm1Units = 64;
inline constexpr std::size_t kLstm2Units = 32;
inline constexpr std::size_t kDenseUnits = 16;

/// LSTM(64) → BN → Dropout → LSTM(32) → BN → Dropout → Dense(16, ReLU) → BN →
/// Dense(1, sigmoid). Also used as the gradient container for itself; the
/// running statistics and dropout_rate are ignored in that role.
struct ModelParams {
  LstmParams lstm1;
  BatchNormParams bn1;
  LstmParams lstm2;
  BatchNormParams bn2;
  DenseParams dense1;
  BatchNormParams bn3;
  DenseParams dense2;
  double dropout_rate = 0.2;

  std::size_t state_size() const noexcept { return lstm1.input_dim; }

  /// Every weight and bias zero, gamma one.
  static ModelParams zeros(std::size_t state_size);
};

using ModelGrads = ModelParams;

/// Glorot-uniform weights, zero biases except the LSTM forget gates (1.0),
/// identity batch norms. Deterministic in seed.
ModelParams init_params(std::size_t state_size, std::uint64_t seed);

/// Zero-valued gradient container matching params.
ModelGrads zeros_like(const ModelParams& params);

struct TensorView {
  std::string name;
  std::vector<std::size_t> shape;
  std::span<double> data;
};

struct ConstTensorView {
  std::string name;
  std::vector<std::size_t> shape;
  std::span<const double> data;
};

/// Learnable tensors in a fixed order. With include_state the batch-norm
/// running statistics follow each batch norm's gamma/beta.
std::vector<TensorView> tensors(ModelParams& params, bool include_state = false);
std::vector<ConstTensorView> tensors(const ModelParams& params, bool include_state = false);

struct ModelCache {
  std::size_t batch = 0;
  LstmCache lstm1;
  BatchNormCache bn1;
  Matrix drop1_mask;
  LstmCache lstm2;
  BatchNormCache bn2;
  Matrix drop2_mask;
  Matrix dense1_in;
  Matrix dense1_out;  // pre-ReLU
  BatchNormCache bn3;
  Matrix dense2_in;
};

struct ForwardResult {
  std::vector<double> probs;
  std::optional<ModelCache> cache;
};

/// `steps` holds one batch × state_size matrix per timestep. The final hidden
/// state of each LSTM feeds the next block. Dropout draws from `rng` only in
/// training mode; running statistics are left untouched (see
/// update_running_stats).
ForwardResult model_forward(const ModelParams& params, std::span<const Matrix> steps,
                            bool training, Rng& rng);

/// Folds the batch statistics of a training forward into the running averages.
void update_running_stats(ModelParams& params, const ModelCache& cache);

/// Gradient of weighted_bce(probs, labels) with respect to every learnable tensor.
ModelGrads model_backward(const ModelParams& params, const std::optional<ModelCache>& cache,
                          std::span<const double> probs, std::span<const int> labels,
                          ClassWeights weights);

}  // namespace intentforge::nn

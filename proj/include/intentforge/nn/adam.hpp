#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "intentforge/nn/model.hpp"

namespace intentforge::nn {

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam over a list of parameter buffers. Moment buffers are
/// sized on the first call and must keep matching afterwards.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state, double lr);

/// Updates the learnable tensors of params (running statistics excluded).
void adam_step(ModelParams& params, const ModelGrads& grads, AdamState& state, double lr);

}  // namespace intentforge::nn

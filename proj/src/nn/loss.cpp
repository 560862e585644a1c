#include "intentforge/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "intentforge/error.hpp"

namespace intentforge::nn {

namespace {
void check(std::span<const double> probs, std::span<const int> labels) {
  require(probs.size() == labels.size(), ErrorKind::InvalidDimension,
          "bce: " + std::to_string(probs.size()) + " probs vs " + std::to_string(labels.size()) +
              " labels");
  require(!probs.empty(), ErrorKind::EmptyInput, "bce: empty batch");
}
}  // namespace

double weighted_bce(std::span<const double> probs, std::span<const int> labels,
                    ClassWeights weights) {
  check(probs, labels);
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kProbClip, 1.0 - kProbClip);
    const double y = labels[i] == 1 ? 1.0 : 0.0;
    total += -weights[labels[i]] * (y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  return total / static_cast<double>(probs.size());
}

std::vector<double> weighted_bce_logit_grad(std::span<const double> probs,
                                            std::span<const int> labels, ClassWeights weights) {
  check(probs, labels);
  const double inv_n = 1.0 / static_cast<double>(probs.size());
  std::vector<double> g(probs.size(), 0.0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (p < kProbClip || p > 1.0 - kProbClip) continue;
    const double y = labels[i] == 1 ? 1.0 : 0.0;
    g[i] = weights[labels[i]] * (p - y) * inv_n;
  }
  return g;
}

}  // namespace intentforge::nn

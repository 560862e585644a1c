#pragma once

#include <span>
#include <vector>

namespace intentforge::nn {

inline constexpr double kProbClip = 1e-7;

struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;

  double operator[](int label) const noexcept { return label == 1 ? positive : negative; }
};

/// mean_i −w_{y_i}·[y_i·log p_i + (1 − y_i)·log(1 − p_i)], with p clipped to
/// [1e-7, 1 − 1e-7] before the log.
double weighted_bce(std::span<const double> probs, std::span<const int> labels,
                    ClassWeights weights);

/// dL/dz_i for z_i the pre-sigmoid logit of p_i. Zero where the clip is active.
std::vector<double> weighted_bce_logit_grad(std::span<const double> probs,
                                            std::span<const int> labels, ClassWeights weights);

}  // namespace intentforge::nn

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "intentforge/matrix.hpp"

namespace intentforge::nn {

struct BatchNormParams {
  std::size_t dim = 0;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.9;
  double eps = 1e-5;

  /// gamma = 1, beta = 0, running statistics at the standard-normal identity.
  static BatchNormParams identity(std::size_t dim);
};

struct BatchNormCache {
  Matrix x_hat;
  std::vector<double> batch_mean;
  std::vector<double> batch_var;  // biased
  std::vector<double> inv_std;
};

struct BatchNormOutput {
  Matrix y;
  std::optional<BatchNormCache> cache;
};

struct BatchNormGrads {
  Matrix x;
  std::vector<double> gamma;
  std::vector<double> beta;
};

/// Training mode normalizes with the batch statistics and needs at least two
/// rows; inference uses the running statistics. Running statistics are not
/// touched here; see batchnorm_update_running.
BatchNormOutput batchnorm_forward(const BatchNormParams& params, const Matrix& x, bool training);

/// running ← momentum·running + (1 − momentum)·batch, using a training cache.
void batchnorm_update_running(BatchNormParams& params, const BatchNormCache& cache);

BatchNormGrads batchnorm_backward(const BatchNormParams& params, const BatchNormCache& cache,
                                  const Matrix& grad_y);

}  // namespace intentforge::nn

#include "intentforge/nn/batchnorm.hpp"

#include <cmath>

namespace intentforge::nn {

BatchNormParams BatchNormParams::identity(std::size_t dim) {
  require(dim > 0, ErrorKind::InvalidDimension, "batchnorm dim must be positive");
  BatchNormParams p;
  p.dim = dim;
  p.gamma.assign(dim, 1.0);
  p.beta.assign(dim, 0.0);
  p.running_mean.assign(dim, 0.0);
  p.running_var.assign(dim, 1.0);
  return p;
}

BatchNormOutput batchnorm_forward(const BatchNormParams& params, const Matrix& x, bool training) {
  require(x.cols() == params.dim, ErrorKind::InvalidDimension,
          "batchnorm_forward: width " + std::to_string(x.cols()) + " != dim " +
              std::to_string(params.dim));
  const std::size_t n = x.rows();
  const std::size_t d = params.dim;
  BatchNormOutput out;
  out.y = Matrix(n, d);

  if (!training) {
    for (std::size_t j = 0; j < d; ++j) {
      const double inv = 1.0 / std::sqrt(params.running_var[j] + params.eps);
      for (std::size_t i = 0; i < n; ++i) {
        out.y(i, j) = params.gamma[j] * (x(i, j) - params.running_mean[j]) * inv + params.beta[j];
      }
    }
    return out;
  }

  require(n >= 2, ErrorKind::DegenerateBatch,
          "batchnorm training needs batch >= 2, got " + std::to_string(n));
  BatchNormCache cache;
  cache.x_hat = Matrix(n, d);
  cache.batch_mean.assign(d, 0.0);
  cache.batch_var.assign(d, 0.0);
  cache.inv_std.assign(d, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean *= inv_n;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = x(i, j) - mean;
      var += dx * dx;
    }
    var *= inv_n;
    const double inv = 1.0 / std::sqrt(var + params.eps);
    cache.batch_mean[j] = mean;
    cache.batch_var[j] = var;
    cache.inv_std[j] = inv;
    for (std::size_t i = 0; i < n; ++i) {
      const double xh = (x(i, j) - mean) * inv;
      cache.x_hat(i, j) = xh;
      out.y(i, j) = params.gamma[j] * xh + params.beta[j];
    }
  }
  out.cache = std::move(cache);
  return out;
}

void batchnorm_update_running(BatchNormParams& params, const BatchNormCache& cache) {
  require(cache.batch_mean.size() == params.dim, ErrorKind::InvalidDimension,
          "batchnorm_update_running: dim");
  const double m = params.momentum;
  for (std::size_t j = 0; j < params.dim; ++j) {
    params.running_mean[j] = m * params.running_mean[j] + (1.0 - m) * cache.batch_mean[j];
    params.running_var[j] = m * params.running_var[j] + (1.0 - m) * cache.batch_var[j];
  }
}

BatchNormGrads batchnorm_backward(const BatchNormParams& params, const BatchNormCache& cache,
                                  const Matrix& grad_y) {
  const std::size_t n = cache.x_hat.rows();
  const std::size_t d = params.dim;
  require_shape(grad_y, n, d, "batchnorm_backward grad_y");
  BatchNormGrads g;
  g.x = Matrix(n, d);
  g.gamma.assign(d, 0.0);
  g.beta.assign(d, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    double sum_dxh = 0.0;
    double sum_dxh_xh = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dy = grad_y(i, j);
      const double xh = cache.x_hat(i, j);
      g.gamma[j] += dy * xh;
      g.beta[j] += dy;
      const double dxh = dy * params.gamma[j];
      sum_dxh += dxh;
      sum_dxh_xh += dxh * xh;
    }
    const double scale = cache.inv_std[j] * inv_n;
    for (std::size_t i = 0; i < n; ++i) {
      const double dxh = grad_y(i, j) * params.gamma[j];
      g.x(i, j) = scale * (static_cast<double>(n) * dxh - sum_dxh - cache.x_hat(i, j) * sum_dxh_xh);
    }
  }
  return g;
}

}  // namespace intentforge::nn

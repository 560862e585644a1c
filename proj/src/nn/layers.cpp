#include "intentforge/nn/layers.hpp"

#include <random>

#include "intentforge/kernels.hpp"

namespace intentforge::nn {

DenseParams DenseParams::zeros(std::size_t in, std::size_t out) {
  require(in > 0 && out > 0, ErrorKind::InvalidDimension, "dense dims must be positive");
  return DenseParams{Matrix(out, in), std::vector<double>(out, 0.0)};
}

Matrix dense_forward(const DenseParams& params, const Matrix& x) {
  Matrix y;
  kernels::matmul_nt(x, params.w, params.b, y);
  return y;
}

DenseGrads dense_backward(const DenseParams& params, const Matrix& x, const Matrix& grad_y) {
  require_shape(grad_y, x.rows(), params.out(), "dense_backward grad_y");
  DenseGrads g{Matrix(params.out(), params.in()), std::vector<double>(params.out(), 0.0), {}};
  kernels::matmul_tn_acc(grad_y, x, g.w);
  kernels::column_sum_acc(grad_y, g.b);
  kernels::matmul_nn(grad_y, params.w, g.x);
  return g;
}

DropoutOutput dropout_forward(const Matrix& x, double rate, Rng& rng, bool training) {
  require(rate >= 0.0 && rate < 1.0, ErrorKind::InvalidRate,
          "dropout rate must be in [0,1), got " + std::to_string(rate));
  DropoutOutput out;
  if (!training) {
    out.y = x;
    return out;
  }
  Matrix mask(x.rows(), x.cols(), 1.0);
  if (rate > 0.0) {
    const double keep_scale = 1.0 / (1.0 - rate);
    std::bernoulli_distribution keep(1.0 - rate);
    for (double& m : mask.values()) m = keep(rng) ? keep_scale : 0.0;
  }
  out.y = x;
  auto yv = out.y.values();
  const auto mv = mask.values();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] *= mv[i];
  out.mask = std::move(mask);
  return out;
}

Matrix dropout_backward(const Matrix& mask, const Matrix& grad_y) {
  require_shape(grad_y, mask.rows(), mask.cols(), "dropout_backward grad_y");
  Matrix g = grad_y;
  auto gv = g.values();
  const auto mv = mask.values();
  for (std::size_t i = 0; i < gv.size(); ++i) gv[i] *= mv[i];
  return g;
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Matrix relu_backward(const Matrix& x, const Matrix& grad_y) {
  require_shape(grad_y, x.rows(), x.cols(), "relu_backward grad_y");
  Matrix g = grad_y;
  auto gv = g.values();
  const auto xv = x.values();
  for (std::size_t i = 0; i < gv.size(); ++i) {
    if (!(xv[i] > 0.0)) gv[i] = 0.0;
  }
  return g;
}

}  // namespace intentforge::nn

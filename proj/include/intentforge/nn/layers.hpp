#pragma once

#include <optional>
#include <vector>

#include "intentforge/matrix.hpp"
#include "intentforge/rng.hpp"

namespace intentforge::nn {

struct DenseParams {
  Matrix w;               // out × in
  std::vector<double> b;  // out

  static DenseParams zeros(std::size_t in, std::size_t out);
  std::size_t in() const noexcept { return w.cols(); }
  std::size_t out() const noexcept { return w.rows(); }
};

struct DenseGrads {
  Matrix w;
  std::vector<double> b;
  Matrix x;
};

Matrix dense_forward(const DenseParams& params, const Matrix& x);
DenseGrads dense_backward(const DenseParams& params, const Matrix& x, const Matrix& grad_y);

struct DropoutOutput {
  Matrix y;
  std::optional<Matrix> mask;  // entries are 0 or 1/(1 − rate)
};

/// Inverted dropout. Inference is the identity; rate 0 keeps everything and
/// draws nothing from the generator.
DropoutOutput dropout_forward(const Matrix& x, double rate, Rng& rng, bool training);
Matrix dropout_backward(const Matrix& mask, const Matrix& grad_y);

Matrix relu(const Matrix& x);
/// grad masked by x > 0.
Matrix relu_backward(const Matrix& x, const Matrix& grad_y);

}  // namespace intentforge::nn

#pragma once

#include <span>

#include "intentforge/matrix.hpp"

// Dense products used by every layer. Each kernel exists twice: a serial
// reference and an OpenMP version that splits the outer output dimension
// across threads. Both accumulate every output element in the same order,
// so their results are bit-identical and the choice never affects
// reproducibility.
namespace intentforge::kernels {

namespace serial {
/// out = x · wᵀ (+ bias per column). x: n×k, w: m×k, out: n×m.
void matmul_nt(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out);
/// out = g · w. g: n×m, w: m×k, out: n×k.
void matmul_nn(const Matrix& g, const Matrix& w, Matrix& out);
/// acc += gᵀ · x. g: n×m, x: n×k, acc: m×k.
void matmul_tn_acc(const Matrix& g, const Matrix& x, Matrix& acc);
}  // namespace serial

namespace parallel {
void matmul_nt(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out);
void matmul_nn(const Matrix& g, const Matrix& w, Matrix& out);
void matmul_tn_acc(const Matrix& g, const Matrix& x, Matrix& acc);
}  // namespace parallel

// Entry points used by the engine; forward to the parallel kernels.
inline void matmul_nt(const Matrix& x, const Matrix& w, std::span<const double> bias,
                      Matrix& out) {
  parallel::matmul_nt(x, w, bias, out);
}
inline void matmul_nn(const Matrix& g, const Matrix& w, Matrix& out) {
  parallel::matmul_nn(g, w, out);
}
inline void matmul_tn_acc(const Matrix& g, const Matrix& x, Matrix& acc) {
  parallel::matmul_tn_acc(g, x, acc);
}

/// Sum over rows, accumulated into acc (length = g.cols()).
void column_sum_acc(const Matrix& g, std::span<double> acc);

int max_threads() noexcept;

}  // namespace intentforge::kernels

#include "intentforge/kernels.hpp"

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace intentforge::kernels {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1u << 15;

void check_nt(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out) {
  require(x.cols() == w.cols(), ErrorKind::InvalidDimension,
          "matmul_nt: x " + shape_string(x) + " vs w " + shape_string(w));
  require(bias.empty() || bias.size() == w.rows(), ErrorKind::InvalidDimension,
          "matmul_nt: bias length");
  if (out.rows() != x.rows() || out.cols() != w.rows()) out = Matrix(x.rows(), w.rows());
}

void check_nn(const Matrix& g, const Matrix& w, Matrix& out) {
  require(g.cols() == w.rows(), ErrorKind::InvalidDimension,
          "matmul_nn: g " + shape_string(g) + " vs w " + shape_string(w));
  if (out.rows() != g.rows() || out.cols() != w.cols()) out = Matrix(g.rows(), w.cols());
}

void check_tn(const Matrix& g, const Matrix& x, const Matrix& acc) {
  require(g.rows() == x.rows() && acc.rows() == g.cols() && acc.cols() == x.cols(),
          ErrorKind::InvalidDimension,
          "matmul_tn_acc: g " + shape_string(g) + ", x " + shape_string(x) + ", acc " +
              shape_string(acc));
}

inline void nt_row(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out,
                   std::size_t i) {
  const std::size_t k = x.cols();
  const double* xi = x.row(i).data();
  double* oi = out.row(i).data();
  for (std::size_t j = 0; j < w.rows(); ++j) {
    const double* wj = w.row(j).data();
    double s = bias.empty() ? 0.0 : bias[j];
    for (std::size_t p = 0; p < k; ++p) s += xi[p] * wj[p];
    oi[j] = s;
  }
}

inline void nn_row(const Matrix& g, const Matrix& w, Matrix& out, std::size_t i) {
  double* oi = out.row(i).data();
  for (std::size_t p = 0; p < out.cols(); ++p) oi[p] = 0.0;
  const double* gi = g.row(i).data();
  for (std::size_t j = 0; j < g.cols(); ++j) {
    const double a = gi[j];
    const double* wj = w.row(j).data();
    for (std::size_t p = 0; p < out.cols(); ++p) oi[p] += a * wj[p];
  }
}

inline void tn_row(const Matrix& g, const Matrix& x, Matrix& acc, std::size_t j) {
  double* aj = acc.row(j).data();
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const double a = g(i, j);
    const double* xi = x.row(i).data();
    for (std::size_t p = 0; p < x.cols(); ++p) aj[p] += a * xi[p];
  }
}

}  // namespace

namespace serial {

void matmul_nt(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out) {
  check_nt(x, w, bias, out);
  for (std::size_t i = 0; i < x.rows(); ++i) nt_row(x, w, bias, out, i);
}

void matmul_nn(const Matrix& g, const Matrix& w, Matrix& out) {
  check_nn(g, w, out);
  for (std::size_t i = 0; i < g.rows(); ++i) nn_row(g, w, out, i);
}

void matmul_tn_acc(const Matrix& g, const Matrix& x, Matrix& acc) {
  check_tn(g, x, acc);
  for (std::size_t j = 0; j < acc.rows(); ++j) tn_row(g, x, acc, j);
}

}  // namespace serial

namespace parallel {

void matmul_nt(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out) {
  check_nt(x, w, bias, out);
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  const bool big = x.rows() * w.rows() * x.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t i = 0; i < n; ++i) nt_row(x, w, bias, out, static_cast<std::size_t>(i));
}

void matmul_nn(const Matrix& g, const Matrix& w, Matrix& out) {
  check_nn(g, w, out);
  const auto n = static_cast<std::ptrdiff_t>(g.rows());
  const bool big = g.rows() * g.cols() * w.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t i = 0; i < n; ++i) nn_row(g, w, out, static_cast<std::size_t>(i));
}

void matmul_tn_acc(const Matrix& g, const Matrix& x, Matrix& acc) {
  check_tn(g, x, acc);
  const auto m = static_cast<std::ptrdiff_t>(acc.rows());
  const bool big = g.rows() * acc.rows() * acc.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t j = 0; j < m; ++j) tn_row(g, x, acc, static_cast<std::size_t>(j));
}

}  // namespace parallel

void column_sum_acc(const Matrix& g, std::span<double> acc) {
  require(acc.size() == g.cols(), ErrorKind::InvalidDimension, "column_sum_acc: length");
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const auto r = g.row(i);
    for (std::size_t j = 0; j < g.cols(); ++j) acc[j] += r[j];
  }
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace intentforge::kernels

#include <doctest.h>

#include <random>

#include "finite_diff.hpp"
#include "intentforge/kernels.hpp"

using intentforge::Matrix;
namespace k = intentforge::kernels;

namespace {

Matrix naive_nt(const Matrix& x, const Matrix& w) {
  Matrix y(x.rows(), w.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < w.rows(); ++j)
      for (std::size_t p = 0; p < x.cols(); ++p) y(i, j) += x(i, p) * w(j, p);
  return y;
}

void check_close(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.values()[i] == doctest::Approx(b.values()[i]).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("serial kernels agree with a naive triple loop") {
  std::mt19937_64 rng(3);
  const Matrix x = fd::random_matrix(5, 7, rng);
  const Matrix w = fd::random_matrix(4, 7, rng);
  Matrix y;
  k::serial::matmul_nt(x, w, {}, y);
  check_close(y, naive_nt(x, w));

  // g·w == (wᵀ·gᵀ)ᵀ, checked through the nt kernel on a transposed copy.
  const Matrix g = fd::random_matrix(5, 4, rng);
  Matrix wt(7, 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 7; ++c) wt(c, r) = w(r, c);
  Matrix gw;
  k::serial::matmul_nn(g, w, gw);
  check_close(gw, naive_nt(g, wt));

  Matrix acc(4, 7, 1.0);
  k::serial::matmul_tn_acc(g, x, acc);
  Matrix gt(4, 5), xt(7, 5);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 4; ++c) gt(c, r) = g(r, c);
    for (std::size_t c = 0; c < 7; ++c) xt(c, r) = x(r, c);
  }
  Matrix expect = naive_nt(gt, xt);
  for (double& v : expect.values()) v += 1.0;
  check_close(acc, expect);
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  std::mt19937_64 rng(11);
  // Large enough to cross the parallel work threshold.
  for (auto [n, kdim, m] : {std::tuple{32, 1114, 256}, std::tuple{3, 5, 2}, std::tuple{64, 96, 128}}) {
    const Matrix x = fd::random_matrix(n, kdim, rng);
    const Matrix w = fd::random_matrix(m, kdim, rng);
    std::vector<double> bias(m);
    fd::randomize(bias, rng);
    Matrix a, b;
    k::serial::matmul_nt(x, w, bias, a);
    k::parallel::matmul_nt(x, w, bias, b);
    CHECK(a == b);

    const Matrix g = fd::random_matrix(n, m, rng);
    k::serial::matmul_nn(g, w, a);
    k::parallel::matmul_nn(g, w, b);
    CHECK(a == b);

    Matrix acc_s(m, kdim), acc_p(m, kdim);
    k::serial::matmul_tn_acc(g, x, acc_s);
    k::parallel::matmul_tn_acc(g, x, acc_p);
    CHECK(acc_s == acc_p);
  }
}

TEST_CASE("kernels reject mismatched shapes") {
  Matrix x(2, 3), w(4, 2), y;
  CHECK_THROWS_AS(k::serial::matmul_nt(x, w, {}, y), intentforge::Error);
  CHECK_THROWS_AS(k::parallel::matmul_nn(x, w, y), intentforge::Error);
  Matrix acc(5, 5);
  CHECK_THROWS_AS(k::matmul_tn_acc(x, w, acc), intentforge::Error);
}

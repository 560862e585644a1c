#include <doctest.h>

#include <cmath>
#include <random>

#include "finite_diff.hpp"
#include "gradient_checks.hpp"
#include "intentforge/nn/batchnorm.hpp"

using intentforge::Matrix;
namespace nn = intentforge::nn;

TEST_CASE("training-mode output is standardized per feature") {
  std::mt19937_64 rng(8);
  auto p = nn::BatchNormParams::identity(5);
  for (int trial = 0; trial < 20; ++trial) {
    // Input variance ≫ eps, so var/(var+eps) is within 1e-6 of one.
    Matrix x = fd::random_matrix(16, 5, rng, 10.0);
    auto out = nn::batchnorm_forward(p, x, true);
    for (std::size_t j = 0; j < 5; ++j) {
      double mean = 0.0, var = 0.0;
      for (std::size_t i = 0; i < 16; ++i) mean += out.y(i, j);
      mean /= 16.0;
      for (std::size_t i = 0; i < 16; ++i) var += (out.y(i, j) - mean) * (out.y(i, j) - mean);
      var /= 16.0;
      CHECK(std::abs(mean) <= 1e-9);
      CHECK(std::abs(var - 1.0) <= 1e-6);
      // Exact identity for any input variance.
      const double bv = out.cache->batch_var[j];
      CHECK(var == doctest::Approx(bv / (bv + p.eps)).epsilon(1e-12));
    }
  }
}

TEST_CASE("inference with identity running stats is eps-scaled identity") {
  auto p = nn::BatchNormParams::identity(3);
  std::mt19937_64 rng(2);
  Matrix x = fd::random_matrix(4, 3, rng);
  auto out = nn::batchnorm_forward(p, x, false);
  CHECK_FALSE(out.cache.has_value());
  const double scale = 1.0 / std::sqrt(1.0 + p.eps);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(out.y.values()[i] == doctest::Approx(x.values()[i] * scale).epsilon(1e-15));
    CHECK(std::abs(out.y.values()[i] - x.values()[i]) <= 1e-5 * std::abs(x.values()[i]));
  }
}

TEST_CASE("batch of one is rejected in training mode") {
  auto p = nn::BatchNormParams::identity(3);
  try {
    nn::batchnorm_forward(p, Matrix(1, 3), true);
    FAIL("expected degenerate-batch error");
  } catch (const intentforge::Error& e) {
    CHECK(e.kind() == intentforge::ErrorKind::DegenerateBatch);
  }
  CHECK_NOTHROW(nn::batchnorm_forward(p, Matrix(1, 3), false));
  CHECK_THROWS_AS(nn::batchnorm_forward(p, Matrix(4, 2), false), intentforge::Error);
}

TEST_CASE("running statistics follow the momentum rule") {
  auto p = nn::BatchNormParams::identity(1);
  Matrix x(2, 1, std::vector<double>{1.0, 3.0});
  auto out = nn::batchnorm_forward(p, x, true);
  nn::batchnorm_update_running(p, *out.cache);
  CHECK(p.running_mean[0] == doctest::Approx(0.9 * 0.0 + 0.1 * 2.0));
  CHECK(p.running_var[0] == doctest::Approx(0.9 * 1.0 + 0.1 * 1.0));
}

TEST_CASE("batchnorm backward: zero input gradient and gamma formula") {
  std::mt19937_64 rng(4);
  auto p = nn::BatchNormParams::identity(3);
  fd::randomize(p.gamma, rng);
  Matrix x = fd::random_matrix(4, 3, rng);
  auto fwd = nn::batchnorm_forward(p, x, true);

  auto zero = nn::batchnorm_backward(p, *fwd.cache, Matrix(4, 3));
  for (double v : zero.x.values()) CHECK(v == 0.0);
  for (double v : zero.gamma) CHECK(v == 0.0);
  for (double v : zero.beta) CHECK(v == 0.0);

  Matrix gy = fd::random_matrix(4, 3, rng);
  auto g = nn::batchnorm_backward(p, *fwd.cache, gy);
  for (std::size_t j = 0; j < 3; ++j) {
    double expect = 0.0;
    for (std::size_t i = 0; i < 4; ++i) expect += gy(i, j) * fwd.cache->x_hat(i, j);
    CHECK(g.gamma[j] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("batchnorm gradients match finite differences on a 4x3 batch") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = gradcheck::batchnorm(seed);
    INFO(r.worst);
    CHECK(r.max_rel <= fd::kRelTol);
  }
}

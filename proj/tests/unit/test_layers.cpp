#include <doctest.h>

#include <random>

#include "finite_diff.hpp"
#include "gradient_checks.hpp"
#include "intentforge/nn/layers.hpp"

using intentforge::Matrix;
namespace nn = intentforge::nn;

TEST_CASE("dropout at rate zero keeps everything") {
  intentforge::Rng rng(1);
  std::mt19937_64 data_rng(2);
  Matrix x = fd::random_matrix(3, 4, data_rng);
  auto out = nn::dropout_forward(x, 0.0, rng, true);
  CHECK(out.y == x);
  REQUIRE(out.mask.has_value());
  for (double m : out.mask->values()) CHECK(m == 1.0);
}

TEST_CASE("dropout in inference mode is the identity") {
  intentforge::Rng rng(1);
  std::mt19937_64 data_rng(3);
  Matrix x = fd::random_matrix(3, 4, data_rng);
  auto out = nn::dropout_forward(x, 0.2, rng, false);
  CHECK(out.y == x);
  CHECK_FALSE(out.mask.has_value());
}

TEST_CASE("dropout keep fraction and expectation") {
  intentforge::Rng rng(123);
  Matrix x(1000, 100, 1.0);
  auto out = nn::dropout_forward(x, 0.2, rng, true);
  std::size_t kept = 0;
  double sum = 0.0;
  for (double m : out.mask->values()) {
    if (m != 0.0) {
      ++kept;
      CHECK(m == doctest::Approx(1.25));
    }
  }
  for (double y : out.y.values()) sum += y;
  const double frac = static_cast<double>(kept) / 1e5;
  CHECK(frac >= 0.79);
  CHECK(frac <= 0.81);
  // Inverted scaling preserves the mean of a constant input.
  CHECK(sum / 1e5 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("dropout rejects invalid rates") {
  intentforge::Rng rng(1);
  try {
    nn::dropout_forward(Matrix(2, 2), 1.0, rng, true);
    FAIL("expected invalid-rate");
  } catch (const intentforge::Error& e) {
    CHECK(e.kind() == intentforge::ErrorKind::InvalidRate);
  }
  CHECK_THROWS_AS(nn::dropout_forward(Matrix(2, 2), -0.1, rng, false), intentforge::Error);
}

TEST_CASE("dropout backward applies the mask") {
  intentforge::Rng rng(9);
  Matrix x(4, 4, 2.0);
  auto out = nn::dropout_forward(x, 0.5, rng, true);
  Matrix g = nn::dropout_backward(*out.mask, Matrix(4, 4, 1.0));
  CHECK(g == *out.mask);
}

TEST_CASE("dense + relu gradients match finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = gradcheck::dense(seed);
    INFO(r.worst);
    CHECK(r.max_rel <= fd::kRelTol);
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "finite_diff.hpp"
#include "gradient_checks.hpp"
#include "intentforge/nn/adam.hpp"
#include "intentforge/nn/model.hpp"

using intentforge::Matrix;
namespace nn = intentforge::nn;

TEST_CASE("init_params is deterministic in seed") {
  const auto a = nn::init_params(4, 7);
  const auto b = nn::init_params(4, 7);
  const auto ta = nn::tensors(a, true);
  const auto tb = nn::tensors(b, true);
  REQUIRE(ta.size() == tb.size());
  for (std::size_t k = 0; k < ta.size(); ++k) {
    CHECK(std::equal(ta[k].data.begin(), ta[k].data.end(), tb[k].data.begin()));
  }
  const auto c = nn::init_params(4, 8);
  CHECK_FALSE(c.lstm1.w_input == a.lstm1.w_input);
}

TEST_CASE("init_params layout and initial values") {
  const auto p = nn::init_params(1114, 1);
  CHECK(p.lstm1.w_input.rows() == 256);
  CHECK(p.lstm1.w_input.cols() == 1114);
  CHECK(p.lstm2.w_input.rows() == 128);
  CHECK(p.lstm2.w_input.cols() == 64);
  CHECK(p.dense1.w.rows() == 16);
  CHECK(p.dense1.w.cols() == 32);
  CHECK(p.dense2.w.rows() == 1);
  CHECK(p.bn1.gamma == std::vector<double>(64, 1.0));
  CHECK(p.bn2.running_var == std::vector<double>(32, 1.0));
  CHECK(p.dropout_rate == 0.2);
  for (std::size_t r = 0; r < 256; ++r) {
    CHECK(p.lstm1.bias[r] == ((r >= 64 && r < 128) ? 1.0 : 0.0));
  }
  const double limit = std::sqrt(6.0 / (256.0 + 1114.0));
  for (double v : p.lstm1.w_input.values()) CHECK(std::abs(v) <= limit);
}

TEST_CASE("init_params rejects a zero state size") {
  try {
    nn::init_params(0, 1);
    FAIL("expected invalid-dimension");
  } catch (const intentforge::Error& e) {
    CHECK(e.kind() == intentforge::ErrorKind::InvalidDimension);
  }
}

TEST_CASE("all-zero parameters predict exactly one half") {
  const auto p = nn::ModelParams::zeros(6);
  std::mt19937_64 rng(3);
  std::vector<Matrix> xs{fd::random_matrix(5, 6, rng, 3.0)};
  intentforge::Rng drop(1);
  const auto out = nn::model_forward(p, xs, false, drop);
  for (double v : out.probs) CHECK(v == 0.5);
}

TEST_CASE("outputs stay strictly inside (0,1) even for extreme inputs") {
  auto p = nn::init_params(3, 5);
  // Saturate the output logit in both directions.
  for (double& w : p.dense2.w.values()) w = 1e6;
  std::mt19937_64 rng(4);
  std::vector<Matrix> xs{fd::random_matrix(8, 3, rng, 1e3)};
  intentforge::Rng drop(1);
  for (double sign : {1.0, -1.0}) {
    p.dense2.b[0] = sign * 1e9;
    const auto out = nn::model_forward(p, xs, true, drop);
    for (double v : out.probs) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("full-width shape: batch 32, one step, 1114 features") {
  const auto p = nn::init_params(1114, 1);
  std::mt19937_64 rng(1);
  std::vector<Matrix> xs{fd::random_matrix(32, 1114, rng)};
  intentforge::Rng drop(2);
  const auto out = nn::model_forward(p, xs, true, drop);
  CHECK(out.probs.size() == 32);
  CHECK(out.cache.has_value());
}

TEST_CASE("model_forward rejects wrong feature width") {
  const auto p = nn::init_params(5, 1);
  std::vector<Matrix> xs{Matrix(4, 6)};
  intentforge::Rng drop(2);
  CHECK_THROWS_AS(nn::model_forward(p, xs, false, drop), intentforge::Error);
}

TEST_CASE("model_backward without a cache is a stale-cache error") {
  const auto p = nn::init_params(5, 1);
  std::vector<double> probs{0.5, 0.5};
  std::vector<int> labels{0, 1};
  try {
    nn::model_backward(p, std::nullopt, probs, labels, {});
    FAIL("expected stale-cache");
  } catch (const intentforge::Error& e) {
    CHECK(e.kind() == intentforge::ErrorKind::StaleCache);
  }
}

TEST_CASE("gradients vanish when probabilities equal the labels") {
  const auto p = nn::init_params(5, 2);
  std::mt19937_64 rng(1);
  std::vector<Matrix> xs{fd::random_matrix(4, 5, rng)};
  intentforge::Rng drop(2);
  const auto fwd = nn::model_forward(p, xs, true, drop);
  const std::vector<int> labels{0, 1, 1, 0};
  const std::vector<double> probs{0.0, 1.0, 1.0, 0.0};
  const auto g = nn::model_backward(p, fwd.cache, probs, labels, {0.6, 3.0});
  for (const auto& t : nn::tensors(g))
    for (double v : t.data) CHECK(std::abs(v) <= 1e-5);
}

TEST_CASE("class-1 weight scales class-1 gradients linearly") {
  auto p = nn::init_params(5, 3);
  p.dropout_rate = 0.0;
  std::mt19937_64 rng(1);
  std::vector<Matrix> xs{fd::random_matrix(4, 5, rng)};
  intentforge::Rng drop(2);
  const auto fwd = nn::model_forward(p, xs, true, drop);
  const std::vector<int> labels(4, 1);
  const auto g1 = nn::model_backward(p, fwd.cache, fwd.probs, labels, {1.0, 1.5});
  const auto g2 = nn::model_backward(p, fwd.cache, fwd.probs, labels, {1.0, 3.0});
  const auto t1 = nn::tensors(g1);
  const auto t2 = nn::tensors(g2);
  for (std::size_t k = 0; k < t1.size(); ++k)
    for (std::size_t i = 0; i < t1[k].data.size(); ++i)
      CHECK(t2[k].data[i] == doctest::Approx(2.0 * t1[k].data[i]).epsilon(1e-12));
}

TEST_CASE("full model gradients match finite differences (every coordinate)") {
  const auto r = gradcheck::model(11);
  INFO(r.worst);
  CHECK(r.checked > 30000);
  CHECK(r.max_rel <= fd::kRelTol);
}

TEST_CASE("sequence input with several timesteps also checks out") {
  const auto r = gradcheck::model(12, 40, 5, 4, 4);
  INFO(r.worst);
  CHECK(r.max_rel <= fd::kRelTol);
}

TEST_CASE("training step is deterministic and moves the loss downhill") {
  auto run = [] {
    auto p = nn::init_params(5, 21);
    std::mt19937_64 rng(2);
    std::vector<Matrix> xs{fd::random_matrix(8, 5, rng)};
    std::vector<int> labels{0, 1, 0, 1, 1, 0, 0, 1};
    nn::AdamState s;
    intentforge::Rng drop(4);
    std::vector<double> losses;
    for (int step = 0; step < 30; ++step) {
      auto fwd = nn::model_forward(p, xs, true, drop);
      losses.push_back(nn::weighted_bce(fwd.probs, labels, {}));
      auto g = nn::model_backward(p, fwd.cache, fwd.probs, labels, {});
      nn::update_running_stats(p, *fwd.cache);
      nn::adam_step(p, g, s, 0.01);
    }
    return std::pair{p, losses};
  };
  const auto [pa, la] = run();
  const auto [pb, lb] = run();
  CHECK(la == lb);
  CHECK(pa.lstm1.w_input == pb.lstm1.w_input);
  CHECK(pa.bn1.running_mean == pb.bn1.running_mean);
  CHECK(la.back() < la.front());
}

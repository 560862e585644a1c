#include <doctest.h>

#include <cmath>
#include <numeric>

#include "intentforge/data/pipeline.hpp"
#include "intentforge/error.hpp"
#include "intentforge/nn/adam.hpp"
#include "intentforge/synthgen/generator.hpp"
#include "intentforge/trainer/trainer.hpp"

namespace tr = intentforge::trainer;
namespace nn = intentforge::nn;
namespace data = intentforge::data;
using intentforge::Matrix;

namespace {

tr::Sample sample(double v, int label = 0, std::size_t width = 3, std::size_t rows = 1) {
  return {Matrix(rows, width, v), label};
}

const data::DatasetSplit& small_split() {
  static const data::DatasetSplit split = [] {
    intentforge::synthgen::GeneratorConfig g;
    g.n_users = 300;
    g.seed = 8;
    data::PipelineOptions opts;
    opts.seed = 8;
    return data::prepare(intentforge::synthgen::generate(g).events, opts).split;
  }();
  return split;
}

}  // namespace

TEST_CASE("epsilon schedule endpoints and midpoint") {
  tr::TrainConfig c;
  CHECK(tr::epsilon_schedule(0, c) == 1.0);
  CHECK(tr::epsilon_schedule(49, c) == 0.01);
  CHECK(tr::epsilon_schedule(24, c) == doctest::Approx(std::pow(0.01, 24.0 / 49.0)));
  CHECK(tr::epsilon_schedule(24, c) == doctest::Approx(0.1049).epsilon(1e-3));
  for (std::size_t e = 1; e < 50; ++e) {
    CHECK(tr::epsilon_schedule(e, c) <= tr::epsilon_schedule(e - 1, c));
    CHECK(tr::epsilon_schedule(e, c) >= 0.01);
  }
  CHECK_THROWS_AS(tr::epsilon_schedule(50, c), intentforge::Error);
  c.max_epochs = 1;
  c.patience = 1;
  CHECK(tr::epsilon_schedule(0, c) == 1.0);
}

TEST_CASE("replay memory evicts the oldest") {
  tr::ReplayMemory m(2, 3);
  m.remember(sample(1));
  CHECK(m.size() == 1);
  m.remember(sample(2));
  m.remember(sample(3));
  CHECK(m.size() == 2);
  CHECK(m.insertions() == 3);
  CHECK(m.at(0).rows(0, 0) == 2.0);
  CHECK(m.at(1).rows(0, 0) == 3.0);
  CHECK_THROWS_AS(m.remember(sample(1, 0, 4)), intentforge::Error);
  CHECK_THROWS_AS(m.at(2), intentforge::Error);
}

TEST_CASE("batch sampling") {
  tr::ReplayMemory m(5, 3);
  for (int i = 0; i < 5; ++i) m.remember(sample(i));
  intentforge::Rng rng(1);
  auto idx = tr::sample_indices(5, 5, rng);
  std::sort(idx.begin(), idx.end());
  CHECK(idx == std::vector<std::size_t>{0, 1, 2, 3, 4});

  intentforge::Rng a(77), b(77);
  CHECK(tr::sample_indices(100, 10, a) == tr::sample_indices(100, 10, b));
  auto distinct = tr::sample_indices(100, 100, a);
  std::sort(distinct.begin(), distinct.end());
  CHECK(std::adjacent_find(distinct.begin(), distinct.end()) == distinct.end());

  try {
    tr::sample_batch(m, 6, rng);
    FAIL("expected insufficient memory");
  } catch (const intentforge::Error& e) {
    CHECK(e.kind() == intentforge::ErrorKind::InsufficientMemory);
  }
}

TEST_CASE("single draws are uniform") {
  intentforge::Rng rng(2024);
  std::array<int, 4> counts{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[tr::sample_indices(4, 1, rng)[0]];
  for (int c : counts) CHECK(std::abs(c / double(draws) - 0.25) <= 0.01);
}

TEST_CASE("exploration noise") {
  std::vector<tr::Sample> batch;
  for (int i = 0; i < 10; ++i) {
    Matrix rows(2, 6, 0.0);
    rows(0, i % 3) = 1.0;
    rows(1, 1) = 1.0;
    for (std::size_t c = 3; c < 6; ++c) rows(0, c) = rows(1, c) = 0.5;
    batch.push_back({rows, i % 2});
  }
  const auto original = batch;
  intentforge::Rng rng(3);
  CHECK(tr::apply_exploration_noise(batch, 0.0, 0.1, 3, rng) == 0);
  for (std::size_t i = 0; i < batch.size(); ++i) CHECK(batch[i].rows == original[i].rows);
  CHECK(tr::apply_exploration_noise(batch, 1.0, 0.0, 3, rng) == 10);
  for (std::size_t i = 0; i < batch.size(); ++i) CHECK(batch[i].rows == original[i].rows);

  CHECK(tr::apply_exploration_noise(batch, 1.0, 0.3, 3, rng) == 10);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(batch[i].label == original[i].label);
    for (std::size_t r = 0; r < 2; ++r) {
      double onehot = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(batch[i].rows(r, c) == original[i].rows(r, c));
        onehot += batch[i].rows(r, c);
      }
      CHECK(onehot == 1.0);
      for (std::size_t c = 3; c < 6; ++c) {
        CHECK(batch[i].rows(r, c) >= 0.0);
        CHECK(batch[i].rows(r, c) <= 1.0);
      }
    }
  }
  CHECK_THROWS_AS(tr::apply_exploration_noise(batch, 1.5, 0.1, 3, rng), intentforge::Error);
}

TEST_CASE("noise spread before clamping") {
  std::vector<tr::Sample> batch(25000, sample(0.5, 0, 5));
  intentforge::Rng rng(4);
  std::vector<double> drawn;
  tr::apply_exploration_noise(batch, 1.0, 0.1, 1, rng, &drawn);
  REQUIRE(drawn.size() == 100000);
  const double mean = std::accumulate(drawn.begin(), drawn.end(), 0.0) / drawn.size();
  double ss = 0.0;
  for (double z : drawn) ss += (z - mean) * (z - mean);
  CHECK(std::abs(std::sqrt(ss / drawn.size()) - 0.1) <= 0.005);
}

TEST_CASE("to_steps pads on the left and keeps the latest events") {
  Matrix a(1, 2, 1.0);
  Matrix b(3, 2);
  for (std::size_t r = 0; r < 3; ++r) b(r, 0) = b(r, 1) = 10.0 + r;
  std::vector<tr::Sample> batch{{a, 0}, {b, 1}};
  auto steps = tr::to_steps(batch, 16);
  REQUIRE(steps.size() == 3);
  CHECK(steps[0](0, 0) == 0.0);
  CHECK(steps[2](0, 0) == 1.0);
  CHECK(steps[0](1, 0) == 10.0);
  auto capped = tr::to_steps(batch, 2);
  REQUIRE(capped.size() == 2);
  CHECK(capped[0](1, 0) == 11.0);
  CHECK(capped[1](1, 0) == 12.0);
  CHECK(capped[1](0, 0) == 1.0);
}

TEST_CASE("early stopping rule") {
  tr::EarlyStopping s(2);
  CHECK_FALSE(s.observe(0, 0.7));
  CHECK_FALSE(s.observe(1, 0.6));
  CHECK_FALSE(s.observe(2, 0.61));
  CHECK(s.observe(3, 0.62));
  CHECK(s.best_epoch() == 1);
  CHECK(s.best_loss() == 0.6);
}

TEST_CASE("train config validation and json") {
  tr::TrainConfig c;
  c.batch_size = 1;
  CHECK_THROWS_AS(c.validate(), intentforge::Error);
  c = {};
  c.epsilon_end = 0.0;
  CHECK_THROWS_AS(c.validate(), intentforge::Error);
  c = {};
  c.patience = 51;
  CHECK_THROWS_AS(c.validate(), intentforge::Error);
  auto parsed = tr::train_config_from_json(nlohmann::json::parse(R"({"max_epochs": 3, "replay_enabled": false})"));
  CHECK(parsed.max_epochs == 3);
  CHECK_FALSE(parsed.replay_enabled);
  CHECK(parsed.learning_rate == 0.001);
  CHECK_THROWS_AS(tr::train_config_from_json(nlohmann::json::parse(R"({"epochs": 3})")),
                  intentforge::Error);
  CHECK_THROWS_AS(tr::train_config_from_json(nlohmann::json::parse(R"({"batch_size": "x"})")),
                  intentforge::Error);
}

TEST_CASE("plain configuration matches a hand-rolled sequential loop") {
  const auto& split = small_split();
  tr::TrainConfig c;
  c.max_epochs = 1;
  c.patience = 1;
  c.replay_enabled = false;
  c.exploration_enabled = false;
  c.seed = 5;
  const auto init = nn::init_params(split.schema.state_size(), 5);
  std::vector<double> trace;
  tr::TrainCallbacks cb;
  cb.on_batch = [&](std::size_t, std::size_t, double loss) { trace.push_back(loss); };
  auto result = tr::train(c, split, init, cb);
  CHECK(result.best.kind == "lstm");

  nn::ModelParams p = init;
  nn::AdamState adam;
  auto dropout = intentforge::make_stream(5, intentforge::Stream::Dropout);
  const auto w = data::class_weights(split.train.labels);
  const auto samples = tr::samples_of(split.train);
  std::vector<double> expected;
  for (std::size_t begin = 0; begin + 2 <= samples.size(); begin += c.batch_size) {
    const std::size_t end = std::min(samples.size(), begin + c.batch_size);
    std::vector<tr::Sample> batch(samples.begin() + begin, samples.begin() + end);
    std::vector<int> y;
    for (const auto& s : batch) y.push_back(s.label);
    auto fwd = nn::model_forward(p, tr::to_steps(batch, 16), true, dropout);
    expected.push_back(nn::weighted_bce(fwd.probs, y, w));
    nn::adam_step(p, nn::model_backward(p, fwd.cache, fwd.probs, y, w), adam, c.learning_rate);
    nn::update_running_stats(p, *fwd.cache);
  }
  CHECK(trace == expected);
  CHECK(result.best.params.lstm1.w_input == p.lstm1.w_input);
}

TEST_CASE("training improves validation loss and is reproducible") {
  const auto& split = small_split();
  tr::TrainConfig c;
  c.max_epochs = 4;
  c.patience = 4;
  c.seed = 9;
  const auto init = nn::init_params(split.schema.state_size(), 9);
  auto a = tr::train(c, split, init);
  auto b = tr::train(c, split, init);
  const auto w = data::class_weights(split.train.labels);
  CHECK(a.best.val_loss < tr::evaluate_loss(init, split.validation, w));
  CHECK(a.best.params.dense2.w == b.best.params.dense2.w);
  CHECK(a.best.params.bn1.running_var == b.best.params.bn1.running_var);
  CHECK(a.history.size() == 4);
  double min_val = a.history[0].val_loss;
  for (const auto& e : a.history) min_val = std::min(min_val, e.val_loss);
  CHECK(a.best.val_loss == min_val);
  CHECK(a.best.kind == "dqn");
  CHECK(a.best.schema_digest == split.schema.digest());
  CHECK(tr::evaluate_loss(a.best.params, split.validation, w) == a.best.val_loss);
  const auto csv = tr::history_csv(a.history);
  CHECK(csv.rfind("epoch,train_loss,val_loss,epsilon,seconds\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("early stop bounds the epoch count") {
  const auto& split = small_split();
  tr::TrainConfig c;
  c.max_epochs = 12;
  c.patience = 1;
  c.learning_rate = 0.05;
  auto r = tr::train(c, split, nn::init_params(split.schema.state_size(), 1));
  CHECK(r.history.size() <= r.best.best_epoch + c.patience + 1);
}

TEST_CASE("divergence is reported with its position") {
  const auto& split = small_split();
  auto params = nn::init_params(split.schema.state_size(), 2);
  params.dense2.w(0, 0) = std::nan("");
  tr::TrainConfig c;
  c.max_epochs = 1;
  c.patience = 1;
  try {
    tr::train(c, split, params);
    FAIL("expected divergence");
  } catch (const intentforge::Error& e) {
    CHECK(e.kind() == intentforge::ErrorKind::Divergence);
    CHECK(std::string(e.what()).find("epoch 0 batch 0") != std::string::npos);
  }
}

TEST_CASE("training preconditions") {
  auto split = small_split();
  tr::TrainConfig c;
  CHECK_THROWS_AS(tr::train(c, split, nn::init_params(split.schema.state_size() + 1, 1)),
                  intentforge::Error);
  c.batch_size = split.train.sessions() + 1;
  CHECK_THROWS_AS(tr::train(c, split, nn::init_params(split.schema.state_size(), 1)),
                  intentforge::Error);
}

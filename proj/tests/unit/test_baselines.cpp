#include <doctest.h>

#include "gradient_checks.hpp"
#include "intentforge/baselines/baselines.hpp"
#include "intentforge/data/pipeline.hpp"
#include "intentforge/error.hpp"
#include "intentforge/synthgen/generator.hpp"

namespace bl = intentforge::baselines;
namespace data = intentforge::data;
namespace tr = intentforge::trainer;
using intentforge::Matrix;

namespace {

data::DatasetSplit generated_split(data::FeatureMode mode = data::FeatureMode::Flat) {
  intentforge::synthgen::GeneratorConfig g;
  g.n_users = 300;
  g.seed = 21;
  data::PipelineOptions opts;
  opts.mode = mode;
  return data::prepare(intentforge::synthgen::generate(g).events, opts).split;
}

}  // namespace

TEST_CASE("logistic regression gradient agrees with finite differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto r = gradcheck::logreg(seed);
    CHECK_MESSAGE(r.max_rel <= 1e-6, r.worst);
    CHECK(r.checked == 6);
  }
}

TEST_CASE("prediction edge cases") {
  bl::LogRegParams zero{{0.0, 0.0}, 0.0};
  Matrix x(3, 2, 0.7);
  for (double p : bl::predict_logreg(zero, x)) CHECK(p == 0.5);
  bl::LogRegParams saturated{{0.0, 0.0}, 50.0};
  for (double p : bl::predict_logreg(saturated, x)) CHECK(p >= 1.0 - 1e-9);
  bl::LogRegParams one{{1.0}, 0.0};
  CHECK(bl::predict_logreg(one, Matrix(1, 1, 0.0))[0] == 0.5);
  CHECK_THROWS_AS(bl::predict_logreg(one, x), intentforge::Error);
}

TEST_CASE("separable data is fit exactly") {
  data::DatasetSplit split;
  split.train.width = 1;
  Matrix x(20, 1);
  for (std::size_t i = 0; i < 20; ++i) {
    x(i, 0) = i < 10 ? -1.0 - 0.1 * i : 1.0 + 0.1 * i;
    split.train.labels.push_back(i < 10 ? 0 : 1);
    split.train.offsets.push_back(i + 1);
  }
  split.train.rows = x;
  bl::LogRegConfig c;
  c.l2 = 0.0;
  c.learning_rate = 0.1;
  c.epochs = 300;
  auto m = bl::train_logreg(split, c);
  auto probs = bl::predict_logreg(m.params, x);
  for (std::size_t i = 0; i < 20; ++i) CHECK((probs[i] >= 0.5) == (split.train.labels[i] == 1));
}

TEST_CASE("sequence sessions are averaged") {
  data::FeatureMatrix m;
  m.width = 2;
  m.rows = Matrix(3, 2, std::vector<double>{1, 0, 3, 2, 5, 5});
  m.offsets = {0, 2, 3};
  m.labels = {0, 1};
  auto means = bl::session_means(m);
  CHECK(means == Matrix(2, 2, std::vector<double>{2, 1, 5, 5}));
}

TEST_CASE("training is deterministic and beats chance") {
  auto split = generated_split();
  auto a = bl::train_logreg(split, {});
  auto b = bl::train_logreg(split, {});
  CHECK(a.params.w == b.params.w);
  CHECK(a.params.b == b.params.b);
  auto probs = bl::predict_logreg(a.params, bl::session_means(split.test));
  CHECK(intentforge::metrics::roc_auc(probs, split.test.labels).auc > 0.6);
  bl::LogRegConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bl::train_logreg(split, bad), intentforge::Error);
}

TEST_CASE("comparison table layout and digest guard") {
  auto split = generated_split();
  tr::TrainConfig c;
  c.max_epochs = 2;
  c.patience = 2;
  auto init = intentforge::nn::init_params(split.schema.state_size(), 3);
  auto model = tr::train(c, split, init).best;
  c.replay_enabled = c.exploration_enabled = false;
  auto lstm = tr::train(c, split, init).best;
  auto logreg = bl::train_logreg(split, {});
  auto table = bl::compare(model, logreg, lstm, split);
  REQUIRE(table.rows.size() == 8);
  CHECK(table.rows[0].model == "Logistic Regression");
  CHECK_FALSE(table.rows[1].available);
  CHECK_FALSE(table.rows[2].available);
  CHECK(table.rows[3].model == "LSTM");
  CHECK(table.rows[4].model == "Our Model (0.5)");
  CHECK(table.rows[7].model == "Our Model (0.9)");
  for (std::size_t i = 5; i < 8; ++i) CHECK(table.rows[i].auc == table.rows[4].auc);
  const auto csv = bl::comparison_csv(table);
  CHECK(csv.rfind("model,accuracy,precision,recall,f1,auc_roc\n", 0) == 0);
  CHECK(csv.find("Random Forest,n/a,n/a,n/a,n/a,n/a\n") != std::string::npos);
  CHECK(bl::format_comparison(table).find("AUC-ROC") != std::string::npos);

  logreg.schema_digest = std::string(64, '0');
  try {
    bl::compare(model, logreg, lstm, split);
    FAIL("expected incompatible artifacts");
  } catch (const intentforge::Error& e) {
    CHECK(e.kind() == intentforge::ErrorKind::IncompatibleArtifacts);
  }
}

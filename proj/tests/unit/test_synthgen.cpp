#include <doctest.h>

#include <map>
#include <sstream>

#include "intentforge/data/events.hpp"
#include "intentforge/data/session.hpp"
#include "intentforge/error.hpp"
#include "intentforge/synthgen/generator.hpp"

namespace sg = intentforge::synthgen;
namespace data = intentforge::data;

namespace {

sg::GeneratorConfig small(std::uint64_t seed = 1) {
  sg::GeneratorConfig c;
  c.n_users = 400;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("generated csv parses cleanly and matches the sidecar") {
  auto d = sg::generate(small());
  std::istringstream in(sg::events_csv(d));
  auto parsed = data::parse_events(in);
  CHECK(parsed.errors.empty());
  CHECK(parsed.events.size() == d.events.size());
  auto sessions = data::sessionize(parsed.events);
  REQUIRE(sessions.size() == d.truth.size());
  std::map<std::string, int> label;
  for (const auto& t : d.truth) label[t.session_id] = t.label;
  for (const auto& s : sessions) {
    CHECK(s.label == label.at(s.session_id));
    std::size_t purchases = 0;
    for (const auto& e : s.events) purchases += e.type == data::EventType::Purchase ? 1 : 0;
    CHECK(purchases == static_cast<std::size_t>(s.label));
    if (s.label == 1) {
      CHECK(s.events.back().type == data::EventType::Purchase);
      CHECK(s.events.back().event_time > s.events[s.events.size() - 2].event_time);
    }
  }
}

TEST_CASE("same seed gives identical bytes, another seed does not") {
  auto a = sg::events_csv(sg::generate(small(3)));
  auto b = sg::events_csv(sg::generate(small(3)));
  auto c = sg::events_csv(sg::generate(small(4)));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("calibrated positive rate") {
  sg::GeneratorConfig c;
  c.n_users = 12500;
  auto d = sg::generate(c);
  CHECK(d.truth.size() >= 50000);
  CHECK(d.positive_rate >= 0.1612);
  CHECK(d.positive_rate <= 0.1712);
}

TEST_CASE("zero coefficients with a very negative intercept give no positives") {
  auto c = small();
  c.coefficients = {0.0, 0.0, 0.0, 0.0};
  c.calibrate = false;
  c.intercept = -1e9;
  auto d = sg::generate(c);
  CHECK(d.positive_rate == 0.0);
  for (const auto& e : d.events) CHECK(e.type != data::EventType::Purchase);
  CHECK_THROWS_AS(sg::bayes_auc(d.truth), intentforge::Error);
}

TEST_CASE("unreachable rates fail calibration") {
  sg::GeneratorConfig c;
  c.n_users = 1;
  c.sessions_per_user = 0.01;
  c.target_rate = 0.5;
  try {
    sg::generate(c);
    FAIL("expected calibration error");
  } catch (const intentforge::Error& e) {
    CHECK(e.kind() == intentforge::ErrorKind::Calibration);
  }
}

TEST_CASE("bayes auc extremes") {
  std::vector<sg::TruthRecord> constant{{"a", 0.3, 1}, {"b", 0.3, 0}, {"c", 0.3, 0}};
  CHECK(sg::bayes_auc(constant) == 0.5);
  std::vector<sg::TruthRecord> hard{{"a", 0.9, 1}, {"b", 0.2, 0}, {"c", 0.7, 1}};
  CHECK(sg::bayes_auc(hard) == 1.0);
  auto d = sg::generate(small());
  const double auc = sg::bayes_auc(d.truth);
  CHECK(auc > 0.5);
  CHECK(auc <= 1.0);
}

TEST_CASE("truth sidecar round trip") {
  auto d = sg::generate(small());
  auto back = sg::truth_from_json(sg::truth_json(d.truth));
  REQUIRE(back.size() == d.truth.size());
  CHECK(back[5].session_id == d.truth[5].session_id);
  CHECK(back[5].propensity == d.truth[5].propensity);
  CHECK_THROWS_AS(sg::truth_from_json(nlohmann::json::parse(R"([{"session_id": 1}])")),
                  intentforge::Error);
}

TEST_CASE("config validation and json overrides") {
  sg::GeneratorConfig bad;
  bad.n_users = 0;
  CHECK_THROWS_AS(sg::generate(bad), intentforge::Error);
  bad = {};
  bad.target_rate = 1.0;
  CHECK_THROWS_AS(bad.validate(), intentforge::Error);

  auto c = sg::generator_config_from_json(
      nlohmann::json::parse(R"({"n_users": 7, "coefficients": {"log_price": 0.5}})"));
  CHECK(c.n_users == 7);
  CHECK(c.coefficients.log_price == 0.5);
  CHECK(c.coefficients.cart_events == sg::GeneratorConfig{}.coefficients.cart_events);
  try {
    sg::generator_config_from_json(nlohmann::json::parse(R"({"coefficients": {"color": 1}})"));
    FAIL("expected config error");
  } catch (const intentforge::Error& e) {
    CHECK(std::string(e.what()).find("coefficients.color") != std::string::npos);
  }
  try {
    sg::generator_config_from_json(nlohmann::json::parse(R"({"n_users": "many"})"));
    FAIL("expected config error");
  } catch (const intentforge::Error& e) {
    CHECK(std::string(e.what()).find("n_users") != std::string::npos);
  }
  auto round = sg::generator_config_from_json(sg::to_json(c));
  CHECK(sg::to_json(round) == sg::to_json(c));
}

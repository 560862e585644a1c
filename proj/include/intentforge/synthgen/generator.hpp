#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "intentforge/data/events.hpp"

namespace intentforge::synthgen {

/// Weights of the planted log-odds. Inputs are per session: number of cart
/// events, log of the mean price, duration in minutes and number of distinct
/// products, all computed over the events that precede the purchase.
struct Coefficients {
  double cart_events = 2.5;
  double log_price = -1.5;
  double duration_minutes = 0.3;
  double distinct_products = -0.8;
};

struct GeneratorConfig {
  std::size_t n_users = 2500;
  double sessions_per_user = 4.0;   // Poisson mean, at least 1
  double events_per_session = 5.0;  // geometric mean, at least 1
  std::size_t n_brands = 60;
  std::size_t n_categories = 30;
  std::size_t n_products = 1500;
  double price_mu = 3.5;
  double price_sigma = 1.0;
  double cart_probability = 0.15;
  double revisit_probability = 0.35;  // chance an event reuses a product already in the session
  double mean_gap_seconds = 45.0;
  double missing_category_rate = 0.25;
  double missing_brand_rate = 0.1;
  Coefficients coefficients;
  double intercept = 0.0;  // used as is when calibrate is false
  bool calibrate = true;
  double target_rate = 0.1662;
  std::uint64_t seed = 42;
  std::int64_t start_time = 1569888000;  // 2019-10-01 00:00:00 UTC

  /// Throws a config error naming the first offending field.
  void validate() const;
};

nlohmann::json to_json(const GeneratorConfig& c);
/// Missing keys keep their defaults; unknown keys are config errors.
GeneratorConfig generator_config_from_json(const nlohmann::json& j, const GeneratorConfig& base = {});

struct TruthRecord {
  std::string session_id;
  double propensity = 0.0;
  int label = 0;
};

struct GeneratedData {
  std::vector<data::RawEvent> events;  // sorted by event time, file order
  std::vector<TruthRecord> truth;      // session creation order
  double intercept = 0.0;
  double positive_rate = 0.0;
};

inline constexpr double kRateTolerance = 0.005;

GeneratedData generate(const GeneratorConfig& config);

std::string events_csv(const GeneratedData& d);
nlohmann::json truth_json(std::span<const TruthRecord> truth);
std::vector<TruthRecord> truth_from_json(const nlohmann::json& j);

/// AUC of the true propensities against the realized labels.
double bayes_auc(std::span<const TruthRecord> truth);

}  // namespace intentforge::synthgen

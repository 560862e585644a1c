#include "intentforge/synthgen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "intentforge/error.hpp"
#include "intentforge/matrix.hpp"
#include "intentforge/metrics/metrics.hpp"
#include "intentforge/rng.hpp"

namespace intentforge::synthgen {

namespace {

struct Product {
  std::string id;
  std::string category_id;
  std::optional<std::string> category_code;
  std::optional<std::string> brand;
  double price = 0.0;
};

struct Draft {
  std::string session_id;
  std::string user_id;
  std::vector<data::RawEvent> events;
  double log_odds = 0.0;  // without intercept
  double uniform = 0.0;
};

void positive(double v, const char* field) {
  require(std::isfinite(v) && v > 0.0, ErrorKind::Config,
          fmt::format("{} must be positive, got {}", field, v));
}

void probability(double v, const char* field) {
  require(v >= 0.0 && v <= 1.0, ErrorKind::Config,
          fmt::format("{} must be in [0,1], got {}", field, v));
}

std::vector<Product> make_catalog(const GeneratorConfig& c, Rng& rng) {
  std::uniform_int_distribution<std::size_t> cat(0, c.n_categories - 1);
  std::uniform_int_distribution<std::size_t> brand(0, c.n_brands - 1);
  std::lognormal_distribution<double> price(c.price_mu, c.price_sigma);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Product> catalog(c.n_products);
  for (std::size_t i = 0; i < c.n_products; ++i) {
    auto& p = catalog[i];
    const auto k = cat(rng);
    p.id = std::to_string(1000000 + i);
    p.category_id = std::to_string(2053013552000000000ULL + k);
    if (unit(rng) >= c.missing_category_rate) p.category_code = fmt::format("group{}.item{}", k % 7, k);
    if (unit(rng) >= c.missing_brand_rate) p.brand = fmt::format("brand{}", brand(rng));
    p.price = std::max(0.01, std::round(price(rng) * 100.0) / 100.0);
  }
  return catalog;
}

double realized_rate(const std::vector<Draft>& drafts, double intercept) {
  std::size_t positives = 0;
  for (const auto& d : drafts) positives += d.uniform < sigmoid(d.log_odds + intercept) ? 1 : 0;
  return static_cast<double>(positives) / static_cast<double>(drafts.size());
}

double calibrate(const std::vector<Draft>& drafts, double target) {
  double lo = -60.0, hi = 60.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double rate = realized_rate(drafts, mid);
    if (std::abs(rate - target) <= kRateTolerance) return mid;
    (rate < target ? lo : hi) = mid;
  }
  fail(ErrorKind::Calibration,
       fmt::format("no intercept brings the positive rate within {} of {} over {} sessions",
                   kRateTolerance, target, drafts.size()));
}

}  // namespace

void GeneratorConfig::validate() const {
  for (auto [v, name] : {std::pair{n_users, "n_users"}, {n_brands, "n_brands"},
                         {n_categories, "n_categories"}, {n_products, "n_products"}}) {
    require(v >= 1, ErrorKind::Config, fmt::format("{} must be at least 1", name));
  }
  positive(sessions_per_user, "sessions_per_user");
  require(events_per_session >= 1.0, ErrorKind::Config, "events_per_session must be at least 1");
  positive(price_sigma, "price_sigma");
  require(std::isfinite(price_mu), ErrorKind::Config, "price_mu must be finite");
  positive(mean_gap_seconds, "mean_gap_seconds");
  probability(cart_probability, "cart_probability");
  probability(revisit_probability, "revisit_probability");
  probability(missing_category_rate, "missing_category_rate");
  probability(missing_brand_rate, "missing_brand_rate");
  require(target_rate > 0.0 && target_rate < 1.0, ErrorKind::Config,
          fmt::format("target_rate must be in (0,1), got {}", target_rate));
}

nlohmann::json to_json(const GeneratorConfig& c) {
  return {{"n_users", c.n_users},
          {"sessions_per_user", c.sessions_per_user},
          {"events_per_session", c.events_per_session},
          {"n_brands", c.n_brands},
          {"n_categories", c.n_categories},
          {"n_products", c.n_products},
          {"price_mu", c.price_mu},
          {"price_sigma", c.price_sigma},
          {"cart_probability", c.cart_probability},
          {"revisit_probability", c.revisit_probability},
          {"mean_gap_seconds", c.mean_gap_seconds},
          {"missing_category_rate", c.missing_category_rate},
          {"missing_brand_rate", c.missing_brand_rate},
          {"coefficients",
           {{"cart_events", c.coefficients.cart_events},
            {"log_price", c.coefficients.log_price},
            {"duration_minutes", c.coefficients.duration_minutes},
            {"distinct_products", c.coefficients.distinct_products}}},
          {"intercept", c.intercept},
          {"calibrate", c.calibrate},
          {"target_rate", c.target_rate},
          {"seed", c.seed},
          {"start_time", c.start_time}};
}

GeneratorConfig generator_config_from_json(const nlohmann::json& j, const GeneratorConfig& base) {
  // Merge over the base serialization so unknown keys can be detected.
  nlohmann::json merged = to_json(base);
  require(j.is_object(), ErrorKind::Config, "generator config must be an object");
  for (const auto& [key, value] : j.items()) {
    require(merged.contains(key), ErrorKind::Config, "unknown generator key '" + key + "'");
    if (key == "coefficients") {
      require(value.is_object(), ErrorKind::Config, "coefficients must be an object");
      for (const auto& [ck, cv] : value.items()) {
        require(merged[key].contains(ck), ErrorKind::Config,
                "unknown generator key 'coefficients." + ck + "'");
        merged[key][ck] = cv;
      }
    } else {
      merged[key] = value;
    }
  }
  GeneratorConfig c;
  auto get = [&](const char* key, auto& out) {
    try {
      out = merged.at(key).get<std::remove_reference_t<decltype(out)>>();
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::Config, fmt::format("generator key '{}' has the wrong type", key));
    }
  };
  get("n_users", c.n_users);
  get("sessions_per_user", c.sessions_per_user);
  get("events_per_session", c.events_per_session);
  get("n_brands", c.n_brands);
  get("n_categories", c.n_categories);
  get("n_products", c.n_products);
  get("price_mu", c.price_mu);
  get("price_sigma", c.price_sigma);
  get("cart_probability", c.cart_probability);
  get("revisit_probability", c.revisit_probability);
  get("mean_gap_seconds", c.mean_gap_seconds);
  get("missing_category_rate", c.missing_category_rate);
  get("missing_brand_rate", c.missing_brand_rate);
  get("intercept", c.intercept);
  get("calibrate", c.calibrate);
  get("target_rate", c.target_rate);
  get("seed", c.seed);
  get("start_time", c.start_time);
  const auto& co = merged.at("coefficients");
  auto coef = [&](const char* key, double& out) {
    require(co.at(key).is_number(), ErrorKind::Config,
            fmt::format("generator key 'coefficients.{}' has the wrong type", key));
    out = co.at(key).get<double>();
  };
  coef("cart_events", c.coefficients.cart_events);
  coef("log_price", c.coefficients.log_price);
  coef("duration_minutes", c.coefficients.duration_minutes);
  coef("distinct_products", c.coefficients.distinct_products);
  return c;
}

GeneratedData generate(const GeneratorConfig& config) {
  config.validate();
  Rng rng = make_stream(config.seed, Stream::Generator);
  const auto catalog = make_catalog(config, rng);

  std::poisson_distribution<int> sessions_per_user(config.sessions_per_user);
  std::geometric_distribution<int> extra_events(1.0 / config.events_per_session);
  std::exponential_distribution<double> gap(1.0 / config.mean_gap_seconds);
  std::uniform_int_distribution<std::size_t> any_product(0, catalog.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kWindowSeconds = 30.0 * 24 * 3600;
  std::uniform_real_distribution<double> start_offset(0.0, kWindowSeconds);
  const auto& co = config.coefficients;

  std::vector<Draft> drafts;
  std::size_t session_counter = 0;
  for (std::size_t u = 0; u < config.n_users; ++u) {
    const std::string user_id = std::to_string(500000000 + u);
    const int n_sessions = std::max(1, sessions_per_user(rng));
    for (int s = 0; s < n_sessions; ++s) {
      Draft d;
      d.session_id = fmt::format("{:08x}-{:04x}", session_counter * 2654435761ULL % 0xffffffffULL,
                                 session_counter % 0x10000);
      ++session_counter;
      d.user_id = user_id;
      const int n_events = 1 + extra_events(rng);
      double t = static_cast<double>(config.start_time) + std::floor(start_offset(rng));
      std::vector<std::size_t> seen;
      int carts = 0;
      double price_sum = 0.0;
      for (int e = 0; e < n_events; ++e) {
        if (e > 0) t += std::ceil(gap(rng));
        std::size_t p;
        if (!seen.empty() && unit(rng) < config.revisit_probability) {
          p = seen[std::uniform_int_distribution<std::size_t>(0, seen.size() - 1)(rng)];
        } else {
          p = any_product(rng);
          seen.push_back(p);
        }
        const bool cart = unit(rng) < config.cart_probability;
        carts += cart ? 1 : 0;
        const auto& prod = catalog[p];
        price_sum += prod.price;
        d.events.push_back({static_cast<std::int64_t>(t),
                            cart ? data::EventType::Cart : data::EventType::View, prod.id,
                            prod.category_id, prod.category_code, prod.brand, prod.price, user_id,
                            d.session_id});
      }
      const std::set<std::string_view> distinct = [&] {
        std::set<std::string_view> ids;
        for (const auto& ev : d.events) ids.insert(ev.product_id);
        return ids;
      }();
      const double minutes =
          static_cast<double>(d.events.back().event_time - d.events.front().event_time) / 60.0;
      d.log_odds = co.cart_events * carts + co.log_price * std::log(price_sum / n_events) +
                   co.duration_minutes * minutes +
                   co.distinct_products * static_cast<double>(distinct.size());
      d.uniform = unit(rng);
      drafts.push_back(std::move(d));
    }
  }

  GeneratedData out;
  out.intercept = config.calibrate ? calibrate(drafts, config.target_rate) : config.intercept;
  std::size_t positives = 0;
  for (auto& d : drafts) {
    const double propensity = sigmoid(d.log_odds + out.intercept);
    const int label = d.uniform < propensity ? 1 : 0;
    positives += static_cast<std::size_t>(label);
    if (label == 1) {
      auto purchase = d.events.back();
      purchase.type = data::EventType::Purchase;
      purchase.event_time += 1 + static_cast<std::int64_t>(std::ceil(gap(rng)));
      d.events.push_back(std::move(purchase));
    }
    out.truth.push_back({d.session_id, propensity, label});
    for (auto& e : d.events) out.events.push_back(std::move(e));
  }
  out.positive_rate = static_cast<double>(positives) / static_cast<double>(drafts.size());
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const auto& a, const auto& b) { return a.event_time < b.event_time; });
  return out;
}

std::string events_csv(const GeneratedData& d) {
  std::ostringstream out;
  data::write_events_csv(out, d.events);
  return out.str();
}

nlohmann::json truth_json(std::span<const TruthRecord> truth) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : truth) {
    arr.push_back({{"session_id", t.session_id}, {"propensity", t.propensity}, {"label", t.label}});
  }
  return arr;
}

std::vector<TruthRecord> truth_from_json(const nlohmann::json& j) {
  std::vector<TruthRecord> out;
  try {
    for (const auto& r : j) {
      out.push_back({r.at("session_id").get<std::string>(), r.at("propensity").get<double>(),
                     r.at("label").get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("truth sidecar: ") + e.what());
  }
  return out;
}

double bayes_auc(std::span<const TruthRecord> truth) {
  std::vector<double> p;
  std::vector<int> y;
  for (const auto& t : truth) {
    p.push_back(t.propensity);
    y.push_back(t.label);
  }
  return metrics::roc_auc(p, y).auc;
}

}  // namespace intentforge::synthgen

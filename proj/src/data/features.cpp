#include "intentforge/data/features.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <set>

#include "intentforge/io/digest.hpp"

namespace intentforge::data {

namespace {

constexpr std::size_t kSequenceNumeric = 3;
constexpr std::size_t kFlatNumeric = 6;
constexpr int kSchemaVersion = 1;

Vocabulary fit_vocabulary(const std::map<std::string, std::size_t>& counts, std::size_t cap) {
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // Most frequent first; the map already ordered names, stable_sort keeps that on ties.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (std::size_t i = 0; i < ranked.size() && i < cap; ++i) v.values.push_back(ranked[i].first);
  return v;
}

void names_for(std::vector<std::string>& out, const std::string& prefix, const Vocabulary& v) {
  for (const auto& s : v.values) out.push_back(prefix + "=" + s);
  out.push_back(prefix + "=<missing>");
  out.push_back(prefix + "=<other>");
}

}  // namespace

std::string_view to_string(FeatureMode mode) noexcept {
  return mode == FeatureMode::Flat ? "flat" : "sequence";
}

FeatureMode parse_feature_mode(std::string_view text) {
  if (text == "flat") return FeatureMode::Flat;
  if (text == "sequence") return FeatureMode::Sequence;
  fail(ErrorKind::Config, "feature mode must be 'flat' or 'sequence', got '" +
                              std::string(text) + "'");
}

std::size_t Vocabulary::index_of(const std::optional<std::string>& value) const {
  if (!value) return missing_index();
  const auto it = std::find(values.begin(), values.end(), *value);
  return it == values.end() ? other_index() : static_cast<std::size_t>(it - values.begin());
}

std::size_t FeatureSchema::numeric_count() const noexcept {
  return mode == FeatureMode::Flat ? kFlatNumeric : kSequenceNumeric;
}

std::size_t FeatureSchema::numeric_offset() const noexcept {
  return kEventTypeCount + category_codes.width() + brands.width();
}

std::size_t FeatureSchema::state_size() const noexcept {
  return numeric_offset() + numeric_count();
}

std::vector<ColumnGroup> FeatureSchema::one_hot_groups() const {
  return {{"event_type", 0, kEventTypeCount},
          {"category_code", kEventTypeCount, category_codes.width()},
          {"brand", kEventTypeCount + category_codes.width(), brands.width()}};
}

std::vector<std::string> FeatureSchema::feature_names() const {
  std::vector<std::string> names;
  names.reserve(state_size());
  for (std::size_t t = 0; t < kEventTypeCount; ++t) {
    names.push_back("event_type=" + std::string(to_string(static_cast<EventType>(t))));
  }
  names_for(names, "category_code", category_codes);
  names_for(names, "brand", brands);
  if (mode == FeatureMode::Flat) {
    for (const char* n : {"price_mean", "price_max", "price_min", "session_duration",
                          "event_count", "distinct_product_ratio"}) {
      names.emplace_back(n);
    }
  } else {
    for (const char* n : {"price", "time_since_previous", "elapsed_in_session"}) {
      names.emplace_back(n);
    }
  }
  return names;
}

nlohmann::json FeatureSchema::to_json() const {
  nlohmann::json j;
  j["version"] = kSchemaVersion;
  j["mode"] = std::string(to_string(mode));
  j["vocab_cap"] = vocab_cap;
  j["event_types"] = {"view", "cart", "purchase"};
  j["category_code"] = category_codes.values;
  j["brand"] = brands.values;
  j["price_min"] = price_min;
  j["price_max"] = price_max;
  j["gap_max"] = gap_max;
  j["duration_max"] = duration_max;
  j["count_min"] = count_min;
  j["count_max"] = count_max;
  j["state_size"] = state_size();
  j["features"] = feature_names();
  return j;
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
  try {
    require(j.at("version").get<int>() == kSchemaVersion, ErrorKind::Format,
            "unsupported schema version");
    FeatureSchema s;
    s.mode = parse_feature_mode(j.at("mode").get<std::string>());
    s.vocab_cap = j.at("vocab_cap").get<std::size_t>();
    s.category_codes.values = j.at("category_code").get<std::vector<std::string>>();
    s.brands.values = j.at("brand").get<std::vector<std::string>>();
    s.price_min = j.at("price_min").get<double>();
    s.price_max = j.at("price_max").get<double>();
    s.gap_max = j.at("gap_max").get<double>();
    s.duration_max = j.at("duration_max").get<double>();
    s.count_min = j.at("count_min").get<double>();
    s.count_max = j.at("count_max").get<double>();
    require(j.at("state_size").get<std::size_t>() == s.state_size(), ErrorKind::Format,
            "schema state_size does not match its vocabularies");
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("schema json: ") + e.what());
  }
}

std::string FeatureSchema::digest() const { return io::sha256_hex(to_json().dump()); }

double min_max(double value, double lo, double hi) noexcept {
  if (!(hi > lo)) return 0.0;
  return std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
}

FeatureSchema build_schema(std::span<const Session> training, std::size_t vocab_cap,
                           FeatureMode mode) {
  FeatureSchema s;
  s.mode = mode;
  s.vocab_cap = vocab_cap;
  std::map<std::string, std::size_t> cat_counts;
  std::map<std::string, std::size_t> brand_counts;
  bool any = false;
  for (const auto& session : training) {
    if (session.events.empty()) continue;
    const double n = static_cast<double>(session.events.size());
    const double t0 = static_cast<double>(session.events.front().event_time);
    const double duration = static_cast<double>(session.events.back().event_time) - t0;
    if (!any) {
      s.price_min = s.price_max = session.events.front().price;
      s.count_min = s.count_max = n;
    }
    any = true;
    s.count_min = std::min(s.count_min, n);
    s.count_max = std::max(s.count_max, n);
    s.duration_max = std::max(s.duration_max, duration);
    for (std::size_t i = 0; i < session.events.size(); ++i) {
      const auto& e = session.events[i];
      s.price_min = std::min(s.price_min, e.price);
      s.price_max = std::max(s.price_max, e.price);
      if (i > 0) {
        s.gap_max = std::max(
            s.gap_max, static_cast<double>(e.event_time - session.events[i - 1].event_time));
      }
      if (e.category_code) ++cat_counts[*e.category_code];
      if (e.brand) ++brand_counts[*e.brand];
    }
  }
  require(any, ErrorKind::Fit, "build_schema: no training session has events");
  s.category_codes = fit_vocabulary(cat_counts, vocab_cap);
  s.brands = fit_vocabulary(brand_counts, vocab_cap);
  return s;
}

Matrix featurize(const Session& session, const FeatureSchema& schema) {
  require(!session.events.empty(), ErrorKind::Featurize,
          "session '" + session.session_id + "' has no events");
  const auto& events = session.events;
  const std::size_t width = schema.state_size();
  const std::size_t cat_off = kEventTypeCount;
  const std::size_t brand_off = cat_off + schema.category_codes.width();
  const std::size_t num_off = schema.numeric_offset();
  const double t0 = static_cast<double>(events.front().event_time);

  if (schema.mode == FeatureMode::Sequence) {
    Matrix rows(events.size(), width);
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& e = events[i];
      auto r = rows.row(i);
      r[static_cast<std::size_t>(e.type)] = 1.0;
      r[cat_off + schema.category_codes.index_of(e.category_code)] = 1.0;
      r[brand_off + schema.brands.index_of(e.brand)] = 1.0;
      const double t = static_cast<double>(e.event_time);
      const double gap = i == 0 ? 0.0 : t - static_cast<double>(events[i - 1].event_time);
      r[num_off + 0] = min_max(e.price, schema.price_min, schema.price_max);
      r[num_off + 1] = min_max(gap, 0.0, schema.gap_max);
      r[num_off + 2] = min_max(t - t0, 0.0, schema.duration_max);
    }
    return rows;
  }

  Matrix row(1, width);
  auto r = row.row(0);
  const double n = static_cast<double>(events.size());
  double price_sum = 0.0;
  double price_hi = events.front().price;
  double price_lo = events.front().price;
  std::set<std::string_view> products;
  for (const auto& e : events) {
    r[static_cast<std::size_t>(e.type)] += 1.0;
    r[cat_off + schema.category_codes.index_of(e.category_code)] += 1.0;
    r[brand_off + schema.brands.index_of(e.brand)] += 1.0;
    price_sum += e.price;
    price_hi = std::max(price_hi, e.price);
    price_lo = std::min(price_lo, e.price);
    products.insert(e.product_id);
  }
  for (std::size_t c = 0; c < num_off; ++c) r[c] /= n;
  const double duration = static_cast<double>(events.back().event_time) - t0;
  r[num_off + 0] = min_max(price_sum / n, schema.price_min, schema.price_max);
  r[num_off + 1] = min_max(price_hi, schema.price_min, schema.price_max);
  r[num_off + 2] = min_max(price_lo, schema.price_min, schema.price_max);
  r[num_off + 3] = min_max(duration, 0.0, schema.duration_max);
  r[num_off + 4] = min_max(n, schema.count_min, schema.count_max);
  r[num_off + 5] = static_cast<double>(products.size()) / n;
  return row;
}

Matrix FeatureMatrix::session_rows(std::size_t i) const {
  require(i < sessions(), ErrorKind::Index, "session index out of range");
  const std::size_t begin = offsets[i];
  const std::size_t count = offsets[i + 1] - begin;
  const auto first = rows.data().begin() + static_cast<std::ptrdiff_t>(begin * width);
  return Matrix(count, width,
                std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count * width)));
}

FeatureMatrix featurize_all(std::span<const Session> sessions, const FeatureSchema& schema) {
  std::vector<Matrix> parts(sessions.size());
  const auto n = static_cast<std::ptrdiff_t>(sessions.size());
  // Each session is independent; errors are collected per slot and the first
  // (by session order) is rethrown, so failures are reported deterministically.
  std::vector<std::exception_ptr> errors(sessions.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      parts[k] = featurize(sessions[k], schema);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  FeatureMatrix fm;
  fm.mode = schema.mode;
  fm.width = schema.state_size();
  std::size_t total = 0;
  for (const auto& p : parts) total += p.rows();
  std::vector<double> data;
  data.reserve(total * fm.width);
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    data.insert(data.end(), parts[i].data().begin(), parts[i].data().end());
    fm.offsets.push_back(fm.offsets.back() + parts[i].rows());
    fm.labels.push_back(sessions[i].label);
    fm.session_ids.push_back(sessions[i].session_id);
    fm.user_ids.push_back(sessions[i].user_id);
  }
  fm.rows = Matrix(total, fm.width, std::move(data));
  return fm;
}

}  // namespace intentforge::data

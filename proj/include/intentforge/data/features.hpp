#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "intentforge/data/session.hpp"
#include "intentforge/matrix.hpp"

namespace intentforge::data {

enum class FeatureMode { Flat, Sequence };

std::string_view to_string(FeatureMode mode) noexcept;
FeatureMode parse_feature_mode(std::string_view text);

/// Top-K values seen in training, followed by the 'missing' and 'other' buckets.
struct Vocabulary {
  std::vector<std::string> values;

  std::size_t width() const noexcept { return values.size() + 2; }
  std::size_t missing_index() const noexcept { return values.size(); }
  std::size_t other_index() const noexcept { return values.size() + 1; }
  std::size_t index_of(const std::optional<std::string>& value) const;
};

/// Contiguous block of columns that forms one one-hot (or occupancy) group.
struct ColumnGroup {
  std::string name;
  std::size_t offset = 0;
  std::size_t width = 0;
};

/// Fitted encoders. Column layout, in order:
///   event_type(3) | category_code(Vc) | brand(Vb) | numeric block
/// The numeric block is [price, gap, elapsed] per event in sequence mode and
/// [price_mean, price_max, price_min, duration, event_count, distinct_ratio]
/// per session in flat mode.
struct FeatureSchema {
  FeatureMode mode = FeatureMode::Flat;
  std::size_t vocab_cap = 500;
  Vocabulary category_codes;
  Vocabulary brands;
  double price_min = 0.0;
  double price_max = 0.0;
  double gap_max = 0.0;       // seconds between consecutive events
  double duration_max = 0.0;  // seconds from first to last event
  double count_min = 0.0;     // events per session
  double count_max = 0.0;

  std::size_t numeric_count() const noexcept;
  std::size_t state_size() const noexcept;
  std::size_t numeric_offset() const noexcept;
  std::vector<ColumnGroup> one_hot_groups() const;
  std::vector<std::string> feature_names() const;

  nlohmann::json to_json() const;
  static FeatureSchema from_json(const nlohmann::json& j);
  /// SHA-256 (hex) of the canonical JSON serialization.
  std::string digest() const;
};

/// Min-max scale into [0,1], clamped; a degenerate range maps to 0.
double min_max(double value, double lo, double hi) noexcept;

FeatureSchema build_schema(std::span<const Session> training, std::size_t vocab_cap,
                           FeatureMode mode);

/// One row (flat) or one row per event (sequence). Unseen categorical values
/// land in 'other'; an empty session is a featurize error.
Matrix featurize(const Session& session, const FeatureSchema& schema);

/// Session-major feature rows. In flat mode every session owns exactly one row;
/// in sequence mode session i owns rows [offsets[i], offsets[i+1]).
struct FeatureMatrix {
  FeatureMode mode = FeatureMode::Flat;
  std::size_t width = 0;
  Matrix rows;
  std::vector<std::size_t> offsets{0};
  std::vector<int> labels;
  std::vector<std::string> session_ids;
  std::vector<std::string> user_ids;

  std::size_t sessions() const noexcept { return labels.size(); }
  /// Copy of session i's rows (timesteps × width).
  Matrix session_rows(std::size_t i) const;
};

/// Featurizes every session (in parallel; output order is input order).
FeatureMatrix featurize_all(std::span<const Session> sessions, const FeatureSchema& schema);

}  // namespace intentforge::data

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "intentforge/data/events.hpp"
#include "intentforge/data/features.hpp"
#include "intentforge/data/split.hpp"

namespace intentforge::data {

struct PipelineOptions {
  std::size_t vocab_cap = 500;
  FeatureMode mode = FeatureMode::Flat;
  SplitFractions fractions = kDefaultFractions;
  std::uint64_t seed = 42;
};

struct PreparedData {
  DatasetSplit split;
  std::vector<RowError> row_errors;
  std::size_t events = 0;
  std::size_t sessions = 0;
  /// Sessions left with no events once cut before their first purchase.
  std::vector<std::string> excluded_sessions;
};

/// Sessionizes, truncates at the first purchase, drops sessions left empty,
/// splits by user, fits the schema on the training part and featurizes all
/// three parts.
PreparedData prepare(std::vector<RawEvent> events, const PipelineOptions& options);
PreparedData prepare(std::istream& csv, const PipelineOptions& options);

/// Sessionize + truncate + featurize with an already fitted schema (for
/// scoring new logs). Sessions empty after truncation are reported in
/// `excluded` and skipped.
FeatureMatrix featurize_log(std::vector<RawEvent> events, const FeatureSchema& schema,
                            std::vector<std::string>* excluded = nullptr);

}  // namespace intentforge::data

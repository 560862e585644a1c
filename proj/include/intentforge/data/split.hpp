#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "intentforge/data/features.hpp"
#include "intentforge/data/session.hpp"
#include "intentforge/nn/loss.hpp"

namespace intentforge::data {

using SplitFractions = std::array<double, 3>;
inline constexpr SplitFractions kDefaultFractions{0.8, 0.1, 0.1};

struct SessionSplit {
  std::vector<Session> train;
  std::vector<Session> validation;
  std::vector<Session> test;
};

/// Shuffles the distinct users with `seed` and walks them in that order,
/// sending a user to train while the sessions already placed are below
/// fractions[0]·N, to validation below (fractions[0]+fractions[1])·N, and to
/// test after that. All sessions of a user share a part; parts keep the input
/// session order. Fewer than three users is a split error.
SessionSplit split_by_user(std::vector<Session> sessions, SplitFractions fractions,
                           std::uint64_t seed);

struct DatasetSplit {
  FeatureSchema schema;
  FeatureMatrix train;
  FeatureMatrix validation;
  FeatureMatrix test;
  SplitFractions fractions = kDefaultFractions;
  std::uint64_t seed = 0;
};

/// w_c = N / (2·N_c). Single-class input is a degenerate-labels error.
nn::ClassWeights class_weights(std::span<const int> labels);

}  // namespace intentforge::data

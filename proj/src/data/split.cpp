#include "intentforge/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "intentforge/rng.hpp"

namespace intentforge::data {

SessionSplit split_by_user(std::vector<Session> sessions, SplitFractions fractions,
                           std::uint64_t seed) {
  const double total_fraction = fractions[0] + fractions[1] + fractions[2];
  require(fractions[0] > 0 && fractions[1] > 0 && fractions[2] > 0 &&
              std::abs(total_fraction - 1.0) <= 1e-9,
          ErrorKind::Split, "split fractions must be positive and sum to 1");

  std::map<std::string, std::size_t> per_user;
  for (const auto& s : sessions) ++per_user[s.user_id];
  require(per_user.size() >= 3, ErrorKind::Split,
          "need at least 3 users to split, got " + std::to_string(per_user.size()));

  std::vector<std::string> users;
  users.reserve(per_user.size());
  for (const auto& [u, _] : per_user) users.push_back(u);
  Rng rng = make_stream(seed, Stream::Split);
  std::shuffle(users.begin(), users.end(), rng);

  const double n = static_cast<double>(sessions.size());
  const double train_quota = fractions[0] * n;
  const double val_quota = (fractions[0] + fractions[1]) * n;
  std::map<std::string, int> part;
  std::array<std::size_t, 3> users_in{};
  std::size_t placed = 0;
  for (const auto& u : users) {
    const double before = static_cast<double>(placed);
    const int p = before < train_quota ? 0 : (before < val_quota ? 1 : 2);
    part[u] = p;
    ++users_in[static_cast<std::size_t>(p)];
    placed += per_user[u];
  }
  // Uneven activity can starve the tail parts; hand them the last users of
  // the shuffled order, taken from whichever part can spare one.
  for (int want : {2, 1}) {
    if (users_in[static_cast<std::size_t>(want)] > 0) continue;
    for (auto it = users.rbegin(); it != users.rend(); ++it) {
      const int from = part[*it];
      if (from != want && users_in[static_cast<std::size_t>(from)] > 1) {
        --users_in[static_cast<std::size_t>(from)];
        ++users_in[static_cast<std::size_t>(want)];
        part[*it] = want;
        break;
      }
    }
  }

  SessionSplit out;
  for (auto& s : sessions) {
    switch (part[s.user_id]) {
      case 0: out.train.push_back(std::move(s)); break;
      case 1: out.validation.push_back(std::move(s)); break;
      default: out.test.push_back(std::move(s)); break;
    }
  }
  return out;
}

nn::ClassWeights class_weights(std::span<const int> labels) {
  const auto positives =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = labels.size() - positives;
  require(positives > 0 && negatives > 0, ErrorKind::DegenerateLabels,
          "class weights need both classes (" + std::to_string(negatives) + " negative, " +
              std::to_string(positives) + " positive)");
  const double n = static_cast<double>(labels.size());
  return {n / (2.0 * static_cast<double>(negatives)), n / (2.0 * static_cast<double>(positives))};
}

}  // namespace intentforge::data

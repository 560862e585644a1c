#include "intentforge/data/pipeline.hpp"

#include <istream>

#include <spdlog/spdlog.h>

#include "intentforge/data/session.hpp"

namespace intentforge::data {

namespace {

std::vector<Session> truncated_sessions(std::vector<RawEvent> events,
                                        std::vector<std::string>& excluded) {
  std::vector<Session> kept;
  for (auto& s : sessionize(std::move(events))) {
    Session t = truncate_at_purchase(std::move(s));
    if (t.events.empty()) {
      excluded.push_back(t.session_id);
    } else {
      kept.push_back(std::move(t));
    }
  }
  return kept;
}

}  // namespace

PreparedData prepare(std::vector<RawEvent> events, const PipelineOptions& options) {
  PreparedData out;
  out.events = events.size();
  auto sessions = truncated_sessions(std::move(events), out.excluded_sessions);
  out.sessions = sessions.size() + out.excluded_sessions.size();
  spdlog::debug("{} sessions kept, {} empty after truncation", sessions.size(),
                out.excluded_sessions.size());

  auto parts = split_by_user(std::move(sessions), options.fractions, options.seed);
  auto& split = out.split;
  split.fractions = options.fractions;
  split.seed = options.seed;
  split.schema = build_schema(parts.train, options.vocab_cap, options.mode);
  split.train = featurize_all(parts.train, split.schema);
  split.validation = featurize_all(parts.validation, split.schema);
  split.test = featurize_all(parts.test, split.schema);
  return out;
}

PreparedData prepare(std::istream& csv, const PipelineOptions& options) {
  auto parsed = parse_events(csv);
  auto out = prepare(std::move(parsed.events), options);
  out.row_errors = std::move(parsed.errors);
  return out;
}

FeatureMatrix featurize_log(std::vector<RawEvent> events, const FeatureSchema& schema,
                            std::vector<std::string>* excluded) {
  std::vector<std::string> dropped;
  auto sessions = truncated_sessions(std::move(events), dropped);
  if (excluded) *excluded = std::move(dropped);
  return featurize_all(sessions, schema);
}

}  // namespace intentforge::data

#pragma once

#include <string>
#include <vector>

#include "intentforge/data/events.hpp"

namespace intentforge::data {

struct Session {
  std::string session_id;
  std::string user_id;
  std::vector<RawEvent> events;  // non-decreasing event_time
  int label = 0;                 // 1 iff the session contains a purchase
};

/// Groups events by user_session. Each group is stably sorted by time and the
/// groups are emitted by first event time (ties by first appearance in input).
/// A session id shared by two user ids is a session-integrity error.
std::vector<Session> sessionize(std::vector<RawEvent> events);

/// Keeps only the events strictly before the first purchase; label unchanged.
/// A session that opens with a purchase comes back empty.
Session truncate_at_purchase(Session session);

}  // namespace intentforge::data

#include "intentforge/data/session.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "intentforge/error.hpp"

namespace intentforge::data {

std::vector<Session> sessionize(std::vector<RawEvent> events) {
  std::vector<Session> sessions;
  std::unordered_map<std::string, std::size_t> slot;
  for (auto& ev : events) {
    auto [it, inserted] = slot.try_emplace(ev.user_session, sessions.size());
    if (inserted) {
      Session s;
      s.session_id = ev.user_session;
      s.user_id = ev.user_id;
      sessions.push_back(std::move(s));
    }
    Session& s = sessions[it->second];
    if (s.user_id != ev.user_id) {
      fail(ErrorKind::SessionIntegrity, "session '" + s.session_id + "' spans users '" +
                                            s.user_id + "' and '" + ev.user_id + "'");
    }
    s.events.push_back(std::move(ev));
  }
  for (auto& s : sessions) {
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const RawEvent& a, const RawEvent& b) { return a.event_time < b.event_time; });
    s.label = std::any_of(s.events.begin(), s.events.end(),
                          [](const RawEvent& e) { return e.type == EventType::Purchase; })
                  ? 1
                  : 0;
  }
  // Stable on first-appearance order, which is how `sessions` was built.
  std::stable_sort(sessions.begin(), sessions.end(), [](const Session& a, const Session& b) {
    return a.events.front().event_time < b.events.front().event_time;
  });
  return sessions;
}

Session truncate_at_purchase(Session session) {
  auto first = std::find_if(session.events.begin(), session.events.end(),
                            [](const RawEvent& e) { return e.type == EventType::Purchase; });
  session.events.erase(first, session.events.end());
  return session;
}

}  // namespace intentforge::data

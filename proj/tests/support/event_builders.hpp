#pragma once

#include <optional>
#include <string>
#include <vector>

#include "intentforge/data/events.hpp"

namespace builders {

using intentforge::data::EventType;
using intentforge::data::RawEvent;

inline RawEvent event(std::string session, std::string user, std::int64_t t, EventType type,
                      std::string product = "p1", double price = 10.0,
                      std::optional<std::string> brand = "acme",
                      std::optional<std::string> category = "electronics.audio") {
  RawEvent e;
  e.event_time = t;
  e.type = type;
  e.product_id = std::move(product);
  e.category_id = "1000";
  e.category_code = std::move(category);
  e.brand = std::move(brand);
  e.price = price;
  e.user_id = std::move(user);
  e.user_session = std::move(session);
  return e;
}

}  // namespace builders

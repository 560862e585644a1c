#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intentforge::data {

enum class EventType { View = 0, Cart = 1, Purchase = 2 };
inline constexpr std::size_t kEventTypeCount = 3;

std::string_view to_string(EventType type) noexcept;
std::optional<EventType> parse_event_type(std::string_view text) noexcept;

/// One clickstream row. event_time is seconds since the Unix epoch, UTC.
struct RawEvent {
  std::int64_t event_time = 0;
  EventType type = EventType::View;
  std::string product_id;
  std::string category_id;
  std::optional<std::string> category_code;
  std::optional<std::string> brand;
  double price = 0.0;
  std::string user_id;
  std::string user_session;
};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct ParseResult {
  std::vector<RawEvent> events;
  std::vector<RowError> errors;
};

inline constexpr std::string_view kCsvHeader =
    "event_time,event_type,product_id,category_id,category_code,brand,price,user_id,user_session";

/// Reads the event CSV. Columns are located by header name, so their order is
/// free; a missing column is a fatal schema error. Malformed rows are reported
/// with their line number and skipped.
ParseResult parse_events(std::istream& in);

/// "YYYY-MM-DD HH:MM:SS UTC" ⇄ epoch seconds.
std::optional<std::int64_t> parse_timestamp(std::string_view text) noexcept;
std::string format_timestamp(std::int64_t epoch_seconds);

/// Splits one CSV record; double quotes may wrap fields and "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line);

/// Serializes events in the canonical header order.
void write_events_csv(std::ostream& out, const std::vector<RawEvent>& events);

}  // namespace intentforge::data

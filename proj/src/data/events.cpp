#include "intentforge/data/events.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "intentforge/error.hpp"

namespace intentforge::data {

namespace {

constexpr std::array<std::string_view, 9> kColumns{
    "event_time", "event_type", "product_id", "category_id", "category_code",
    "brand",      "price",      "user_id",    "user_session"};

enum Column : std::size_t {
  kTime, kType, kProduct, kCategoryId, kCategoryCode, kBrand, kPrice, kUser, kSession
};

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::optional<std::string> optional_field(std::string field) {
  if (field.empty()) return std::nullopt;
  return field;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string_view to_string(EventType type) noexcept {
  switch (type) {
    case EventType::View: return "view";
    case EventType::Cart: return "cart";
    case EventType::Purchase: return "purchase";
  }
  return "view";
}

std::optional<EventType> parse_event_type(std::string_view text) noexcept {
  if (text == "view") return EventType::View;
  if (text == "cart") return EventType::Cart;
  if (text == "purchase") return EventType::Purchase;
  return std::nullopt;
}

std::optional<std::int64_t> parse_timestamp(std::string_view text) noexcept {
  // 2019-10-01 00:00:00 UTC
  if (text.size() != 23 || text[4] != '-' || text[7] != '-' || text[10] != ' ' ||
      text[13] != ':' || text[16] != ':' || text.substr(19) != " UTC") {
    return std::nullopt;
  }
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_number(text.substr(0, 4), y) || !parse_number(text.substr(5, 2), mo) ||
      !parse_number(text.substr(8, 2), d) || !parse_number(text.substr(11, 2), h) ||
      !parse_number(text.substr(14, 2), mi) || !parse_number(text.substr(17, 2), s)) {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  const auto tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
  return duration_cast<seconds>(tp.time_since_epoch()).count();
}

std::string format_timestamp(std::int64_t epoch_seconds) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{epoch_seconds}};
  const auto days = floor<std::chrono::days>(tp);
  const year_month_day ymd{days};
  const hh_mm_ss hms{tp - days};
  return fmt::format("{:04d}-{:02d}-{:02d} {:02d}:{:02d}:{:02d} UTC", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

ParseResult parse_events(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Schema, "input is empty; header row expected");
  const auto header = split_csv_line(trim_cr(line));
  std::array<std::size_t, kColumns.size()> index{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    std::size_t found = header.size();
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == kColumns[c]) found = h;
    }
    if (found == header.size()) {
      fail(ErrorKind::Schema, "missing column '" + std::string(kColumns[c]) + "' in header");
    }
    index[c] = found;
  }

  ParseResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim_cr(line);
    if (view.empty()) continue;
    auto fields = split_csv_line(view);
    auto error = [&](std::string msg) { result.errors.push_back({line_no, std::move(msg)}); };
    if (fields.size() != header.size()) {
      error("expected " + std::to_string(header.size()) + " fields, got " +
            std::to_string(fields.size()));
      continue;
    }
    RawEvent ev;
    const auto ts = parse_timestamp(fields[index[kTime]]);
    if (!ts) {
      error("unparseable event_time '" + fields[index[kTime]] + "'");
      continue;
    }
    ev.event_time = *ts;
    const auto type = parse_event_type(fields[index[kType]]);
    if (!type) {
      error("unknown event_type '" + fields[index[kType]] + "'");
      continue;
    }
    ev.type = *type;
    const std::string& price = fields[index[kPrice]];
    if (!parse_number(std::string_view(price), ev.price) || !std::isfinite(ev.price) ||
        ev.price < 0.0) {
      error("invalid price '" + price + "'");
      continue;
    }
    if (fields[index[kSession]].empty()) {
      error("empty user_session");
      continue;
    }
    ev.product_id = std::move(fields[index[kProduct]]);
    ev.category_id = std::move(fields[index[kCategoryId]]);
    ev.category_code = optional_field(std::move(fields[index[kCategoryCode]]));
    ev.brand = optional_field(std::move(fields[index[kBrand]]));
    ev.user_id = std::move(fields[index[kUser]]);
    ev.user_session = std::move(fields[index[kSession]]);
    result.events.push_back(std::move(ev));
  }
  return result;
}

void write_events_csv(std::ostream& out, const std::vector<RawEvent>& events) {
  out << kCsvHeader << '\n';
  for (const auto& e : events) {
    out << format_timestamp(e.event_time) << ',' << to_string(e.type) << ','
        << csv_escape(e.product_id) << ',' << csv_escape(e.category_id) << ','
        << csv_escape(e.category_code.value_or("")) << ',' << csv_escape(e.brand.value_or(""))
        << ',' << fmt::format("{}", e.price) << ',' << csv_escape(e.user_id) << ','
        << csv_escape(e.user_session) << '\n';
  }
}

}  // namespace intentforge::data

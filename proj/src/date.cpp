#include "phenollm/date.hpp"

#include <cctype>
#include <cstdio>

#include "phenollm/errors.hpp"

namespace phenollm {

namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t count) {
  if (from + count > s.size()) return false;
  for (std::size_t i = from; i < from + count; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok()) {
    throw MalformedDate(std::to_string(year) + "-" + std::to_string(month) +
                        "-" + std::to_string(day));
  }
  serial_ = std::chrono::sys_days{ymd};
}

Date Date::parse_iso(const std::string& text) {
  auto parsed = try_parse_iso(text);
  if (!parsed) throw MalformedDate(text);
  return *parsed;
}

std::optional<Date> Date::try_parse_iso(const std::string& text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!all_digits(text, 0, 4) || !all_digits(text, 5, 2) ||
      !all_digits(text, 8, 2)) {
    return std::nullopt;
  }
  const int y = std::stoi(text.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(text.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(text.substr(8, 2)));
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  Date out;
  out.serial_ = std::chrono::sys_days{ymd};
  return out;
}

std::string Date::iso() const {
  const std::chrono::year_month_day ymd{serial_};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

Date Date::plus_days(int n) const { return Date{serial_ + std::chrono::days{n}}; }

int Date::days_until(const Date& other) const {
  return static_cast<int>((other.serial_ - serial_).count());
}

int Date::year() const {
  return int(std::chrono::year_month_day{serial_}.year());
}

unsigned Date::month() const {
  return unsigned(std::chrono::year_month_day{serial_}.month());
}

unsigned Date::day() const {
  return unsigned(std::chrono::year_month_day{serial_}.day());
}

}  // namespace phenollm

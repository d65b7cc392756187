#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>

namespace phenollm {

// Calendar date stored as a day serial so arithmetic and ordering are cheap.
class Date {
 public:
  Date() = default;
  Date(int year, unsigned month, unsigned day);

  // "YYYY-MM-DD"; throws MalformedDate.
  static Date parse_iso(const std::string& text);
  static std::optional<Date> try_parse_iso(const std::string& text);

  std::string iso() const;
  Date plus_days(int n) const;
  // Signed day count from *this to other.
  int days_until(const Date& other) const;

  int year() const;
  unsigned month() const;
  unsigned day() const;

  auto operator<=>(const Date&) const = default;

 private:
  explicit Date(std::chrono::sys_days d) : serial_(d) {}
  std::chrono::sys_days serial_{};
};

}  // namespace phenollm

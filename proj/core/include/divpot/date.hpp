#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace divpot {

/// Calendar date, ordered. Text form is ISO-8601 `YYYY-MM-DD`.
class Date {
 public:
  constexpr Date() = default;
  explicit constexpr Date(std::chrono::sys_days days) : days_(days) {}

  /// Returns nullopt for anything that is not a valid `YYYY-MM-DD` date.
  static std::optional<Date> parse(std::string_view text);
  static Date from_ymd(int year, unsigned month, unsigned day);

  std::chrono::sys_days days() const { return days_; }
  std::string to_string() const;

  /// Next Monday-to-Friday date after this one.
  Date next_business_day() const;

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace divpot

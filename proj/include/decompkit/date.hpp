// Copyright 2026 The decompkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <regex>
#include <string>
#include <string_view>

namespace decompkit {

// Calendar date (no time of day). Ordered and subtractable in whole days.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days days) : days_(days) {}

  static std::optional<Date> from_ymd(int y, unsigned m, unsigned d) {
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return Date(std::chrono::sys_days{ymd});
  }

  // Days since 1970-01-01.
  long long day_number() const { return days_.time_since_epoch().count(); }

  std::string iso() const {
    const std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }

  Date plus_days(long long n) const { return Date(days_ + std::chrono::days{n}); }

  friend long long operator-(const Date& a, const Date& b) {
    return a.day_number() - b.day_number();
  }
  friend auto operator<=>(const Date&, const Date&) = default;
  friend bool operator==(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

// Accepts ISO-8601 calendar dates ("2019-01-05", optionally followed by a
// "T"/space time part) and RFC-2822 style timestamps ("Sat, 05 Jan 2019
// 10:00:00 +0000", "5 Jan 2019"). The date is taken as written; time zones
// are not applied. Anything else is rejected.
inline std::optional<Date> parse_date(std::string_view raw) {
  static const std::regex iso(
      R"(^\s*(\d{4})-(\d{2})-(\d{2})(?:[T ]\d{2}:\d{2}(?::\d{2}(?:\.\d+)?)?(?:Z|[+-]\d{2}:?\d{2})?)?\s*$)");
  static const std::regex rfc(
      R"(^\s*(?:(?:Mon|Tue|Wed|Thu|Fri|Sat|Sun),\s*)?(\d{1,2})\s+(Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec)\s+(\d{4})(?:\s+\d{2}:\d{2}(?::\d{2})?(?:\s+(?:[+-]\d{4}|UT|GMT|[A-Z]{3}))?)?\s*$)");
  const std::string s(raw);
  std::smatch m;
  if (std::regex_match(s, m, iso)) {
    return Date::from_ymd(std::stoi(m[1]), static_cast<unsigned>(std::stoi(m[2])),
                          static_cast<unsigned>(std::stoi(m[3])));
  }
  if (std::regex_match(s, m, rfc)) {
    static constexpr std::string_view months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                  "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    unsigned month = 0;
    for (unsigned i = 0; i < 12; ++i) {
      if (m[2].str() == months[i]) month = i + 1;
    }
    return Date::from_ymd(std::stoi(m[3]), month, static_cast<unsigned>(std::stoi(m[1])));
  }
  return std::nullopt;
}

}  // namespace decompkit

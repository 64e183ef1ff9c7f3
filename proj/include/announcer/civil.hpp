//
// Copyright (C) 2026 The Announcer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Calendar dates, fixed-point money, UTC timestamps and the campus time zone.

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace announcer {

class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int y, unsigned m, unsigned d);

  /// Strict "YYYY-MM-DD"; nullopt on anything else, including impossible dates.
  static std::optional<Date> parse(std::string_view text);

  std::string str() const;
  std::chrono::sys_days days() const { return days_; }
  std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{days_}; }

  Date plus_days(int n) const { return Date{days_ + std::chrono::days{n}}; }

  /// Whole days from `earlier` to this date; negative if `earlier` is later.
  int days_since(Date earlier) const { return static_cast<int>((days_ - earlier.days_).count()); }

  auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days days_{};
};

/// Non-negative or negative amount held as integer cents.
class Money {
 public:
  constexpr Money() = default;
  static constexpr Money cents(std::int64_t c) { Money m; m.cents_ = c; return m; }

  /// Accepts "250", "250.5", "250.00"; at most two decimals, no sign, no exponent.
  static std::optional<Money> parse(std::string_view text);

  std::string str() const;
  constexpr std::int64_t cents() const { return cents_; }

  constexpr Money operator+(Money o) const { return cents(cents_ + o.cents_); }
  constexpr Money operator-(Money o) const { return cents(cents_ - o.cents_); }
  constexpr Money operator*(std::int64_t n) const { return cents(cents_ * n); }
  constexpr auto operator<=>(const Money&) const = default;

 private:
  std::int64_t cents_ = 0;
};

using Timestamp = std::chrono::sys_seconds;

std::string format_iso8601(Timestamp t);                ///< "2010-03-01T02:00:00Z"
std::optional<Timestamp> parse_iso8601(std::string_view text);
std::string format_rfc5322(Timestamp t);                ///< "Mon, 01 Mar 2010 02:00:00 +0000"

/// "HH:MM" to minutes since midnight.
std::optional<int> parse_hhmm(std::string_view text);
std::string format_hhmm(int minutes);

/// Campus time zone. Either a fixed offset ("UTC", "UTC+08:00", "+0530") or an
/// IANA name such as "Asia/Kuala_Lumpur". IANA zones are resolved through the C
/// library, which makes the zone process-wide: constructing one sets TZ.
class TimeZone {
 public:
  TimeZone() = default;
  static TimeZone parse(std::string_view text);  // throws Error("BAD_TIMEZONE")
  static TimeZone utc() { return TimeZone{}; }

  Date local_date(Timestamp t) const;
  /// Minutes since local midnight at `t`.
  int local_minutes(Timestamp t) const;
  /// The UTC instant of local `date` at `minutes` past midnight.
  Timestamp to_utc(Date date, int minutes) const;

  const std::string& name() const { return name_; }

 private:
  std::string name_ = "UTC";
  std::optional<std::chrono::minutes> fixed_offset_ = std::chrono::minutes{0};
};

}  // namespace announcer

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

#include "announcer/civil.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <mutex>

#include "announcer/error.hpp"

namespace announcer {
namespace {

using namespace std::chrono;

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

// localtime_r/mktime read TZ; callers set it once per zone under this lock.
std::mutex& tz_mutex() {
  static std::mutex m;
  return m;
}

void activate_zone(const std::string& name) {
  static std::string active;
  if (active != name) {
    ::setenv("TZ", name.c_str(), 1);
    ::tzset();
    active = name;
  }
}

}  // namespace

Date::Date(int y, unsigned m, unsigned d)
    : days_(sys_days{year{y} / month{m} / day{d}}) {}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto ys = text.substr(0, 4), ms = text.substr(5, 2), ds = text.substr(8, 2);
  if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return std::nullopt;
  year_month_day ymd{year{to_int(ys)}, month{static_cast<unsigned>(to_int(ms))},
                     day{static_cast<unsigned>(to_int(ds))}};
  if (!ymd.ok()) return std::nullopt;
  return Date{sys_days{ymd}};
}

std::string Date::str() const {
  auto d = ymd();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::optional<Money> Money::parse(std::string_view text) {
  auto dot = text.find('.');
  auto whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? "" : text.substr(dot + 1);
  if (!all_digits(whole) || whole.size() > 15) return std::nullopt;
  if (dot != std::string_view::npos && (frac.empty() || frac.size() > 2 || !all_digits(frac)))
    return std::nullopt;
  std::int64_t c = 0;
  for (char ch : whole) c = c * 10 + (ch - '0');
  c *= 100;
  if (frac.size() >= 1) c += (frac[0] - '0') * 10;
  if (frac.size() == 2) c += frac[1] - '0';
  return Money::cents(c);
}

std::string Money::str() const {
  std::int64_t a = cents_ < 0 ? -cents_ : cents_;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", cents_ < 0 ? "-" : "",
                static_cast<long long>(a / 100), static_cast<long long>(a % 100));
  return buf;
}

std::string format_iso8601(Timestamp t) {
  auto dp = floor<days>(t);
  year_month_day ymd{dp};
  hh_mm_ss hms{t - dp};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()));
  return buf;
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  if (text.size() != 20 || text[10] != 'T' || text[19] != 'Z') return std::nullopt;
  auto date = Date::parse(text.substr(0, 10));
  if (!date) return std::nullopt;
  auto hh = text.substr(11, 2), mm = text.substr(14, 2), ss = text.substr(17, 2);
  if (text[13] != ':' || text[16] != ':' || !all_digits(hh) || !all_digits(mm) || !all_digits(ss))
    return std::nullopt;
  int h = to_int(hh), m = to_int(mm), s = to_int(ss);
  if (h > 23 || m > 59 || s > 60) return std::nullopt;
  return Timestamp{date->days()} + hours{h} + minutes{m} + seconds{s};
}

std::string format_rfc5322(Timestamp t) {
  static constexpr const char* kDays[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
  static constexpr const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                            "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  auto dp = floor<days>(t);
  year_month_day ymd{dp};
  weekday wd{dp};
  hh_mm_ss hms{t - dp};
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s, %02u %s %04d %02ld:%02ld:%02lld +0000", kDays[wd.c_encoding()],
                static_cast<unsigned>(ymd.day()), kMonths[static_cast<unsigned>(ymd.month()) - 1],
                static_cast<int>(ymd.year()), static_cast<long>(hms.hours().count()),
                static_cast<long>(hms.minutes().count()), static_cast<long long>(hms.seconds().count()));
  return buf;
}

std::optional<int> parse_hhmm(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto hh = text.substr(0, colon), mm = text.substr(colon + 1);
  if (hh.empty() || hh.size() > 2 || mm.size() != 2 || !all_digits(hh) || !all_digits(mm))
    return std::nullopt;
  int h = to_int(hh), m = to_int(mm);
  if (h > 23 || m > 59) return std::nullopt;
  return h * 60 + m;
}

std::string format_hhmm(int minutes) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

TimeZone TimeZone::parse(std::string_view text) {
  TimeZone tz;
  tz.name_ = std::string(text);
  std::string_view off = text;
  if (off.substr(0, 3) == "UTC" || off.substr(0, 3) == "GMT") off.remove_prefix(3);
  if (off.empty() || off == "Z") {
    tz.fixed_offset_ = minutes{0};
    return tz;
  }
  if (off[0] == '+' || off[0] == '-') {
    int sign = off[0] == '-' ? -1 : 1;
    std::string digits;
    for (char c : off.substr(1))
      if (c != ':') digits += c;
    if (!all_digits(digits) || (digits.size() != 2 && digits.size() != 4))
      throw Error("BAD_TIMEZONE", std::string(text));
    int h = to_int(std::string_view(digits).substr(0, 2));
    int m = digits.size() == 4 ? to_int(std::string_view(digits).substr(2, 2)) : 0;
    if (h > 14 || m > 59) throw Error("BAD_TIMEZONE", std::string(text));
    tz.fixed_offset_ = minutes{sign * (h * 60 + m)};
    return tz;
  }
  if (text.find('/') == std::string_view::npos || text.find("..") != std::string_view::npos)
    throw Error("BAD_TIMEZONE", std::string(text));
  const char* dir = std::getenv("TZDIR");
  if (!std::filesystem::is_regular_file(std::filesystem::path(dir && *dir ? dir : "/usr/share/zoneinfo") / text))
    throw Error("BAD_TIMEZONE", std::string(text) + ": no such zone in the tz database");
  tz.fixed_offset_.reset();
  return tz;
}

Date TimeZone::local_date(Timestamp t) const {
  if (fixed_offset_) return Date{floor<days>(t + *fixed_offset_)};
  std::lock_guard lock(tz_mutex());
  activate_zone(name_);
  std::time_t tt = t.time_since_epoch().count();
  std::tm tm{};
  ::localtime_r(&tt, &tm);
  return Date{tm.tm_year + 1900, static_cast<unsigned>(tm.tm_mon + 1), static_cast<unsigned>(tm.tm_mday)};
}

int TimeZone::local_minutes(Timestamp t) const {
  if (fixed_offset_) {
    auto local = t + *fixed_offset_;
    return static_cast<int>(duration_cast<minutes>(local - floor<days>(local)).count());
  }
  std::lock_guard lock(tz_mutex());
  activate_zone(name_);
  std::time_t tt = t.time_since_epoch().count();
  std::tm tm{};
  ::localtime_r(&tt, &tm);
  return tm.tm_hour * 60 + tm.tm_min;
}

Timestamp TimeZone::to_utc(Date date, int mins) const {
  if (fixed_offset_) return Timestamp{date.days()} + minutes{mins} - *fixed_offset_;
  std::lock_guard lock(tz_mutex());
  activate_zone(name_);
  auto ymd = date.ymd();
  std::tm tm{};
  tm.tm_year = static_cast<int>(ymd.year()) - 1900;
  tm.tm_mon = static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
  tm.tm_mday = static_cast<int>(static_cast<unsigned>(ymd.day()));
  tm.tm_hour = mins / 60;
  tm.tm_min = mins % 60;
  tm.tm_isdst = -1;
  return Timestamp{seconds{::mktime(&tm)}};
}

}  // namespace announcer

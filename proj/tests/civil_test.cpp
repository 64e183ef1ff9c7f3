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

#include <gtest/gtest.h>

#include "announcer/error.hpp"

namespace announcer {
namespace {

using namespace std::chrono;

TEST(Date, ParseAndFormat) {
  EXPECT_EQ(Date::parse("2010-02-15")->str(), "2010-02-15");
  EXPECT_FALSE(Date::parse("2010-02-30"));
  EXPECT_FALSE(Date::parse("2010-2-15"));
  EXPECT_FALSE(Date::parse("20100215"));
  EXPECT_TRUE(Date::parse("2012-02-29"));
}

TEST(Date, DaysSince) {
  // Feb 2010 has 28 days: 15 -> 28 is 13, +1 to Mar 1.
  EXPECT_EQ(Date::parse("2010-03-01")->days_since(*Date::parse("2010-02-15")), 14);
  EXPECT_EQ(Date::parse("2010-02-15")->days_since(*Date::parse("2010-03-01")), -14);
  EXPECT_EQ(Date(2012, 3, 1).days_since(Date(2012, 2, 28)), 2);
}

TEST(Money, ParseFormat) {
  EXPECT_EQ(Money::parse("250.00")->cents(), 25000);
  EXPECT_EQ(Money::parse("250")->cents(), 25000);
  EXPECT_EQ(Money::parse("0.5")->cents(), 50);
  EXPECT_FALSE(Money::parse("-1"));
  EXPECT_FALSE(Money::parse("1.234"));
  EXPECT_FALSE(Money::parse("1e3"));
  EXPECT_FALSE(Money::parse(""));
  EXPECT_FALSE(Money::parse("5."));
  EXPECT_EQ(Money::cents(500).str(), "5.00");
  EXPECT_EQ(Money::cents(-1).str(), "-0.01");
}

TEST(Timestamps, Iso8601RoundTrip) {
  auto t = parse_iso8601("2010-03-01T02:00:00Z");
  ASSERT_TRUE(t);
  EXPECT_EQ(format_iso8601(*t), "2010-03-01T02:00:00Z");
  EXPECT_FALSE(parse_iso8601("2010-03-01 02:00:00"));
}

TEST(Timestamps, Rfc5322) {
  EXPECT_EQ(format_rfc5322(*parse_iso8601("2010-03-01T02:05:09Z")), "Mon, 01 Mar 2010 02:05:09 +0000");
}

TEST(Timestamps, Hhmm) {
  EXPECT_EQ(parse_hhmm("02:00"), 120);
  EXPECT_EQ(parse_hhmm("9:30"), 570);
  EXPECT_FALSE(parse_hhmm("24:00"));
  EXPECT_FALSE(parse_hhmm("0230"));
  EXPECT_EQ(format_hhmm(570), "09:30");
}

TEST(TimeZone, FixedOffsetDateRollsOver) {
  auto tz = TimeZone::parse("UTC+08:00");
  auto t = *parse_iso8601("2010-02-28T18:30:00Z");  // 02:30 next day in +08
  EXPECT_EQ(tz.local_date(t).str(), "2010-03-01");
  EXPECT_EQ(tz.local_minutes(t), 150);
  EXPECT_EQ(tz.to_utc(*Date::parse("2010-03-01"), 150), t);
}

TEST(TimeZone, IanaZone) {
  auto tz = TimeZone::parse("Asia/Kuala_Lumpur");
  auto t = *parse_iso8601("2010-02-28T18:30:00Z");
  EXPECT_EQ(tz.local_date(t).str(), "2010-03-01");
  EXPECT_EQ(tz.to_utc(*Date::parse("2010-03-01"), 150), t);
}

TEST(TimeZone, Rejects) {
  EXPECT_THROW(TimeZone::parse("+25:00"), Error);
  EXPECT_THROW(TimeZone::parse("nonsense"), Error);
}

}  // namespace
}  // namespace announcer

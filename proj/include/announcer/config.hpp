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

// announcer.conf: flat `key = value` lines, '#' starts a comment.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "announcer/civil.hpp"

namespace announcer {

struct Config {
  std::string db_path = "announcer.db";
  std::string listen_addr = "127.0.0.1:8080";
  std::string smsc_host = "127.0.0.1";
  std::uint16_t smsc_port = 2775;
  std::string smsc_system_id = "announcer";
  std::string smsc_password = "secret";
  std::string source_addr = "ANNOUNCER";
  std::size_t window_size = 10;
  double throttle = 10;
  std::string default_country = "+60";
  std::string timezone = "Asia/Kuala_Lumpur";
  int cooldown_days = 7;
  Money fine_rate_per_day = Money::cents(50);
  Money fine_cap = Money::cents(5000);
  std::string spool_dir = "spool";
  std::optional<int> autorun_fees_at = 2 * 60;  ///< minutes past local midnight; nullopt disables
  std::optional<int> autorun_library_at = 2 * 60 + 30;
  bool suppress_empty = true;
  std::string email_from = "noreply@campus.example";
  std::string templates_path;  ///< empty: built-in templates
  std::string channel_policy = "SMS_FIRST";
  std::chrono::seconds session_ttl = std::chrono::hours(8);
  std::string console_dir;  ///< static console assets served at /; empty: none

  /// Parses `text`; relative paths are resolved against `base_dir`.
  /// Throws Error("BAD_CONFIG") naming the offending line.
  static Config parse(const std::string& text, const std::filesystem::path& base_dir = {});
  /// Throws Error("CONFIG_NOT_FOUND") or Error("BAD_CONFIG").
  static Config load(const std::filesystem::path& path);
  /// `explicit_path` if given, else $ANNOUNCER_CONFIG, else ./announcer.conf.
  static std::filesystem::path resolve_path(const std::optional<std::string>& explicit_path);

  /// "host:port" split of listen_addr. Throws Error("BAD_CONFIG").
  std::pair<std::string, std::uint16_t> listen_endpoint() const;
};

}  // namespace announcer

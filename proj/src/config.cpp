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

#include "announcer/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "announcer/error.hpp"

namespace announcer {

namespace {

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  if (!(in >> out) || !in.eof()) throw Error("BAD_CONFIG", key + ": not a number: " + v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw Error("BAD_CONFIG", key + ": expected true or false");
}

std::string resolve(const std::filesystem::path& base, const std::string& v) {
  if (v.empty() || base.empty()) return v;
  std::filesystem::path p(v);
  return p.is_absolute() ? v : (base / p).lexically_normal().string();
}

}  // namespace

Config Config::parse(const std::string& text, const std::filesystem::path& base_dir) {
  Config c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto cadence = [](std::optional<int>& slot) {
    return [&slot](const std::string& k, const std::string& v) {
      if (v.empty() || v == "off") {
        slot.reset();
        return;
      }
      auto m = parse_hhmm(v);
      if (!m) throw Error("BAD_CONFIG", k + ": expected HH:MM");
      slot = *m;
    };
  };
  auto money = [](Money& slot) {
    return [&slot](const std::string& k, const std::string& v) {
      auto m = Money::parse(v);
      if (!m) throw Error("BAD_CONFIG", k + ": expected an amount like 0.50");
      slot = *m;
    };
  };
  auto str = [](std::string& slot) { return [&slot](const std::string&, const std::string& v) { slot = v; }; };
  auto path = [&](std::string& slot) {
    return [&slot, &base_dir](const std::string&, const std::string& v) { slot = resolve(base_dir, v); };
  };

  const std::map<std::string, Setter> setters = {
      {"db_path", path(c.db_path)},
      {"listen_addr", str(c.listen_addr)},
      {"smsc_host", str(c.smsc_host)},
      {"smsc_port",
       [&](auto& k, auto& v) {
         auto p = parse_number<int>(k, v);
         if (p < 1 || p > 65535) throw Error("BAD_CONFIG", k + ": out of range");
         c.smsc_port = static_cast<std::uint16_t>(p);
       }},
      {"smsc_system_id", str(c.smsc_system_id)},
      {"smsc_password", str(c.smsc_password)},
      {"source_addr", str(c.source_addr)},
      {"window_size",
       [&](auto& k, auto& v) {
         auto n = parse_number<long>(k, v);
         if (n < 1) throw Error("BAD_CONFIG", k + ": must be at least 1");
         c.window_size = static_cast<std::size_t>(n);
       }},
      {"throttle",
       [&](auto& k, auto& v) {
         c.throttle = parse_number<double>(k, v);
         if (c.throttle < 1) throw Error("BAD_CONFIG", k + ": must be at least 1");
       }},
      {"default_country", str(c.default_country)},
      {"timezone", str(c.timezone)},
      {"cooldown_days",
       [&](auto& k, auto& v) {
         c.cooldown_days = parse_number<int>(k, v);
         if (c.cooldown_days < 0) throw Error("BAD_CONFIG", k + ": negative");
       }},
      {"fine_rate_per_day", money(c.fine_rate_per_day)},
      {"fine_cap", money(c.fine_cap)},
      {"spool_dir", path(c.spool_dir)},
      {"autorun_fees_at", cadence(c.autorun_fees_at)},
      {"autorun_library_at", cadence(c.autorun_library_at)},
      {"suppress_empty", [&](auto& k, auto& v) { c.suppress_empty = parse_bool(k, v); }},
      {"email_from", str(c.email_from)},
      {"templates_path", path(c.templates_path)},
      {"channel_policy", str(c.channel_policy)},
      {"console_dir", path(c.console_dir)},
      {"session_hours",
       [&](auto& k, auto& v) {
         auto h = parse_number<int>(k, v);
         if (h < 1) throw Error("BAD_CONFIG", k + ": must be at least 1");
         c.session_ttl = std::chrono::hours(h);
       }},
  };

  c.db_path = resolve(base_dir, c.db_path);
  c.spool_dir = resolve(base_dir, c.spool_dir);

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("BAD_CONFIG", "line " + std::to_string(lineno) + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw Error("BAD_CONFIG", "line " + std::to_string(lineno) + ": unknown key " + key);
    it->second(key, value);
  }
  TimeZone::parse(c.timezone);  // fail early on a bad zone
  c.listen_endpoint();
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("CONFIG_NOT_FOUND", path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = path.parent_path();
  return parse(ss.str(), base.empty() ? std::filesystem::path(".") : base);
}

std::filesystem::path Config::resolve_path(const std::optional<std::string>& explicit_path) {
  if (explicit_path && !explicit_path->empty()) return *explicit_path;
  if (const char* env = std::getenv("ANNOUNCER_CONFIG"); env && *env) return env;
  return "announcer.conf";
}

std::pair<std::string, std::uint16_t> Config::listen_endpoint() const {
  auto colon = listen_addr.rfind(':');
  if (colon == std::string::npos) throw Error("BAD_CONFIG", "listen_addr: expected host:port");
  auto port = parse_number<int>("listen_addr", listen_addr.substr(colon + 1));
  if (port < 0 || port > 65535) throw Error("BAD_CONFIG", "listen_addr: port out of range");
  return {listen_addr.substr(0, colon), static_cast<std::uint16_t>(port)};
}

}  // namespace announcer

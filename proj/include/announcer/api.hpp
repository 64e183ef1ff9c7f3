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

// HTTP/JSON facade: bearer-token sessions, a role matrix over an endpoint
// table, and JSON views of the registry and notifier. handle() is
// transport-free so tests can drive it without sockets.

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "announcer/notifier.hpp"
#include "json.hpp"

namespace announcer::api {

using json = nlohmann::json;

struct SessionToken {
  std::string token;  ///< 128 bits from the CSPRNG, hex
  std::string staff_id;
  Role role = Role::kLecturer;
  Timestamp expires_at{};
};

class TokenStore {
 public:
  TokenStore(Clock clock, std::chrono::seconds ttl) : clock_(std::move(clock)), ttl_(ttl) {}
  SessionToken mint(const std::string& staff_id, Role role);
  /// nullopt for unknown or expired tokens; expired ones are forgotten.
  std::optional<SessionToken> lookup(const std::string& token);
  void revoke(const std::string& token);

 private:
  Clock clock_;
  std::chrono::seconds ttl_;
  std::mutex mu_;
  std::map<std::string, SessionToken> tokens_;
};

struct Request {
  std::string method;  ///< "GET" or "POST"
  std::string path;
  std::map<std::string, std::string> query;
  std::string authorization;  ///< raw Authorization header
  std::string body;
};

struct Response {
  int status = 200;
  json body;
};

struct EndpointDoc {
  std::string method;
  std::string path;  ///< with {param} segments
  std::string summary;
  bool auth = true;
  bool mutating = false;
  std::vector<Role> roles;  ///< empty: any signed-in staff
};

/// HTTP status for an error code name.
int status_for(const std::string& code);

json to_json(const Student& s);
json to_json(const OutboundMessage& m);
json to_json(const Batch& b, bool with_messages);
json to_json(const DispatchReport& r);

class Service {
 public:
  struct Options {
    std::chrono::seconds token_ttl = std::chrono::hours(8);
    std::string console_dir;  ///< static files served at / when set
  };

  /// `dispatcher` may be null, in which case approved batches wait for a
  /// later dispatch.
  Service(Notifier& notifier, Dispatcher* dispatcher, Options options);
  Service(Notifier& notifier, Dispatcher* dispatcher) : Service(notifier, dispatcher, Options{}) {}
  ~Service();

  Response handle(const Request& req);

  /// Binds and serves on a background thread; returns the bound port.
  /// Throws Error("LISTEN_FAILED").
  std::uint16_t start(const std::string& host, std::uint16_t port);
  void stop();

  TokenStore& tokens() { return tokens_; }

  static const std::vector<EndpointDoc>& endpoints();
  /// OpenAPI 3 description generated from endpoints().
  static json openapi();

 private:
  struct Ctx;
  struct Route;
  using Handler = Response (Service::*)(Ctx&);

  Response login(Ctx&);
  Response logout(Ctx&);
  Response me(Ctx&);
  Response students(Ctx&);
  Response courses(Ctx&);
  Response announce(Ctx&);
  Response scan_fees(Ctx&);
  Response scan_loans(Ctx&);
  Response create_batch(Ctx&);
  Response list_batches(Ctx&);
  Response get_batch(Ctx&);
  Response approve(Ctx&);
  Response reject(Ctx&);
  Response decide(Ctx&, Decision decision);
  Response trigger(Ctx&);
  Response report(Ctx&);

  static const std::vector<Route>& routes();
  Batch visible_batch(Ctx& ctx);
  Date as_of_param(const Ctx& ctx) const;

  Notifier& notifier_;
  Dispatcher* dispatcher_;
  Options options_;
  TokenStore tokens_;
  std::string dummy_salt_;
  std::string dummy_hash_;

  struct Http;
  std::unique_ptr<Http> http_;
};

}  // namespace announcer::api

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

#include <memory>

#include "announcer/api.hpp"
#include "announcer/config.hpp"
#include "announcer/gateway.hpp"
#include "announcer/notifier.hpp"
#include "announcer/scheduler.hpp"

namespace announcer {

/// The long-running service: registry, SMPP session, dispatcher, scheduler
/// and HTTP API wired from one Config.
class App {
 public:
  explicit App(Config cfg, Clock clock = system_now);
  ~App();

  /// Opens the database, resumes unfinished dispatches and starts serving.
  /// Returns the bound API port.
  std::uint16_t start();
  void stop();

  Notifier& notifier() { return *notifier_; }
  api::Service& service() { return *service_; }

 private:
  Config cfg_;
  Clock clock_;
  std::shared_ptr<Registry> registry_;
  std::unique_ptr<Notifier> notifier_;
  std::unique_ptr<gateway::ReconnectingSender> sender_;
  std::unique_ptr<Dispatcher> dispatcher_;
  std::unique_ptr<Scheduler> scheduler_;
  std::unique_ptr<api::Service> service_;
};

gateway::SessionConfig session_config(const Config& cfg);

}  // namespace announcer

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

#include "app.hpp"

#include <spdlog/spdlog.h>

#include "announcer/database.hpp"
#include "announcer/registry.hpp"

namespace announcer {

gateway::SessionConfig session_config(const Config& cfg) {
  gateway::SessionConfig s;
  s.host = cfg.smsc_host;
  s.port = cfg.smsc_port;
  s.system_id = cfg.smsc_system_id;
  s.password = cfg.smsc_password;
  s.source_addr = cfg.source_addr;
  s.window_size = cfg.window_size;
  s.throttle = cfg.throttle;
  return s;
}

App::App(Config cfg, Clock clock) : cfg_(std::move(cfg)), clock_(std::move(clock)) {}

App::~App() { stop(); }

std::uint16_t App::start() {
  auto [host, port] = cfg_.listen_endpoint();
  registry_ = std::make_shared<Registry>(std::make_shared<Database>(cfg_.db_path), cfg_.default_country);
  auto templates = cfg_.templates_path.empty() ? TemplateSet{} : TemplateSet::load(cfg_.templates_path);
  notifier_ = std::make_unique<Notifier>(registry_, NotifierConfig::from(cfg_), std::move(templates), clock_);

  auto session = session_config(cfg_);
  session.validate();
  sender_ = std::make_unique<gateway::ReconnectingSender>(session, [this](const smpp::Receipt& r) {
    try {
      notifier_->on_receipt(r);
    } catch (const std::exception& e) {
      spdlog::error("receipt {}: {}", r.message_id, e.what());
    }
  });
  dispatcher_ = std::make_unique<Dispatcher>(*notifier_, *sender_);
  for (auto id : notifier_->unfinished_batches()) {
    spdlog::info("resuming dispatch of batch {}", id);
    dispatcher_->enqueue(id);
  }

  scheduler_ = std::make_unique<Scheduler>(
      *notifier_, cfg_.autorun_fees_at, cfg_.autorun_library_at, [](const Batch& b) {
        spdlog::info("autorun {} produced batch {} with {} messages, awaiting approval", to_string(b.kind),
                     b.batch_id, b.messages.size());
      });
  scheduler_->start();

  api::Service::Options opts;
  opts.token_ttl = cfg_.session_ttl;
  opts.console_dir = cfg_.console_dir;
  service_ = std::make_unique<api::Service>(*notifier_, dispatcher_.get(), opts);
  return service_->start(host, port);
}

void App::stop() {
  if (service_) service_->stop();
  if (scheduler_) scheduler_->stop();
  if (dispatcher_) dispatcher_->stop();
  if (sender_) sender_->close();
  service_.reset();
  scheduler_.reset();
  dispatcher_.reset();
  sender_.reset();
  notifier_.reset();
  registry_.reset();
}

}  // namespace announcer

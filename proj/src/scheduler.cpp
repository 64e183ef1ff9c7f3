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

#include "announcer/scheduler.hpp"

#include <spdlog/spdlog.h>

#include "announcer/error.hpp"

namespace announcer {

Scheduler::Scheduler(Notifier& notifier, std::optional<int> fees_at, std::optional<int> library_at, OnBatch on_batch)
    : notifier_(notifier), fees_at_(fees_at), library_at_(library_at), on_batch_(std::move(on_batch)) {}

Scheduler::~Scheduler() { stop(); }

bool Scheduler::due(const TimeZone& tz, int at, Timestamp from, Timestamp to) {
  if (to <= from) return false;
  // Walk from the day before `from` so offsets never hide a cadence point.
  for (auto d = tz.local_date(from).plus_days(-1); d <= tz.local_date(to); d = d.plus_days(1)) {
    auto instant = tz.to_utc(d, at);
    if (instant > from && instant <= to) return true;
  }
  return false;
}

int Scheduler::poll(Timestamp now) {
  std::lock_guard lock(poll_mu_);
  if (!last_poll_) {
    last_poll_ = now;
    return 0;
  }
  auto from = *last_poll_;
  last_poll_ = std::max(from, now);
  int fired = 0;
  const auto& tz = notifier_.config().tz;
  for (auto [kind, at] : {std::pair{AutorunKind::kFees, fees_at_}, std::pair{AutorunKind::kLibrary, library_at_}}) {
    if (!at || !due(tz, *at, from, now)) continue;
    ++fired;
    try {
      auto batch = notifier_.autorun_tick(kind, now);
      if (batch && on_batch_) on_batch_(*batch);
    } catch (const Error& e) {
      if (e.code() == "TICK_IN_PROGRESS")
        spdlog::warn("autorun {}: previous tick still running, skipped", to_string(kind));
      else
        spdlog::error("autorun {} failed: {}", to_string(kind), e.what());
    }
  }
  return fired;
}

void Scheduler::start(std::chrono::milliseconds period) {
  std::lock_guard lock(mu_);
  if (thread_.joinable()) return;
  stopping_ = false;
  thread_ = std::thread([this, period] {
    std::unique_lock lk(mu_);
    while (!stopping_) {
      lk.unlock();
      poll(notifier_.now());
      lk.lock();
      cv_.wait_for(lk, period, [&] { return stopping_; });
    }
  });
}

void Scheduler::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

}  // namespace announcer

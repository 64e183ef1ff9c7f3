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

// Daily Autorun cadence. poll(now) fires a kind once when its local HH:MM
// falls in (previous poll, now]; the first poll only sets the baseline.

#include <condition_variable>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include "announcer/notifier.hpp"

namespace announcer {

class Scheduler {
 public:
  /// Called with each batch an autorun produced.
  using OnBatch = std::function<void(const Batch&)>;

  Scheduler(Notifier& notifier, std::optional<int> fees_at, std::optional<int> library_at, OnBatch on_batch = {});
  ~Scheduler();

  /// Runs due ticks synchronously; returns how many fired.
  int poll(Timestamp now);

  /// Polls every `period` on a background thread using the notifier's clock.
  void start(std::chrono::milliseconds period = std::chrono::seconds(1));
  void stop();

  /// True if local time `at` on some day lands in (from, to].
  static bool due(const TimeZone& tz, int at, Timestamp from, Timestamp to);

 private:
  Notifier& notifier_;
  std::optional<int> fees_at_;
  std::optional<int> library_at_;
  OnBatch on_batch_;
  std::optional<Timestamp> last_poll_;
  std::mutex poll_mu_;

  std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace announcer

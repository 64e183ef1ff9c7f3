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

// Deterministic fake SMSC for tests and demos. Accepts binds, acknowledges
// submit_sm with increasing decimal message ids, reassembles concatenated
// messages into a ledger, sends delivery receipts, and injects faults.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "announcer/civil.hpp"
#include "announcer/net.hpp"
#include "announcer/smpp/codec.hpp"

namespace announcer::sim {

struct SimConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  ///< 0 picks an ephemeral port
  std::vector<std::pair<std::string, std::string>> accounts = {{"announcer", "secret"}};
  int ack_latency_min_ms = 0;
  int ack_latency_max_ms = 0;  ///< uniform in [min, max]
  double drop_resp_rate = 0.0;
  std::optional<std::uint32_t> reject_status;
  int receipt_delay_ms = 50;
  smpp::ReceiptStat receipt_stat = smpp::ReceiptStat::kDelivered;
  std::uint64_t rng_seed = 1;

  /// Throws Error("BAD_CONFIG") for probabilities outside [0, 1] or min > max latency.
  void validate() const;
};

struct LedgerEntry {
  std::uint32_t seq = 0;  ///< sequence_number of the first segment's submit_sm
  std::string message_id;
  std::string source;
  std::string dest;
  std::string text;
  int segments = 1;
  Timestamp timestamp{};
  int connection = 0;
};

struct ConnectionStats {
  int id = 0;
  std::string system_id;
  bool bound = false;
  std::size_t submits = 0;
  std::size_t max_outstanding = 0;
};

struct SimLedger {
  std::vector<LedgerEntry> received;
  std::vector<ConnectionStats> connections;
};

struct Fault {
  enum class Kind { kDropNextResp, kCloseConnection, kSetStatus, kSetReceiptStat };
  Kind kind;
  std::uint32_t status = 0;  ///< kSetStatus; 0 clears
  smpp::ReceiptStat receipt_stat = smpp::ReceiptStat::kDelivered;

  static Fault drop_next_resp() { return {Kind::kDropNextResp}; }
  static Fault close_connection() { return {Kind::kCloseConnection}; }
  static Fault set_status(std::uint32_t s) { return {Kind::kSetStatus, s}; }
  static Fault set_receipt_stat(smpp::ReceiptStat st) { return {Kind::kSetReceiptStat, 0, st}; }
};

class SmscSim;
using SimHandle = std::unique_ptr<SmscSim>;

class SmscSim {
 public:
  /// Starts listening. Throws Error("PORT_IN_USE").
  static SimHandle run(SimConfig cfg);
  ~SmscSim();

  std::uint16_t port() const { return listener_.port(); }
  SimLedger ledger() const;
  /// Applies `fault` to the next matching event (kSetStatus persists until cleared).
  void inject(Fault fault);
  /// Highest outstanding (received, unanswered) submit_sm count on any connection.
  std::size_t max_outstanding() const;
  std::size_t submit_count() const;
  void stop();

 private:
  struct Connection;
  struct Partial {
    int total = 0;
    std::map<int, std::string> parts;
    std::uint32_t first_seq = 0;
    std::string first_message_id;
    bool wants_receipt = false;
  };
  struct Scheduled {
    std::chrono::steady_clock::time_point due;
    std::uint64_t order;
    std::shared_ptr<Connection> conn;
    smpp::Bytes bytes;
    bool is_submit_resp;
    bool operator>(const Scheduled& o) const { return due != o.due ? due > o.due : order > o.order; }
  };

  explicit SmscSim(SimConfig cfg);
  void accept_loop();
  void serve(std::shared_ptr<Connection> conn);
  void handle(const std::shared_ptr<Connection>& conn, const smpp::Pdu& pdu);
  void handle_submit(const std::shared_ptr<Connection>& conn, const smpp::Pdu& pdu, const smpp::SubmitSm& sm);
  void schedule(std::shared_ptr<Connection> conn, smpp::Bytes bytes, std::chrono::milliseconds delay,
                bool is_submit_resp);
  void timer_loop();
  void record(const std::shared_ptr<Connection>& conn, const smpp::SubmitSm& sm, std::uint32_t seq,
              const std::string& message_id);

  SimConfig cfg_;
  net::Listener listener_;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::thread timer_;

  mutable std::mutex mu_;  // guards everything below
  std::mt19937_64 rng_;
  std::uint64_t next_message_id_ = 1;
  std::vector<LedgerEntry> ledger_;
  std::map<std::tuple<std::string, std::string, int>, Partial> partials_;
  std::vector<std::shared_ptr<Connection>> connections_;
  std::vector<std::thread> workers_;
  bool drop_next_ = false;
  bool close_next_ = false;
  std::optional<std::uint32_t> forced_status_;
  smpp::ReceiptStat receipt_stat_;
  std::size_t max_outstanding_ = 0;
  std::size_t submits_ = 0;

  std::mutex timer_mu_;
  std::condition_variable timer_cv_;
  std::vector<Scheduled> queue_;  // min-heap on due time
  std::uint64_t schedule_order_ = 0;
};

/// One JSON object per ledger entry, newline-terminated.
std::string ledger_json_lines(const SimLedger& ledger);

}  // namespace announcer::sim

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

// SMPP ESME session: bind_transceiver, windowed and throttled submit_sm with
// retry, enquire_link heartbeat, delivery-receipt callbacks.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "announcer/net.hpp"
#include "announcer/smpp/codec.hpp"

namespace announcer::gateway {

using namespace std::chrono_literals;

struct SessionConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 2775;
  std::string system_id;
  std::string password;
  std::string system_type;
  std::string source_addr = "ANNOUNCER";
  std::size_t window_size = 10;         ///< max unacknowledged submit_sm
  double throttle = 10;                 ///< max submit_sm per second
  std::chrono::milliseconds enquire_interval = 30s;
  int retry_max = 3;                    ///< total attempts per segment
  std::chrono::milliseconds retry_backoff = 2s;  ///< doubled after each attempt
  std::chrono::milliseconds response_timeout = 10s;
  std::chrono::milliseconds connect_timeout = 5s;
  std::chrono::milliseconds unbind_timeout = 5s;

  /// Throws Error("BAD_CONFIG") when window_size or throttle is below 1.
  void validate() const;
};

struct SubmitOutcome {
  std::string message_id;  ///< SMSC id of the first segment
  std::size_t segments_sent = 0;
};

using ReceiptHandler = std::function<void(const smpp::Receipt&)>;

/// Anything that can carry one SMS to one destination.
class SmsSender {
 public:
  virtual ~SmsSender() = default;
  /// Throws Error("SUBMIT_FAILED") or Error("SESSION_DOWN").
  virtual SubmitOutcome submit(const std::string& dest, const std::string& text) = 0;
};

/// True for statuses worth retrying: throttled, message queue full.
bool is_transient(std::uint32_t command_status);

class Session : public SmsSender {
 public:
  /// Connects and binds as transceiver. Throws Error("CONNECT_FAILED") or
  /// Error("BIND_REJECTED") whose detail carries the status as 0x%08X.
  static std::unique_ptr<Session> connect_and_bind(const SessionConfig& cfg, ReceiptHandler handler = {});

  ~Session() override;
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Segments `text`, sends one submit_sm per segment, blocking while the
  /// window is full or the throttle is exhausted. Safe from many threads.
  SubmitOutcome submit(const std::string& dest, const std::string& text) override;

  /// Replaces the receipt handler. Runs on the reader thread; must not block.
  void on_receipt(ReceiptHandler handler);

  /// Sends unbind, waits up to unbind_timeout for the response, closes. Idempotent.
  void unbind_and_close();

  bool is_bound() const { return state_.load() == State::kBound; }
  /// Highest number of simultaneously unacknowledged submit_sm seen.
  std::size_t max_outstanding() const { return max_outstanding_.load(); }
  std::size_t submits_sent() const { return submits_sent_.load(); }

 private:
  enum class State { kBound, kDown, kClosed };

  struct Reply {
    bool session_down = false;
    smpp::Pdu pdu;
  };

  explicit Session(SessionConfig cfg, net::Socket sock);

  void bind(ReceiptHandler handler);
  std::string submit_segment(const std::string& dest, const smpp::Segment& segment, smpp::Encoding encoding);
  std::future<Reply> send_request(smpp::Body body);
  bool write_pdu(const smpp::Pdu& pdu);
  void acquire_window();
  void release_window();
  void await_throttle();
  void reader_loop();
  void heartbeat_loop();
  void handle_inbound(const smpp::Pdu& pdu);
  void mark_down(const char* why);
  void forget(std::uint32_t seq);

  SessionConfig cfg_;
  net::Socket sock_;
  std::atomic<State> state_{State::kDown};
  net::FrameBuffer frames_;
  std::atomic<std::uint32_t> next_seq_{1};
  std::atomic<std::uint8_t> next_ref_{1};

  std::mutex write_mu_;

  std::mutex pending_mu_;
  std::map<std::uint32_t, std::promise<Reply>> pending_;

  std::mutex window_mu_;
  std::condition_variable window_cv_;
  std::size_t outstanding_ = 0;
  std::atomic<std::size_t> max_outstanding_{0};
  std::atomic<std::size_t> submits_sent_{0};

  std::mutex throttle_mu_;
  std::chrono::steady_clock::time_point next_send_{};

  std::mutex handler_mu_;
  ReceiptHandler handler_;

  std::mutex close_mu_;
  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
  bool stopping_ = false;
  std::thread reader_;
  std::thread heartbeat_;
};

/// SmsSender that (re)binds a Session on demand, so a service survives SMSC
/// restarts. Receipts from every session go to one handler.
class ReconnectingSender : public SmsSender {
 public:
  ReconnectingSender(SessionConfig cfg, ReceiptHandler handler);
  ~ReconnectingSender() override;

  SubmitOutcome submit(const std::string& dest, const std::string& text) override;
  void close();
  std::shared_ptr<Session> current();

 private:
  std::shared_ptr<Session> ensure_session();

  SessionConfig cfg_;
  ReceiptHandler handler_;
  std::mutex mu_;
  std::shared_ptr<Session> session_;
};

}  // namespace announcer::gateway

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

#include "announcer/gateway.hpp"

#include <spdlog/spdlog.h>

#include <cstdio>

#include "announcer/error.hpp"

namespace announcer::gateway {
namespace {

std::string hex_status(std::uint32_t status) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", status);
  return buf;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace

void SessionConfig::validate() const {
  if (window_size < 1) throw Error("BAD_CONFIG", "window_size must be >= 1");
  if (throttle < 1) throw Error("BAD_CONFIG", "throttle must be >= 1");
  if (retry_max < 1) throw Error("BAD_CONFIG", "retry_max must be >= 1");
}

bool is_transient(std::uint32_t command_status) {
  return command_status == smpp::status::kThrottled || command_status == smpp::status::kMsgQueueFull;
}

Session::Session(SessionConfig cfg, net::Socket sock) : cfg_(std::move(cfg)), sock_(std::move(sock)) {}

std::unique_ptr<Session> Session::connect_and_bind(const SessionConfig& cfg, ReceiptHandler handler) {
  cfg.validate();
  auto sock = net::connect_tcp(cfg.host, cfg.port, cfg.connect_timeout);
  std::unique_ptr<Session> s(new Session(cfg, std::move(sock)));
  s->bind(std::move(handler));
  return s;
}

void Session::bind(ReceiptHandler handler) {
  handler_ = std::move(handler);
  smpp::BindTransceiver body;
  body.system_id = cfg_.system_id;
  body.password = cfg_.password;
  body.system_type = cfg_.system_type;
  smpp::Pdu req{0, next_seq_++, body};
  if (!write_pdu(req)) throw Error("CONNECT_FAILED", "connection closed before bind");

  // Read the bind response inline; the reader thread starts once bound.
  auto& frames = frames_;
  auto deadline = std::chrono::steady_clock::now() + cfg_.response_timeout;
  std::vector<std::uint8_t> buf(4096);
  std::optional<smpp::Pdu> resp;
  while (!resp) {
    auto r = frames.next();
    if (r.status == smpp::DecodeStatus::kOk) {
      resp = *r.pdu;
      break;
    }
    if (r.status != smpp::DecodeStatus::kNeedMore) throw Error("CONNECT_FAILED", "garbled bind response");
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw Error("CONNECT_FAILED", "bind response timeout");
    auto n = sock_.recv_some(buf, left);
    if (n <= 0) throw Error("CONNECT_FAILED", "connection closed during bind");
    frames.append(std::span(buf).first(static_cast<std::size_t>(n)));
  }
  if (resp->command_status != smpp::status::kOk)
    throw Error("BIND_REJECTED", hex_status(resp->command_status));
  if (!resp->as<smpp::BindTransceiverResp>()) throw Error("BIND_REJECTED", "unexpected bind response");

  state_.store(State::kBound);
  reader_ = std::thread([this] { reader_loop(); });
  heartbeat_ = std::thread([this] { heartbeat_loop(); });
  spdlog::debug("smpp: bound to {}:{} as {}", cfg_.host, cfg_.port, cfg_.system_id);
}

Session::~Session() { unbind_and_close(); }

bool Session::write_pdu(const smpp::Pdu& pdu) {
  auto bytes = smpp::encode(pdu);
  std::lock_guard lock(write_mu_);
  return sock_.send_all(bytes);
}

std::future<Session::Reply> Session::send_request(smpp::Body body) {
  smpp::Pdu pdu{0, next_seq_++, std::move(body)};
  std::future<Reply> fut;
  {
    std::lock_guard lock(pending_mu_);
    auto& p = pending_[pdu.sequence_number];
    fut = p.get_future();
    if (state_.load() != State::kBound) {
      p.set_value(Reply{true, {}});
      pending_.erase(pdu.sequence_number);
      return fut;
    }
  }
  if (!write_pdu(pdu)) mark_down("write failed");
  return fut;
}

void Session::forget(std::uint32_t seq) {
  std::lock_guard lock(pending_mu_);
  pending_.erase(seq);
}

void Session::acquire_window() {
  std::unique_lock lock(window_mu_);
  window_cv_.wait(lock, [&] { return outstanding_ < cfg_.window_size || state_.load() != State::kBound; });
  if (state_.load() != State::kBound) throw Error("SESSION_DOWN");
  ++outstanding_;
  if (outstanding_ > cfg_.window_size) throw std::logic_error("smpp window overrun");
  auto seen = max_outstanding_.load();
  while (outstanding_ > seen && !max_outstanding_.compare_exchange_weak(seen, outstanding_)) {
  }
}

void Session::release_window() {
  {
    std::lock_guard lock(window_mu_);
    --outstanding_;
  }
  window_cv_.notify_one();
}

void Session::await_throttle() {
  using clock = std::chrono::steady_clock;
  auto interval = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(1.0 / cfg_.throttle));
  clock::time_point slot;
  {
    std::lock_guard lock(throttle_mu_);
    slot = std::max(clock::now(), next_send_);
    next_send_ = slot + interval;
  }
  std::this_thread::sleep_until(slot);
}

SubmitOutcome Session::submit(const std::string& dest, const std::string& text) {
  if (state_.load() != State::kBound) throw Error("SESSION_DOWN");
  auto payload = smpp::segment(text, next_ref_++);
  SubmitOutcome out;
  for (const auto& seg : payload.segments) {
    auto id = submit_segment(dest, seg, payload.encoding);
    if (out.segments_sent == 0) out.message_id = id;
    ++out.segments_sent;
  }
  return out;
}

std::string Session::submit_segment(const std::string& dest, const smpp::Segment& segment,
                                    smpp::Encoding encoding) {
  smpp::SubmitSm sm;
  sm.source_addr = cfg_.source_addr;
  if (all_digits(cfg_.source_addr)) {
    sm.source_addr_ton = 1;
    sm.source_addr_npi = 1;
  } else {
    sm.source_addr_ton = 5;  // alphanumeric
  }
  if (!dest.empty() && dest[0] == '+') {
    sm.dest_addr_ton = 1;  // international, '+' implied
    sm.dest_addr_npi = 1;
    sm.destination_addr = dest.substr(1);
  } else {
    sm.destination_addr = dest;
  }
  sm.esm_class = segment.udh.empty() ? 0 : smpp::kEsmUdhi;
  sm.data_coding = smpp::data_coding(encoding);
  sm.registered_delivery = 1;
  sm.short_message = segment.short_message();

  std::string last = "no attempt";
  auto backoff = cfg_.retry_backoff;
  for (int attempt = 1; attempt <= cfg_.retry_max; ++attempt) {
    acquire_window();
    await_throttle();
    smpp::Pdu pdu{0, next_seq_++, sm};
    std::future<Reply> fut;
    {
      std::lock_guard lock(pending_mu_);
      fut = pending_[pdu.sequence_number].get_future();
    }
    ++submits_sent_;
    if (!write_pdu(pdu)) mark_down("write failed");
    auto ready = fut.wait_for(cfg_.response_timeout);
    release_window();

    std::optional<std::uint32_t> status;
    if (ready != std::future_status::ready) {
      forget(pdu.sequence_number);
      last = "response timeout";
    } else {
      auto reply = fut.get();
      if (reply.session_down) throw Error("SESSION_DOWN");
      status = reply.pdu.command_status;
      if (const auto* resp = reply.pdu.as<smpp::SubmitSmResp>(); resp && *status == smpp::status::kOk)
        return resp->message_id;
      if (*status == smpp::status::kOk) status = smpp::status::kInvalidCmdId;  // bare generic_nack
      last = "status " + hex_status(*status);
    }
    bool retry = !status || is_transient(*status);
    if (!retry) throw Error("SUBMIT_FAILED", last);
    if (attempt < cfg_.retry_max) {
      spdlog::debug("smpp: submit to {} attempt {} failed ({}), retrying", dest, attempt, last);
      std::unique_lock lock(stop_mu_);
      stop_cv_.wait_for(lock, backoff, [&] { return stopping_; });
      backoff *= 2;
      if (state_.load() != State::kBound) throw Error("SESSION_DOWN");
    }
  }
  throw Error("SUBMIT_FAILED", last + " after " + std::to_string(cfg_.retry_max) + " attempts");
}

void Session::on_receipt(ReceiptHandler handler) {
  std::lock_guard lock(handler_mu_);
  handler_ = std::move(handler);
}

void Session::reader_loop() {
  std::vector<std::uint8_t> buf(8192);
  // Frames that arrived together with the bind response are already buffered.
  bool drain_first = true;
  while (true) {
    if (!drain_first) {
      auto n = sock_.recv_some(buf);
      if (n <= 0) {
        mark_down("connection closed");
        return;
      }
      frames_.append(std::span(buf).first(static_cast<std::size_t>(n)));
    }
    drain_first = false;
    while (true) {
      auto r = frames_.next();
      if (r.status == smpp::DecodeStatus::kNeedMore) break;
      if (r.status == smpp::DecodeStatus::kBadLength) {
        mark_down("bad frame length");
        return;
      }
      if (r.status == smpp::DecodeStatus::kOk) {
        handle_inbound(*r.pdu);
        continue;
      }
      auto nack_status = r.status == smpp::DecodeStatus::kUnknownCommandId ? smpp::status::kInvalidCmdId
                                                                           : smpp::status::kInvalidCmdLength;
      write_pdu(smpp::Pdu{nack_status, r.header ? r.header->sequence_number : 0, smpp::GenericNack{}});
    }
  }
}

void Session::handle_inbound(const smpp::Pdu& pdu) {
  if (pdu.is_response()) {
    std::promise<Reply> p;
    {
      std::lock_guard lock(pending_mu_);
      auto it = pending_.find(pdu.sequence_number);
      if (it == pending_.end()) return;  // late reply to a timed-out request
      p = std::move(it->second);
      pending_.erase(it);
    }
    p.set_value(Reply{false, pdu});
    return;
  }
  if (const auto* dsm = pdu.as<smpp::DeliverSm>()) {
    write_pdu(smpp::Pdu{smpp::status::kOk, pdu.sequence_number, smpp::DeliverSmResp{}});
    std::optional<smpp::Receipt> receipt;
    try {
      receipt = smpp::parse_delivery_receipt(std::span<const std::uint8_t>(dsm->short_message));
    } catch (const Error&) {
      spdlog::info("smpp: dropping non-receipt deliver_sm from {}", dsm->source_addr);
      return;
    }
    std::lock_guard lock(handler_mu_);
    if (handler_) handler_(*receipt);
    return;
  }
  if (pdu.as<smpp::EnquireLink>()) {
    write_pdu(smpp::Pdu{smpp::status::kOk, pdu.sequence_number, smpp::EnquireLinkResp{}});
    return;
  }
  if (pdu.as<smpp::Unbind>()) {
    write_pdu(smpp::Pdu{smpp::status::kOk, pdu.sequence_number, smpp::UnbindResp{}});
    mark_down("unbound by SMSC");
    return;
  }
  write_pdu(smpp::Pdu{smpp::status::kInvalidCmdId, pdu.sequence_number, smpp::GenericNack{}});
}

void Session::heartbeat_loop() {
  int misses = 0;
  auto stopped = [this](std::chrono::milliseconds d) {
    std::unique_lock lock(stop_mu_);
    return stop_cv_.wait_for(lock, d, [&] { return stopping_; });
  };
  while (!stopped(cfg_.enquire_interval)) {
    if (state_.load() != State::kBound) return;
    auto fut = send_request(smpp::EnquireLink{});
    auto deadline = std::chrono::steady_clock::now() + cfg_.enquire_interval;
    bool answered = false;
    while (std::chrono::steady_clock::now() < deadline) {
      if (fut.wait_for(50ms) == std::future_status::ready) {
        answered = !fut.get().session_down;
        break;
      }
      if (stopped(0ms)) return;
    }
    if (state_.load() != State::kBound) return;
    misses = answered ? 0 : misses + 1;
    if (misses >= 2) {
      mark_down("two enquire_link without response");
      return;
    }
  }
}

void Session::mark_down(const char* why) {
  auto expected = State::kBound;
  if (state_.compare_exchange_strong(expected, State::kDown)) spdlog::warn("smpp: session down: {}", why);
  std::map<std::uint32_t, std::promise<Reply>> pending;
  {
    std::lock_guard lock(pending_mu_);
    pending.swap(pending_);
  }
  for (auto& [seq, p] : pending) p.set_value(Reply{true, {}});
  {
    std::lock_guard lock(window_mu_);
  }
  window_cv_.notify_all();
  {
    std::lock_guard lock(stop_mu_);
  }
  stop_cv_.notify_all();
  sock_.shutdown();
}

void Session::unbind_and_close() {
  std::lock_guard close_lock(close_mu_);
  if (state_.load() == State::kClosed && !reader_.joinable()) return;
  if (state_.load() == State::kBound) {
    auto fut = send_request(smpp::Unbind{});
    if (fut.wait_for(cfg_.unbind_timeout) != std::future_status::ready)
      spdlog::warn("smpp: no unbind_resp within {} ms, closing anyway", cfg_.unbind_timeout.count());
  }
  state_.store(State::kClosed);
  {
    std::lock_guard lock(stop_mu_);
    stopping_ = true;
  }
  stop_cv_.notify_all();
  sock_.shutdown();
  if (reader_.joinable()) reader_.join();
  if (heartbeat_.joinable()) heartbeat_.join();
  mark_down("closed");
  window_cv_.notify_all();
  sock_.close();
}

ReconnectingSender::ReconnectingSender(SessionConfig cfg, ReceiptHandler handler)
    : cfg_(std::move(cfg)), handler_(std::move(handler)) {}

ReconnectingSender::~ReconnectingSender() { close(); }

std::shared_ptr<Session> ReconnectingSender::ensure_session() {
  std::lock_guard lock(mu_);
  if (!session_ || !session_->is_bound()) {
    if (session_) session_->unbind_and_close();
    try {
      session_ = Session::connect_and_bind(cfg_, handler_);
    } catch (const Error& e) {
      session_.reset();
      throw Error("SESSION_DOWN", e.what());
    }
  }
  return session_;
}

SubmitOutcome ReconnectingSender::submit(const std::string& dest, const std::string& text) {
  return ensure_session()->submit(dest, text);
}

std::shared_ptr<Session> ReconnectingSender::current() {
  std::lock_guard lock(mu_);
  return session_;
}

void ReconnectingSender::close() {
  std::lock_guard lock(mu_);
  if (session_) session_->unbind_and_close();
  session_.reset();
}

}  // namespace announcer::gateway

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

#include "announcer/smsc_sim.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include "json.hpp"

#include "announcer/error.hpp"
#include "announcer/smpp/gsm7.hpp"

namespace announcer::sim {

struct SmscSim::Connection {
  int id = 0;
  net::Socket sock;
  std::mutex write_mu;
  std::string system_id;
  bool bound = false;
  bool receiver = false;  // bound as transceiver, so receipts may flow back
  std::atomic<bool> alive{true};
  std::size_t outstanding = 0;
  std::size_t max_outstanding = 0;
  std::size_t submits = 0;
  std::atomic<std::uint32_t> next_seq{1};

  void write(const smpp::Pdu& pdu) { write_bytes(smpp::encode(pdu)); }
  void write_bytes(const smpp::Bytes& bytes) {
    std::lock_guard lock(write_mu);
    if (alive.load() && !sock.send_all(bytes)) alive.store(false);
  }
};

namespace {

std::string address(std::uint8_t ton, const std::string& addr) {
  return ton == 1 && !addr.empty() && addr[0] != '+' ? "+" + addr : addr;
}

std::string receipt_date(Timestamp t) {
  auto iso = format_iso8601(t);  // YYYY-MM-DDTHH:MM:SSZ
  return iso.substr(2, 2) + iso.substr(5, 2) + iso.substr(8, 2) + iso.substr(11, 2) + iso.substr(14, 2);
}

}  // namespace

void SimConfig::validate() const {
  if (drop_resp_rate < 0.0 || drop_resp_rate > 1.0) throw Error("BAD_CONFIG", "drop_resp_rate outside [0,1]");
  if (ack_latency_min_ms < 0 || ack_latency_min_ms > ack_latency_max_ms)
    throw Error("BAD_CONFIG", "ack latency range is inverted");
  if (receipt_delay_ms < 0) throw Error("BAD_CONFIG", "receipt_delay_ms < 0");
}

SmscSim::SmscSim(SimConfig cfg)
    : cfg_(std::move(cfg)),
      listener_(cfg_.host, cfg_.port),
      rng_(cfg_.rng_seed),
      forced_status_(cfg_.reject_status),
      receipt_stat_(cfg_.receipt_stat) {}

SimHandle SmscSim::run(SimConfig cfg) {
  cfg.validate();
  SimHandle sim(new SmscSim(std::move(cfg)));
  sim->acceptor_ = std::thread([s = sim.get()] { s->accept_loop(); });
  sim->timer_ = std::thread([s = sim.get()] { s->timer_loop(); });
  return sim;
}

SmscSim::~SmscSim() { stop(); }

void SmscSim::stop() {
  if (stopping_.exchange(true)) return;
  if (acceptor_.joinable()) acceptor_.join();
  listener_.close();
  {
    std::lock_guard lock(mu_);
    for (auto& c : connections_) {
      c->alive.store(false);
      c->sock.shutdown();
    }
  }
  timer_cv_.notify_all();
  if (timer_.joinable()) timer_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    workers.swap(workers_);
  }
  for (auto& w : workers) w.join();
}

void SmscSim::accept_loop() {
  int next_id = 1;
  while (!stopping_.load()) {
    auto sock = listener_.accept(std::chrono::milliseconds(50));
    if (!sock) continue;
    auto conn = std::make_shared<Connection>();
    conn->id = next_id++;
    conn->sock = std::move(*sock);
    std::lock_guard lock(mu_);
    if (stopping_.load()) break;
    connections_.push_back(conn);
    workers_.emplace_back([this, conn] { serve(conn); });
  }
}

void SmscSim::serve(std::shared_ptr<Connection> conn) {
  net::FrameBuffer frames;
  std::vector<std::uint8_t> buf(8192);
  while (conn->alive.load()) {
    auto n = conn->sock.recv_some(buf);
    if (n <= 0) break;
    frames.append(std::span(buf).first(static_cast<std::size_t>(n)));
    while (conn->alive.load()) {
      auto r = frames.next();
      if (r.status == smpp::DecodeStatus::kNeedMore) break;
      if (r.status == smpp::DecodeStatus::kBadLength) {
        conn->alive.store(false);
        break;
      }
      if (r.status == smpp::DecodeStatus::kOk) {
        handle(conn, *r.pdu);
      } else {
        auto st = r.status == smpp::DecodeStatus::kUnknownCommandId ? smpp::status::kInvalidCmdId
                                                                    : smpp::status::kInvalidCmdLength;
        conn->write(smpp::Pdu{st, r.header ? r.header->sequence_number : 0, smpp::GenericNack{}});
      }
    }
  }
  conn->alive.store(false);
  conn->sock.shutdown();
}

void SmscSim::handle(const std::shared_ptr<Connection>& conn, const smpp::Pdu& pdu) {
  auto bind = [&](const auto& req, auto resp_tag, bool receiver) {
    std::uint32_t st = smpp::status::kOk;
    {
      std::lock_guard lock(mu_);
      auto it = std::find_if(cfg_.accounts.begin(), cfg_.accounts.end(),
                             [&](const auto& a) { return a.first == req.system_id; });
      if (conn->bound)
        st = smpp::status::kAlreadyBound;
      else if (it == cfg_.accounts.end())
        st = smpp::status::kInvalidSystemId;
      else if (it->second != req.password)
        st = smpp::status::kInvalidPassword;
      if (st == smpp::status::kOk) {
        conn->bound = true;
        conn->receiver = receiver;
        conn->system_id = req.system_id;
      }
    }
    decltype(resp_tag) resp;
    if (st == smpp::status::kOk) resp.system_id = "SMSCSIM";
    conn->write(smpp::Pdu{st, pdu.sequence_number, resp});
  };

  if (const auto* b = pdu.as<smpp::BindTransceiver>()) {
    bind(*b, smpp::BindTransceiverResp{}, true);
  } else if (const auto* bt = pdu.as<smpp::BindTransmitter>()) {
    bind(*bt, smpp::BindTransmitterResp{}, false);
  } else if (const auto* sm = pdu.as<smpp::SubmitSm>()) {
    handle_submit(conn, pdu, *sm);
  } else if (pdu.as<smpp::EnquireLink>()) {
    conn->write(smpp::Pdu{smpp::status::kOk, pdu.sequence_number, smpp::EnquireLinkResp{}});
  } else if (pdu.as<smpp::Unbind>()) {
    conn->write(smpp::Pdu{smpp::status::kOk, pdu.sequence_number, smpp::UnbindResp{}});
    {
      std::lock_guard lock(mu_);
      conn->bound = false;
    }
    conn->alive.store(false);
    conn->sock.shutdown();
  } else if (pdu.is_response()) {
    // deliver_sm_resp, enquire_link_resp, generic_nack: nothing to do
  } else {
    conn->write(smpp::Pdu{smpp::status::kInvalidCmdId, pdu.sequence_number, smpp::GenericNack{}});
  }
}

void SmscSim::handle_submit(const std::shared_ptr<Connection>& conn, const smpp::Pdu& pdu,
                            const smpp::SubmitSm& sm) {
  std::uint32_t st = smpp::status::kOk;
  std::string message_id;
  bool drop = false;
  std::chrono::milliseconds latency{0};
  {
    std::lock_guard lock(mu_);
    ++submits_;
    ++conn->submits;
    if (close_next_) {
      close_next_ = false;
      conn->alive.store(false);
      conn->sock.shutdown();
      return;
    }
    ++conn->outstanding;
    conn->max_outstanding = std::max(conn->max_outstanding, conn->outstanding);
    max_outstanding_ = std::max(max_outstanding_, conn->outstanding);

    // Draw in a fixed order so equal seeds and equal traffic give equal runs.
    bool drawn_drop = std::bernoulli_distribution(cfg_.drop_resp_rate)(rng_);
    latency = std::chrono::milliseconds(
        std::uniform_int_distribution<int>(cfg_.ack_latency_min_ms, cfg_.ack_latency_max_ms)(rng_));

    if (!conn->bound)
      st = smpp::status::kInvalidBindStatus;
    else if (forced_status_ && *forced_status_ != smpp::status::kOk)
      st = *forced_status_;
    else if (sm.destination_addr.empty())
      st = smpp::status::kInvalidDestAddr;

    if (st == smpp::status::kOk) {
      message_id = std::to_string(next_message_id_++);
      drop = drawn_drop || drop_next_;
      drop_next_ = false;
    }
    if (drop) --conn->outstanding;
  }
  if (st == smpp::status::kOk) record(conn, sm, pdu.sequence_number, message_id);
  if (drop) {
    spdlog::debug("smsc-sim: dropping submit_sm_resp seq {}", pdu.sequence_number);
    return;
  }
  schedule(conn, smpp::encode(smpp::Pdu{st, pdu.sequence_number, smpp::SubmitSmResp{message_id}}), latency, true);
}

void SmscSim::record(const std::shared_ptr<Connection>& conn, const smpp::SubmitSm& sm, std::uint32_t seq,
                     const std::string& message_id) {
  auto encoding = sm.data_coding == 0x08 ? smpp::Encoding::kUcs2 : smpp::Encoding::kGsm7;
  std::optional<smpp::ConcatInfo> concat;
  smpp::Bytes payload = sm.short_message;
  if (sm.esm_class & smpp::kEsmUdhi) {
    auto split = smpp::split_udh(sm.short_message);
    if (split.ok) {
      concat = split.concat;
      payload = std::move(split.payload);
    }
  }
  LedgerEntry entry;
  entry.source = address(sm.source_addr_ton, sm.source_addr);
  entry.dest = address(sm.dest_addr_ton, sm.destination_addr);
  entry.timestamp = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  entry.connection = conn->id;
  auto text = smpp::payload_text(payload, encoding);
  bool wants_receipt = sm.registered_delivery & 0x01;

  std::lock_guard lock(mu_);
  if (!concat || concat->total <= 1) {
    entry.seq = seq;
    entry.message_id = message_id;
    entry.text = std::move(text);
  } else {
    auto key = std::make_tuple(entry.source, entry.dest, int{concat->ref});
    auto& part = partials_[key];
    part.total = concat->total;
    part.parts[concat->index] = std::move(text);
    part.wants_receipt = part.wants_receipt || wants_receipt;
    if (concat->index == 1) {
      part.first_seq = seq;
      part.first_message_id = message_id;
    }
    if (part.parts.size() < static_cast<std::size_t>(part.total) || !part.parts.count(1)) return;
    entry.seq = part.first_seq;
    entry.message_id = part.first_message_id;
    entry.segments = part.total;
    for (auto& [idx, t] : part.parts) entry.text += t;
    wants_receipt = part.wants_receipt;
    partials_.erase(key);
  }
  ledger_.push_back(entry);
  if (wants_receipt && conn->receiver) {
    smpp::DeliverSm dsm;
    dsm.source_addr_ton = sm.dest_addr_ton;
    dsm.source_addr_npi = sm.dest_addr_npi;
    dsm.source_addr = sm.destination_addr;
    dsm.dest_addr_ton = sm.source_addr_ton;
    dsm.dest_addr_npi = sm.source_addr_npi;
    dsm.destination_addr = sm.source_addr;
    dsm.esm_class = smpp::kEsmDeliveryReceipt;
    auto now = receipt_date(entry.timestamp);
    // Receipt text is informational; keep it ASCII.
    std::string preview;
    for (char c : entry.text)
      if (static_cast<unsigned char>(c) < 0x80 && c >= 0x20) preview += c;
    auto text_out = smpp::format_delivery_receipt(entry.message_id, receipt_stat_, now, now, preview);
    dsm.short_message.assign(text_out.begin(), text_out.end());
    auto bytes = smpp::encode(smpp::Pdu{0, conn->next_seq++, dsm});
    // mu_ is held; schedule only takes timer_mu_.
    schedule(conn, std::move(bytes), std::chrono::milliseconds(cfg_.receipt_delay_ms), false);
  }
}

void SmscSim::schedule(std::shared_ptr<Connection> conn, smpp::Bytes bytes, std::chrono::milliseconds delay,
                       bool is_submit_resp) {
  {
    std::lock_guard lock(timer_mu_);
    queue_.push_back(Scheduled{std::chrono::steady_clock::now() + delay, schedule_order_++, std::move(conn),
                               std::move(bytes), is_submit_resp});
    std::push_heap(queue_.begin(), queue_.end(), std::greater<>{});
  }
  timer_cv_.notify_one();
}

void SmscSim::timer_loop() {
  std::unique_lock lock(timer_mu_);
  while (!stopping_.load()) {
    if (queue_.empty()) {
      timer_cv_.wait(lock);
      continue;
    }
    auto due = queue_.front().due;
    if (std::chrono::steady_clock::now() < due) {
      timer_cv_.wait_until(lock, due);
      continue;
    }
    std::pop_heap(queue_.begin(), queue_.end(), std::greater<>{});
    auto item = std::move(queue_.back());
    queue_.pop_back();
    lock.unlock();
    if (item.is_submit_resp) {
      std::lock_guard g(mu_);
      if (item.conn->outstanding > 0) --item.conn->outstanding;
    }
    item.conn->write_bytes(item.bytes);
    lock.lock();
  }
}

SimLedger SmscSim::ledger() const {
  std::lock_guard lock(mu_);
  SimLedger out;
  out.received = ledger_;
  for (const auto& c : connections_)
    out.connections.push_back(ConnectionStats{c->id, c->system_id, c->bound, c->submits, c->max_outstanding});
  return out;
}

void SmscSim::inject(Fault fault) {
  std::lock_guard lock(mu_);
  switch (fault.kind) {
    case Fault::Kind::kDropNextResp: drop_next_ = true; break;
    case Fault::Kind::kCloseConnection: close_next_ = true; break;
    case Fault::Kind::kSetStatus:
      if (fault.status == smpp::status::kOk)
        forced_status_.reset();
      else
        forced_status_ = fault.status;
      break;
    case Fault::Kind::kSetReceiptStat: receipt_stat_ = fault.receipt_stat; break;
  }
}

std::size_t SmscSim::max_outstanding() const {
  std::lock_guard lock(mu_);
  return max_outstanding_;
}

std::size_t SmscSim::submit_count() const {
  std::lock_guard lock(mu_);
  return submits_;
}

std::string ledger_json_lines(const SimLedger& ledger) {
  std::string out;
  for (const auto& e : ledger.received) {
    nlohmann::json j{{"seq", e.seq},       {"message_id", e.message_id}, {"source", e.source},
                     {"dest", e.dest},     {"text", e.text},             {"segments", e.segments},
                     {"timestamp", format_iso8601(e.timestamp)},         {"connection", e.connection}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace announcer::sim

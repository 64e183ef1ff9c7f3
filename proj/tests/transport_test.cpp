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

#include <gtest/gtest.h>

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

#include "announcer/error.hpp"
#include "announcer/gateway.hpp"
#include "announcer/net.hpp"
#include "announcer/smsc_sim.hpp"
#include "json.hpp"

namespace announcer {
namespace {

using namespace std::chrono_literals;
using gateway::Session;
using gateway::SessionConfig;
using sim::Fault;
using sim::SimConfig;
using sim::SmscSim;

SessionConfig session_for(const SmscSim& s) {
  SessionConfig cfg;
  cfg.port = s.port();
  cfg.system_id = "announcer";
  cfg.password = "secret";
  cfg.throttle = 1000;
  cfg.retry_backoff = 10ms;
  cfg.response_timeout = 2s;
  cfg.unbind_timeout = 1s;
  return cfg;
}

std::pair<std::string, std::string> error_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return {e.code(), e.detail()};
  }
  return {};
}

// Collects receipts from the reader thread.
struct ReceiptSink {
  std::mutex mu;
  std::condition_variable cv;
  std::vector<smpp::Receipt> got;

  gateway::ReceiptHandler handler() {
    return [this](const smpp::Receipt& r) {
      std::lock_guard lock(mu);
      got.push_back(r);
      cv.notify_all();
    };
  }
  bool wait_for(std::size_t n, std::chrono::milliseconds limit = 5s) {
    std::unique_lock lock(mu);
    return cv.wait_for(lock, limit, [&] { return got.size() >= n; });
  }
};

TEST(Session, BindsAsTransceiver) {
  auto smsc = SmscSim::run({});
  auto s = Session::connect_and_bind(session_for(*smsc));
  EXPECT_TRUE(s->is_bound());
  auto ledger = smsc->ledger();
  ASSERT_EQ(ledger.connections.size(), 1u);
  EXPECT_TRUE(ledger.connections[0].bound);
  EXPECT_EQ(ledger.connections[0].system_id, "announcer");
}

TEST(Session, WrongPasswordIsRejectedWithStatus) {
  auto smsc = SmscSim::run({});
  auto cfg = session_for(*smsc);
  cfg.password = "nope";
  auto [code, detail] = error_of([&] { Session::connect_and_bind(cfg); });
  EXPECT_EQ(code, "BIND_REJECTED");
  EXPECT_EQ(detail, "0x0000000E");
}

TEST(Session, UnknownSystemIdIsRejected) {
  auto smsc = SmscSim::run({});
  auto cfg = session_for(*smsc);
  cfg.system_id = "stranger";
  auto [code, detail] = error_of([&] { Session::connect_and_bind(cfg); });
  EXPECT_EQ(code, "BIND_REJECTED");
  EXPECT_EQ(detail, "0x0000000F");
}

TEST(Session, ClosedPortFailsToConnect) {
  std::uint16_t port;
  {
    net::Listener l("127.0.0.1", 0);
    port = l.port();
  }
  SessionConfig cfg;
  cfg.port = port;
  cfg.system_id = "announcer";
  cfg.password = "secret";
  cfg.connect_timeout = 1s;
  EXPECT_EQ(error_of([&] { Session::connect_and_bind(cfg); }).first, "CONNECT_FAILED");
}

TEST(Session, ConfigValidation) {
  SessionConfig cfg;
  cfg.window_size = 0;
  EXPECT_EQ(error_of([&] { cfg.validate(); }).first, "BAD_CONFIG");
  cfg.window_size = 1;
  cfg.throttle = 0.5;
  EXPECT_EQ(error_of([&] { cfg.validate(); }).first, "BAD_CONFIG");
}

TEST(Session, ShortTextIsOneSegment) {
  auto smsc = SmscSim::run({});
  auto s = Session::connect_and_bind(session_for(*smsc));
  const std::string text = "Fee reminder: RM 120";
  ASSERT_EQ(text.size(), 20u);
  auto out = s->submit("+60123456789", text);
  EXPECT_EQ(out.segments_sent, 1u);
  EXPECT_EQ(out.message_id, "1");
  auto ledger = smsc->ledger();
  ASSERT_EQ(ledger.received.size(), 1u);
  EXPECT_EQ(ledger.received[0].text, text);
  EXPECT_EQ(ledger.received[0].dest, "+60123456789");
  EXPECT_EQ(ledger.received[0].source, "ANNOUNCER");
  EXPECT_EQ(ledger.received[0].segments, 1);
}

TEST(Session, LongTextIsReassembledFromThreeSegments) {
  auto smsc = SmscSim::run({});
  auto s = Session::connect_and_bind(session_for(*smsc));
  std::string text;
  for (int i = 0; i < 400; ++i) text += static_cast<char>('a' + i % 26);
  auto out = s->submit("+60123456789", text);
  EXPECT_EQ(out.segments_sent, 3u);  // ceil(400 / 153)
  EXPECT_EQ(smsc->submit_count(), 3u);
  auto ledger = smsc->ledger();
  ASSERT_EQ(ledger.received.size(), 1u);
  EXPECT_EQ(ledger.received[0].segments, 3);
  EXPECT_EQ(ledger.received[0].text, text);
  EXPECT_EQ(ledger.received[0].message_id, out.message_id);
}

TEST(Session, Ucs2TextSurvivesTheWire) {
  auto smsc = SmscSim::run({});
  auto s = Session::connect_and_bind(session_for(*smsc));
  const std::string text = "Yuran tertunggak \xe5\xad\xa6\xe8\xb4\xb9 \xf0\x9f\x93\x9a";  // CJK + U+1F4DA
  auto out = s->submit("+60123456789", text);
  EXPECT_EQ(out.segments_sent, 1u);
  EXPECT_EQ(smsc->ledger().received.at(0).text, text);
}

TEST(Session, ExtensionCharactersSurviveTheWire) {
  auto smsc = SmscSim::run({});
  auto s = Session::connect_and_bind(session_for(*smsc));
  const std::string text = "Balance {RM 5} [due] \xe2\x82\xac~|^";
  s->submit("+60123456789", text);
  EXPECT_EQ(smsc->ledger().received.at(0).text, text);
}

TEST(Session, ThrottledStatusExhaustsRetries) {
  auto smsc = SmscSim::run({});
  auto s = Session::connect_and_bind(session_for(*smsc));
  smsc->inject(Fault::set_status(smpp::status::kThrottled));
  EXPECT_EQ(error_of([&] { s->submit("+60123456789", "hello"); }).first, "SUBMIT_FAILED");
  EXPECT_EQ(smsc->submit_count(), 3u);
  smsc->inject(Fault::set_status(0));
  EXPECT_EQ(s->submit("+60123456789", "hello").segments_sent, 1u);
}

TEST(Session, PermanentStatusIsNotRetried) {
  auto smsc = SmscSim::run({});
  auto s = Session::connect_and_bind(session_for(*smsc));
  smsc->inject(Fault::set_status(smpp::status::kInvalidDestAddr));
  EXPECT_EQ(error_of([&] { s->submit("+60123456789", "hello"); }).first, "SUBMIT_FAILED");
  EXPECT_EQ(smsc->submit_count(), 1u);
}

TEST(Session, DroppedResponseIsRetriedAfterTimeout) {
  auto smsc = SmscSim::run({});
  auto cfg = session_for(*smsc);
  cfg.response_timeout = 200ms;
  auto s = Session::connect_and_bind(cfg);
  smsc->inject(Fault::drop_next_resp());
  auto out = s->submit("+60123456789", "hello");
  EXPECT_EQ(out.message_id, "2");
  EXPECT_EQ(smsc->submit_count(), 2u);
}

TEST(Session, ReceiptsArriveForEverySubmit) {
  auto smsc = SmscSim::run({});
  ReceiptSink sink;
  auto s = Session::connect_and_bind(session_for(*smsc), sink.handler());
  std::vector<std::string> ids;
  for (int i = 0; i < 5; ++i) ids.push_back(s->submit("+6012345678" + std::to_string(i), "msg").message_id);
  ASSERT_TRUE(sink.wait_for(5));
  std::lock_guard lock(sink.mu);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    EXPECT_EQ(sink.got[i].message_id, ids[i]);
    EXPECT_EQ(sink.got[i].stat, smpp::ReceiptStat::kDelivered);
  }
}

TEST(Session, UndeliverableReceiptStatIsReported) {
  auto smsc = SmscSim::run({});
  smsc->inject(Fault::set_receipt_stat(smpp::ReceiptStat::kUndeliverable));
  ReceiptSink sink;
  auto s = Session::connect_and_bind(session_for(*smsc), sink.handler());
  auto id = s->submit("+60123456789", "msg").message_id;
  ASSERT_TRUE(sink.wait_for(1));
  EXPECT_EQ(sink.got[0].message_id, id);
  EXPECT_EQ(sink.got[0].stat, smpp::ReceiptStat::kUndeliverable);
}

// A scripted peer for cases the simulator never produces.
class ScriptedSmsc {
 public:
  ScriptedSmsc() : listener_("127.0.0.1", 0) {}
  std::uint16_t port() const { return listener_.port(); }

  // Accepts one client, answers its bind, then hands the socket to `script`.
  void serve(std::function<void(net::Socket&, net::FrameBuffer&)> script) {
    thread_ = std::thread([this, script] {
      auto sock = listener_.accept(5s);
      if (!sock) return;
      net::FrameBuffer frames;
      auto pdu = read_pdu(*sock, frames);
      if (!pdu) return;
      sock->send_all(smpp::encode(smpp::Pdu{0, pdu->sequence_number, smpp::BindTransceiverResp{"SCRIPT"}}));
      script(*sock, frames);
    });
  }
  ~ScriptedSmsc() {
    if (thread_.joinable()) thread_.join();
  }

  static std::optional<smpp::Pdu> read_pdu(net::Socket& sock, net::FrameBuffer& frames) {
    std::vector<std::uint8_t> buf(4096);
    for (;;) {
      auto r = frames.next();
      if (r.status == smpp::DecodeStatus::kOk) return r.pdu;
      if (r.status != smpp::DecodeStatus::kNeedMore) return std::nullopt;
      auto n = sock.recv_some(buf, 5s);
      if (n <= 0) return std::nullopt;
      frames.append(std::span(buf).first(static_cast<std::size_t>(n)));
    }
  }

 private:
  net::Listener listener_;
  std::thread thread_;
};

smpp::Pdu deliver(std::uint32_t seq, const std::string& text) {
  smpp::DeliverSm d;
  d.esm_class = smpp::kEsmDeliveryReceipt;
  d.short_message.assign(text.begin(), text.end());
  return smpp::Pdu{0, seq, d};
}

TEST(Session, MalformedReceiptIsAckedButNotDelivered) {
  ScriptedSmsc peer;
  std::vector<std::uint32_t> acked;
  peer.serve([&](net::Socket& sock, net::FrameBuffer& frames) {
    sock.send_all(smpp::encode(deliver(100, "this is not a receipt")));
    sock.send_all(smpp::encode(deliver(101, smpp::format_delivery_receipt(
                                                 "77", smpp::ReceiptStat::kDelivered, "2610150900",
                                                 "2610150901", "x"))));
    for (int i = 0; i < 2; ++i) {
      auto p = ScriptedSmsc::read_pdu(sock, frames);
      if (p && p->as<smpp::DeliverSmResp>()) acked.push_back(p->sequence_number);
    }
    // Answer the unbind so the client closes promptly.
    if (auto p = ScriptedSmsc::read_pdu(sock, frames))
      sock.send_all(smpp::encode(smpp::Pdu{0, p->sequence_number, smpp::UnbindResp{}}));
  });
  ReceiptSink sink;
  SessionConfig cfg;
  cfg.port = peer.port();
  cfg.system_id = "announcer";
  cfg.password = "secret";
  auto s = Session::connect_and_bind(cfg, sink.handler());
  ASSERT_TRUE(sink.wait_for(1));
  std::this_thread::sleep_for(100ms);
  s->unbind_and_close();
  ASSERT_EQ(sink.got.size(), 1u);
  EXPECT_EQ(sink.got[0].message_id, "77");
  EXPECT_EQ(acked, (std::vector<std::uint32_t>{100, 101}));
}

TEST(Session, UnbindTimesOutWhenPeerIsSilent) {
  ScriptedSmsc peer;
  peer.serve([](net::Socket& sock, net::FrameBuffer& frames) {
    ScriptedSmsc::read_pdu(sock, frames);  // swallow the unbind
    ScriptedSmsc::read_pdu(sock, frames);  // then wait for close
  });
  SessionConfig cfg;
  cfg.port = peer.port();
  cfg.system_id = "announcer";
  cfg.password = "secret";
  cfg.unbind_timeout = 300ms;
  auto s = Session::connect_and_bind(cfg);
  auto t0 = std::chrono::steady_clock::now();
  s->unbind_and_close();
  auto took = std::chrono::steady_clock::now() - t0;
  EXPECT_GE(took, 250ms);
  EXPECT_LT(took, 3s);
  EXPECT_FALSE(s->is_bound());
}

TEST(Session, UnbindIsIdempotent) {
  auto smsc = SmscSim::run({});
  auto s = Session::connect_and_bind(session_for(*smsc));
  s->unbind_and_close();
  s->unbind_and_close();
  EXPECT_FALSE(s->is_bound());
  EXPECT_EQ(error_of([&] { s->submit("+60123456789", "late"); }).first, "SESSION_DOWN");
  std::this_thread::sleep_for(100ms);
  EXPECT_FALSE(smsc->ledger().connections.at(0).bound);
}

TEST(Session, HeartbeatKeepsSessionUp) {
  auto smsc = SmscSim::run({});
  auto cfg = session_for(*smsc);
  cfg.enquire_interval = 50ms;
  auto s = Session::connect_and_bind(cfg);
  std::this_thread::sleep_for(400ms);
  EXPECT_TRUE(s->is_bound());
}

TEST(Session, HeartbeatDetectsSilentPeer) {
  ScriptedSmsc peer;
  std::atomic<bool> done{false};
  peer.serve([&](net::Socket& sock, net::FrameBuffer& frames) {
    while (!done.load() && ScriptedSmsc::read_pdu(sock, frames)) {
    }
  });
  SessionConfig cfg;
  cfg.port = peer.port();
  cfg.system_id = "announcer";
  cfg.password = "secret";
  cfg.enquire_interval = 50ms;
  cfg.response_timeout = 50ms;
  cfg.unbind_timeout = 100ms;
  auto s = Session::connect_and_bind(cfg);
  auto deadline = std::chrono::steady_clock::now() + 3s;
  while (s->is_bound() && std::chrono::steady_clock::now() < deadline) std::this_thread::sleep_for(20ms);
  EXPECT_FALSE(s->is_bound());
  done = true;
  s.reset();
}

TEST(Session, WindowBoundsOutstandingSubmits) {
  SimConfig sc;
  sc.ack_latency_min_ms = 20;
  sc.ack_latency_max_ms = 40;
  auto smsc = SmscSim::run(sc);
  auto cfg = session_for(*smsc);
  cfg.window_size = 4;
  auto s = Session::connect_and_bind(cfg);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&] {
      for (int i = 0; i < 5; ++i)
        if (s->submit("+60123456789", "w").segments_sent == 1) ++ok;
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 40);
  EXPECT_EQ(s->max_outstanding(), 4u);
  EXPECT_LE(smsc->max_outstanding(), 4u);
  EXPECT_GE(smsc->max_outstanding(), 2u);
}

TEST(Session, ThrottleSpacesSubmits) {
  auto smsc = SmscSim::run({});
  auto cfg = session_for(*smsc);
  cfg.throttle = 50;
  auto s = Session::connect_and_bind(cfg);
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 26; ++i) s->submit("+60123456789", "t");
  // 26 submits need at least 25 gaps of 20 ms.
  EXPECT_GE(std::chrono::steady_clock::now() - t0, 490ms);
}

TEST(ReconnectingSender, RebindsAfterConnectionLoss) {
  auto smsc = SmscSim::run({});
  gateway::ReconnectingSender sender(session_for(*smsc), {});
  EXPECT_EQ(sender.submit("+60123456789", "one").message_id, "1");
  smsc->inject(Fault::close_connection());
  EXPECT_EQ(error_of([&] { sender.submit("+60123456789", "two"); }).first, "SESSION_DOWN");
  EXPECT_EQ(sender.submit("+60123456789", "three").message_id, "2");
  EXPECT_EQ(smsc->ledger().connections.size(), 2u);
}

TEST(ReconnectingSender, ReportsSessionDownWhenSmscIsGone) {
  SessionConfig cfg;
  {
    auto smsc = SmscSim::run({});
    cfg = session_for(*smsc);
  }
  cfg.connect_timeout = 500ms;
  gateway::ReconnectingSender sender(cfg, {});
  EXPECT_EQ(error_of([&] { sender.submit("+60123456789", "x"); }).first, "SESSION_DOWN");
}

TEST(SmscSim, PortInUse) {
  auto a = SmscSim::run({});
  SimConfig sc;
  sc.port = a->port();
  EXPECT_EQ(error_of([&] { SmscSim::run(sc); }).first, "PORT_IN_USE");
}

TEST(SmscSim, RejectsBadConfig) {
  SimConfig sc;
  sc.drop_resp_rate = 1.5;
  EXPECT_EQ(error_of([&] { SmscSim::run(sc); }).first, "BAD_CONFIG");
  sc.drop_resp_rate = 0;
  sc.ack_latency_min_ms = 10;
  sc.ack_latency_max_ms = 5;
  EXPECT_EQ(error_of([&] { SmscSim::run(sc); }).first, "BAD_CONFIG");
}

TEST(SmscSim, ConfiguredRejectStatusAppliesToEverySubmit) {
  SimConfig sc;
  sc.reject_status = smpp::status::kMsgQueueFull;
  auto smsc = SmscSim::run(sc);
  auto cfg = session_for(*smsc);
  cfg.retry_max = 2;
  auto s = Session::connect_and_bind(cfg);
  EXPECT_EQ(error_of([&] { s->submit("+60123456789", "x"); }).first, "SUBMIT_FAILED");
  EXPECT_EQ(smsc->submit_count(), 2u);
  EXPECT_TRUE(smsc->ledger().received.empty());
}

std::vector<std::tuple<std::string, std::string, std::string>> run_seeded(std::uint64_t seed) {
  SimConfig sc;
  sc.rng_seed = seed;
  sc.drop_resp_rate = 0.3;
  sc.ack_latency_max_ms = 3;
  auto smsc = SmscSim::run(sc);
  auto cfg = session_for(*smsc);
  cfg.response_timeout = 100ms;
  cfg.retry_max = 10;
  auto s = Session::connect_and_bind(cfg);
  for (int i = 0; i < 15; ++i) s->submit("+6011000000" + std::to_string(i % 10), "n" + std::to_string(i));
  std::vector<std::tuple<std::string, std::string, std::string>> out;
  for (const auto& e : smsc->ledger().received) out.emplace_back(e.message_id, e.dest, e.text);
  return out;
}

TEST(SmscSim, SameSeedSameLedger) {
  auto a = run_seeded(42);
  auto b = run_seeded(42);
  EXPECT_EQ(a, b);
  EXPECT_GT(a.size(), 15u);  // 30% drops force resubmissions
}

TEST(SmscSim, AnswersUnknownCommandWithGenericNack) {
  auto smsc = SmscSim::run({});
  auto sock = net::connect_tcp("127.0.0.1", smsc->port(), 1s);
  const smpp::Bytes unknown = {0, 0, 0, 16, 0, 0, 0, 0x99, 0, 0, 0, 0, 0, 0, 0, 9};
  ASSERT_TRUE(sock.send_all(unknown));
  net::FrameBuffer frames;
  auto p = ScriptedSmsc::read_pdu(sock, frames);
  ASSERT_TRUE(p);
  EXPECT_TRUE(p->as<smpp::GenericNack>());
  EXPECT_EQ(p->command_status, smpp::status::kInvalidCmdId);
  EXPECT_EQ(p->sequence_number, 9u);
}

TEST(SmscSim, SubmitBeforeBindIsRefused) {
  auto smsc = SmscSim::run({});
  auto sock = net::connect_tcp("127.0.0.1", smsc->port(), 1s);
  smpp::SubmitSm sm;
  sm.destination_addr = "60123";
  sm.short_message = {'h'};
  ASSERT_TRUE(sock.send_all(smpp::encode(smpp::Pdu{0, 3, sm})));
  net::FrameBuffer frames;
  auto p = ScriptedSmsc::read_pdu(sock, frames);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->command_status, smpp::status::kInvalidBindStatus);
  EXPECT_EQ(p->sequence_number, 3u);
}

TEST(SmscSim, LedgerJsonLines) {
  auto smsc = SmscSim::run({});
  auto s = Session::connect_and_bind(session_for(*smsc));
  s->submit("+60123456789", "first");
  s->submit("+60123456780", "second");
  auto text = sim::ledger_json_lines(smsc->ledger());
  std::istringstream in(text);
  std::string line;
  std::vector<nlohmann::json> rows;
  while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["text"], "first");
  EXPECT_EQ(rows[1]["dest"], "+60123456780");
  EXPECT_EQ(rows[1]["message_id"], "2");
}

}  // namespace
}  // namespace announcer

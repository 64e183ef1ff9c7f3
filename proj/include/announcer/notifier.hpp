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

// Batch building, approval, dispatch and receipts, persisted alongside the
// registry. The email channel writes RFC 5322 files into a spool directory.

#include <atomic>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "announcer/batch.hpp"
#include "announcer/config.hpp"
#include "announcer/gateway.hpp"
#include "announcer/registry.hpp"
#include "announcer/scans.hpp"
#include "announcer/templates.hpp"

namespace announcer {

using Clock = std::function<Timestamp()>;
Timestamp system_now();

struct NotifierConfig {
  TimeZone tz;
  int cooldown_days = 7;
  FinePolicy fines;
  bool suppress_empty = true;
  std::filesystem::path spool_dir = "spool";
  std::string email_from = "noreply@campus.example";
  ChannelPolicy default_policy = ChannelPolicy::kSmsFirst;
  std::size_t dispatch_concurrency = 10;  ///< parallel submits per batch; match the SMPP window

  /// Throws Error("BAD_CONFIG") for an unknown channel_policy.
  static NotifierConfig from(const Config& cfg);
};

/// One recipient-to-be, before channel selection.
struct BatchItem {
  std::string student_id;
  Bindings bindings;  ///< {name} is filled from the registry when absent
  std::optional<DedupReason> reason;
  std::string reference;
};

enum class AutorunKind { kFees, kLibrary };
const char* to_string(AutorunKind kind);
std::optional<AutorunKind> parse_autorun_kind(std::string_view s);  ///< "fees" or "library"

/// Writes `<msg_id>.eml` atomically. Throws Error("SPOOL_IO_ERROR").
std::filesystem::path spool_email(const OutboundMessage& msg, const std::filesystem::path& spool_dir,
                                  const std::string& from, Timestamp now);

class Notifier {
 public:
  Notifier(std::shared_ptr<Registry> registry, NotifierConfig cfg, TemplateSet templates = {},
           Clock clock = system_now);

  Registry& registry() { return *registry_; }
  const NotifierConfig& config() const { return cfg_; }
  Timestamp now() const { return clock_(); }
  /// Campus-local calendar date of now().
  Date today() const { return cfg_.tz.local_date(clock_()); }

  std::vector<OverdueFee> scan_fees(Date as_of) const;
  std::vector<OverdueLoan> scan_loans(Date as_of) const;
  std::vector<BatchItem> fee_items(const std::vector<OverdueFee>& rows) const;
  std::vector<BatchItem> loan_items(const std::vector<OverdueLoan>& rows) const;

  /// Renders every item, picks channels, applies dedup, and stores the batch
  /// as PENDING_APPROVAL (APPROVED for LECTURER_ANNOUNCE). When nothing is
  /// sendable the batch is still stored, with warning EMPTY_BATCH.
  /// Throws Error("MISSING_BINDING").
  Batch build_batch(BatchKind kind, TemplateKey tmpl, const std::vector<BatchItem>& items, ChannelPolicy policy,
                    const std::string& created_by);

  /// Lecturer send: one ANNOUNCE message per student, SMS_FIRST, auto-approved.
  /// Throws Error("UNKNOWN_STUDENT"), Error("NOT_YOUR_STUDENT"), Error("BAD_FIELD").
  Batch announce(const std::string& lecturer_id, const std::vector<std::string>& student_ids,
                 const std::string& body);

  /// Staff-picked reminders: invoice ids for the fee kinds, loan ids for
  /// LIBRARY_AUTORUN. Every reference must appear in the scan at `as_of`.
  /// Throws Error("BAD_REFERENCE") or Error("BAD_FIELD").
  Batch batch_from_refs(BatchKind kind, const std::vector<std::string>& refs, ChannelPolicy policy,
                        const std::string& created_by, Date as_of);

  /// Role is checked before state. Throws Error("NOT_FOUND"),
  /// Error("FORBIDDEN_ROLE"), Error("WRONG_STATE").
  Batch decide_batch(std::int64_t batch_id, const std::string& decider_id, Decision decision);

  /// Sends every PENDING message of an APPROVED batch, or resumes one left
  /// DISPATCHING. Per-message failures are recorded, not thrown.
  /// Throws Error("NOT_FOUND") or Error("WRONG_STATE").
  DispatchReport dispatch_batch(std::int64_t batch_id, gateway::SmsSender& sender);

  /// Applies a delivery receipt to the SENT message carrying that SMSC id.
  /// Receipts that race ahead of the SENT mark are held until it lands.
  void on_receipt(const smpp::Receipt& receipt);

  /// Scan at the campus date of `now`, build, and leave PENDING_APPROVAL.
  /// nullopt when nothing is sendable and suppress_empty is set. A tick for a
  /// kind already running throws Error("TICK_IN_PROGRESS").
  std::optional<Batch> autorun_tick(AutorunKind kind, Timestamp now);

  std::optional<Batch> batch(std::int64_t batch_id) const;
  /// Newest first; messages are not loaded.
  std::vector<Batch> batches(std::optional<BatchState> state = std::nullopt,
                             std::optional<std::string> created_by = std::nullopt) const;
  /// Throws Error("NOT_FOUND").
  DispatchReport report(std::int64_t batch_id) const;
  /// Batches approved but not finished, oldest first.
  std::vector<std::int64_t> unfinished_batches() const;

  /// True if a message for this key was sent within the cooldown, or is
  /// waiting in another open batch.
  bool dedup_live(const std::string& student_id, DedupReason reason, const std::string& reference, Timestamp now,
                  std::optional<std::int64_t> exclude_batch = std::nullopt) const;

 private:
  void create_schema();
  // Must run inside a write transaction so dedup sees a stable view.
  Batch assemble(BatchKind kind, TemplateKey tmpl, const std::vector<BatchItem>& items, ChannelPolicy policy,
                 const std::string& created_by, Timestamp now) const;
  Batch store(Batch batch);
  bool sent_recently(const std::string& student_id, DedupReason reason, const std::string& reference,
                     Timestamp now, std::optional<std::int64_t> exclude_batch) const;
  std::vector<OutboundMessage> load_messages(std::int64_t batch_id) const;
  void set_state(std::int64_t batch_id, BatchState state);
  void send_one(const OutboundMessage& msg, gateway::SmsSender& sender);
  void mark_sent(const OutboundMessage& msg, const std::optional<std::string>& smsc_id);
  void mark(std::int64_t msg_id, MessageStatus status, const std::optional<std::string>& error);
  void apply_receipt(const OutboundMessage& msg, smpp::ReceiptStat stat);

  std::shared_ptr<Registry> registry_;
  Database& db_;
  NotifierConfig cfg_;
  TemplateSet templates_;
  Clock clock_;

  std::mutex early_mu_;
  std::map<std::string, smpp::ReceiptStat> early_receipts_;

  std::mutex active_mu_;
  std::set<std::int64_t> active_;  // batches being dispatched right now

  std::mutex fees_tick_mu_;
  std::mutex library_tick_mu_;
};

/// Runs dispatch_batch on a background thread so callers never wait for a
/// batch to finish.
class Dispatcher {
 public:
  Dispatcher(Notifier& notifier, gateway::SmsSender& sender);
  ~Dispatcher();

  void enqueue(std::int64_t batch_id);
  /// Blocks until the queue is empty and nothing is running.
  void wait_idle();
  void stop();

 private:
  void loop();

  Notifier& notifier_;
  gateway::SmsSender& sender_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::int64_t> queue_;
  bool busy_ = false;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace announcer

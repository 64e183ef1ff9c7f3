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

#include "announcer/notifier.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <tuple>

#include "announcer/error.hpp"
#include "announcer/smpp/gsm7.hpp"

namespace announcer {

namespace {

constexpr const char* kMessageColumns =
    "msg_id, batch_id, student_id, channel, dest, subject, body, status, smsc_message_id, attempts, reason, "
    "reference, error, sent_at";

OutboundMessage message_from(const Statement& st) {
  OutboundMessage m;
  m.msg_id = st.int64(0);
  m.batch_id = st.int64(1);
  m.student_id = st.text(2);
  m.channel = parse_channel(st.text(3)).value_or(Channel::kSms);
  m.dest = st.text(4);
  m.subject = st.text(5);
  m.body = st.text(6);
  m.status = parse_message_status(st.text(7)).value_or(MessageStatus::kPending);
  m.smsc_message_id = st.optional_text(8);
  m.attempts = static_cast<int>(st.int64(9));
  if (auto r = st.optional_text(10)) m.reason = parse_dedup_reason(*r);
  m.reference = st.text(11);
  m.error = st.optional_text(12);
  if (auto t = st.optional_text(13)) m.sent_at = parse_iso8601(*t);
  return m;
}

constexpr const char* kBatchColumns = "batch_id, kind, created_by, state, created_at, decided_at, decided_by, warning";

Batch batch_from(const Statement& st) {
  Batch b;
  b.batch_id = st.int64(0);
  b.kind = parse_batch_kind(st.text(1)).value_or(BatchKind::kLecturerAnnounce);
  b.created_by = st.text(2);
  b.state = parse_batch_state(st.text(3)).value_or(BatchState::kDraft);
  b.created_at = parse_iso8601(st.text(4)).value_or(Timestamp{});
  if (auto t = st.optional_text(5)) b.decided_at = parse_iso8601(*t);
  b.decided_by = st.optional_text(6);
  b.warning = st.optional_text(7);
  return b;
}

std::string subject_for(TemplateKey key) {
  switch (key) {
    case TemplateKey::kFeeReminder: return "Outstanding tuition fee";
    case TemplateKey::kBookReminder: return "Overdue library book";
    case TemplateKey::kAnnounce: return "Announcement from your lecturer";
  }
  return "Notice";
}

std::optional<std::string> opt(const char* s) { return s ? std::optional<std::string>(s) : std::nullopt; }

}  // namespace

Timestamp system_now() {
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

NotifierConfig NotifierConfig::from(const Config& c) {
  NotifierConfig n;
  n.tz = TimeZone::parse(c.timezone);
  n.cooldown_days = c.cooldown_days;
  n.fines = FinePolicy{c.fine_rate_per_day, c.fine_cap};
  n.suppress_empty = c.suppress_empty;
  n.spool_dir = c.spool_dir;
  n.email_from = c.email_from;
  auto policy = parse_channel_policy(c.channel_policy);
  if (!policy) throw Error("BAD_CONFIG", "channel_policy: " + c.channel_policy);
  n.default_policy = *policy;
  n.dispatch_concurrency = c.window_size;
  return n;
}

const char* to_string(AutorunKind kind) { return kind == AutorunKind::kFees ? "fees" : "library"; }

std::optional<AutorunKind> parse_autorun_kind(std::string_view s) {
  if (s == "fees" || s == "FEES") return AutorunKind::kFees;
  if (s == "library" || s == "LIBRARY") return AutorunKind::kLibrary;
  return std::nullopt;
}

std::filesystem::path spool_email(const OutboundMessage& msg, const std::filesystem::path& spool_dir,
                                  const std::string& from, Timestamp now) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(spool_dir, ec);
  if (ec) throw Error("SPOOL_IO_ERROR", spool_dir.string() + ": " + ec.message());
  auto name = std::to_string(msg.msg_id) + ".eml";
  auto final_path = spool_dir / name;
  auto tmp_path = spool_dir / ("." + name + ".tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("SPOOL_IO_ERROR", tmp_path.string() + ": cannot create");
    out << "From: " << from << "\r\n"
        << "To: " << msg.dest << "\r\n"
        << "Subject: " << msg.subject << "\r\n"
        << "Date: " << format_rfc5322(now) << "\r\n"
        << "Message-ID: <" << msg.msg_id << "." << msg.batch_id << "@announcer>\r\n"
        << "MIME-Version: 1.0\r\n"
        << "Content-Type: text/plain; charset=UTF-8\r\n"
        << "\r\n"
        << msg.body << "\r\n";
    out.flush();
    if (!out) {
      fs::remove(tmp_path, ec);
      throw Error("SPOOL_IO_ERROR", tmp_path.string() + ": write failed");
    }
  }
  fs::rename(tmp_path, final_path, ec);
  if (ec) {
    fs::remove(tmp_path, ec);
    throw Error("SPOOL_IO_ERROR", final_path.string() + ": rename failed");
  }
  return final_path;
}

Notifier::Notifier(std::shared_ptr<Registry> registry, NotifierConfig cfg, TemplateSet templates, Clock clock)
    : registry_(std::move(registry)),
      db_(registry_->database()),
      cfg_(std::move(cfg)),
      templates_(std::move(templates)),
      clock_(std::move(clock)) {
  create_schema();
}

void Notifier::create_schema() {
  db_.write([&] {
    db_.exec(R"sql(
      CREATE TABLE IF NOT EXISTS batches (
        batch_id INTEGER PRIMARY KEY AUTOINCREMENT,
        kind TEXT NOT NULL,
        created_by TEXT NOT NULL,
        state TEXT NOT NULL,
        created_at TEXT NOT NULL,
        decided_at TEXT,
        decided_by TEXT,
        warning TEXT
      );
      CREATE TABLE IF NOT EXISTS messages (
        msg_id INTEGER PRIMARY KEY AUTOINCREMENT,
        batch_id INTEGER NOT NULL REFERENCES batches(batch_id),
        student_id TEXT NOT NULL,
        channel TEXT NOT NULL,
        dest TEXT NOT NULL,
        subject TEXT NOT NULL,
        body TEXT NOT NULL,
        status TEXT NOT NULL,
        smsc_message_id TEXT,
        attempts INTEGER NOT NULL DEFAULT 0,
        reason TEXT,
        reference TEXT NOT NULL DEFAULT '',
        error TEXT,
        sent_at TEXT
      );
      CREATE INDEX IF NOT EXISTS messages_by_batch ON messages(batch_id);
      CREATE INDEX IF NOT EXISTS messages_by_smsc ON messages(smsc_message_id);
      CREATE INDEX IF NOT EXISTS messages_by_key ON messages(student_id, reason, reference);
      CREATE TABLE IF NOT EXISTS dedup (
        student_id TEXT NOT NULL,
        reason TEXT NOT NULL,
        reference TEXT NOT NULL,
        sent_at TEXT NOT NULL,
        batch_id INTEGER NOT NULL,
        PRIMARY KEY (student_id, reason, reference)
      );
    )sql");
  });
}

std::vector<OverdueFee> Notifier::scan_fees(Date as_of) const { return scan_overdue_fees(registry_->fees(), as_of); }

std::vector<OverdueLoan> Notifier::scan_loans(Date as_of) const {
  return scan_overdue_loans(registry_->loans(), as_of, cfg_.fines);
}

std::vector<BatchItem> Notifier::fee_items(const std::vector<OverdueFee>& rows) const {
  std::vector<BatchItem> items;
  for (const auto& r : rows) {
    items.push_back({r.fee.student_id,
                     {{"amount", r.balance.str()}, {"due_date", r.fee.due_date.str()}},
                     DedupReason::kFeeOverdue,
                     r.fee.invoice_id});
  }
  return items;
}

std::vector<BatchItem> Notifier::loan_items(const std::vector<OverdueLoan>& rows) const {
  std::vector<BatchItem> items;
  for (const auto& r : rows) {
    items.push_back({r.loan.student_id,
                     {{"book_title", r.loan.book_title}, {"due_date", r.loan.due_date.str()}, {"fine", r.fine.str()}},
                     DedupReason::kBookOverdue,
                     r.loan.loan_id});
  }
  return items;
}

bool Notifier::sent_recently(const std::string& student_id, DedupReason reason, const std::string& reference,
                             Timestamp now, std::optional<std::int64_t> exclude_batch) const {
  if (cfg_.cooldown_days <= 0) return false;
  auto cutoff = format_iso8601(now - std::chrono::days(cfg_.cooldown_days));
  return db_.read([&] {
    auto st = db_.prepare("SELECT 1 FROM dedup WHERE student_id = ? AND reason = ? AND reference = ? "
                          "AND sent_at > ? AND batch_id != ?");
    st.bind_all(student_id, to_string(reason), reference, cutoff, exclude_batch.value_or(-1));
    return st.step();
  });
}

bool Notifier::dedup_live(const std::string& student_id, DedupReason reason, const std::string& reference,
                          Timestamp now, std::optional<std::int64_t> exclude_batch) const {
  if (sent_recently(student_id, reason, reference, now, exclude_batch)) return true;
  return db_.read([&] {
    auto st = db_.prepare(
        "SELECT 1 FROM messages m JOIN batches b ON b.batch_id = m.batch_id "
        "WHERE m.student_id = ? AND m.reason = ? AND m.reference = ? AND m.status = 'PENDING' "
        "AND b.state IN ('PENDING_APPROVAL', 'APPROVED', 'DISPATCHING') AND b.batch_id != ? LIMIT 1");
    st.bind_all(student_id, to_string(reason), reference, exclude_batch.value_or(-1));
    return st.step();
  });
}

Batch Notifier::assemble(BatchKind kind, TemplateKey tmpl, const std::vector<BatchItem>& items,
                         ChannelPolicy policy, const std::string& created_by, Timestamp now) const {
  const Template& t = templates_.get(tmpl);
  Batch b;
  b.kind = kind;
  b.created_by = created_by;
  b.created_at = now;
  std::set<std::tuple<std::string, DedupReason, std::string>> seen;

  for (const auto& item : items) {
    auto student = registry_->student(item.student_id);
    Bindings bindings = item.bindings;
    if (!bindings.count("name")) bindings["name"] = student ? student->name : item.student_id;

    OutboundMessage proto;
    proto.student_id = item.student_id;
    proto.subject = subject_for(tmpl);
    proto.body = render(t, bindings);
    proto.reason = item.reason;
    proto.reference = item.reference;

    std::vector<std::pair<Channel, std::string>> routes;
    if (student) {
      std::pair<Channel, std::string> sms{Channel::kSms, student->phone}, email{Channel::kEmail, student->email};
      const auto& first = policy == ChannelPolicy::kEmailFirst ? email : sms;
      const auto& second = policy == ChannelPolicy::kEmailFirst ? sms : email;
      if (!first.second.empty()) routes.push_back(first);
      if ((policy == ChannelPolicy::kBoth || routes.empty()) && !second.second.empty()) routes.push_back(second);
    }

    if (routes.empty()) {
      proto.status = MessageStatus::kSkippedNoContact;
      b.messages.push_back(proto);
      continue;
    }
    if (item.reason) {
      bool repeat = !seen.emplace(item.student_id, *item.reason, item.reference).second;
      if (repeat || dedup_live(item.student_id, *item.reason, item.reference, now)) {
        proto.channel = routes.front().first;
        proto.dest = routes.front().second;
        proto.status = MessageStatus::kSkippedDedup;
        b.messages.push_back(proto);
        continue;
      }
    }
    for (const auto& [channel, dest] : routes) {
      auto m = proto;
      m.channel = channel;
      m.dest = dest;
      b.messages.push_back(std::move(m));
    }
  }

  auto event = kind == BatchKind::kLecturerAnnounce ? BatchEvent::kAutoApprove : BatchEvent::kSubmit;
  b.state = *transition(BatchState::kDraft, event, kind);
  bool sendable = std::any_of(b.messages.begin(), b.messages.end(),
                              [](const auto& m) { return m.status == MessageStatus::kPending; });
  if (!sendable) b.warning = "EMPTY_BATCH";
  return b;
}

Batch Notifier::store(Batch b) {
  db_.write([&] {
    auto ins = db_.prepare("INSERT INTO batches (kind, created_by, state, created_at, warning) VALUES (?, ?, ?, ?, ?)");
    ins.bind_all(to_string(b.kind), b.created_by, to_string(b.state), format_iso8601(b.created_at), b.warning);
    ins.run();
    b.batch_id = db_.last_insert_rowid();
    auto msg = db_.prepare(
        "INSERT INTO messages (batch_id, student_id, channel, dest, subject, body, status, reason, reference) "
        "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)");
    for (auto& m : b.messages) {
      m.batch_id = b.batch_id;
      msg.reset();
      msg.bind_all(m.batch_id, m.student_id, to_string(m.channel), m.dest, m.subject, m.body, to_string(m.status),
                   m.reason ? opt(to_string(*m.reason)) : std::nullopt, m.reference);
      msg.run();
      m.msg_id = db_.last_insert_rowid();
    }
  });
  spdlog::info("batch {} {} by {}: {} messages, {}", b.batch_id, to_string(b.kind), b.created_by, b.messages.size(),
               to_string(b.state));
  return b;
}

Batch Notifier::build_batch(BatchKind kind, TemplateKey tmpl, const std::vector<BatchItem>& items,
                            ChannelPolicy policy, const std::string& created_by) {
  auto now = clock_();
  return db_.write([&] { return store(assemble(kind, tmpl, items, policy, created_by, now)); });
}

Batch Notifier::announce(const std::string& lecturer_id, const std::vector<std::string>& student_ids,
                         const std::string& body) {
  auto staff = registry_->staff(lecturer_id);
  if (!staff) throw Error("UNKNOWN_STAFF", lecturer_id);
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) throw Error("BAD_FIELD", "body is empty");
  if (student_ids.empty()) throw Error("BAD_FIELD", "no recipients");
  smpp::segment(body, 0);  // throws TOO_MANY_SEGMENTS for oversized bodies

  std::set<std::string> allowed;
  if (staff->role == Role::kLecturer)
    for (const auto& s : registry_->students_for_lecturer(lecturer_id)) allowed.insert(s.student_id);

  std::vector<BatchItem> items;
  std::set<std::string> added;
  for (const auto& id : student_ids) {
    if (!registry_->student(id)) throw Error("UNKNOWN_STUDENT", id);
    if (staff->role == Role::kLecturer && !allowed.count(id)) throw Error("NOT_YOUR_STUDENT", id);
    if (added.insert(id).second) items.push_back({id, {{"body", body}}, std::nullopt, ""});
  }
  return build_batch(BatchKind::kLecturerAnnounce, TemplateKey::kAnnounce, items, ChannelPolicy::kSmsFirst,
                     lecturer_id);
}

Batch Notifier::batch_from_refs(BatchKind kind, const std::vector<std::string>& refs, ChannelPolicy policy,
                                const std::string& created_by, Date as_of) {
  if (kind == BatchKind::kLecturerAnnounce) throw Error("BAD_FIELD", "use announce for lecturer batches");
  if (refs.empty()) throw Error("BAD_FIELD", "item_refs is empty");
  std::set<std::string> wanted(refs.begin(), refs.end());
  if (kind == BatchKind::kLibraryAutorun) {
    std::vector<OverdueLoan> picked;
    for (auto& row : scan_loans(as_of))
      if (wanted.erase(row.loan.loan_id)) picked.push_back(row);
    if (!wanted.empty()) throw Error("BAD_REFERENCE", *wanted.begin() + " is not an overdue loan on " + as_of.str());
    return build_batch(kind, TemplateKey::kBookReminder, loan_items(picked), policy, created_by);
  }
  std::vector<OverdueFee> picked;
  for (auto& row : scan_fees(as_of))
    if (wanted.erase(row.fee.invoice_id)) picked.push_back(row);
  if (!wanted.empty()) throw Error("BAD_REFERENCE", *wanted.begin() + " is not an overdue invoice on " + as_of.str());
  return build_batch(kind, TemplateKey::kFeeReminder, fee_items(picked), policy, created_by);
}

Batch Notifier::decide_batch(std::int64_t batch_id, const std::string& decider_id, Decision decision) {
  auto now = clock_();
  db_.write([&] {
    auto current = batch(batch_id);
    if (!current) throw Error("NOT_FOUND", "batch " + std::to_string(batch_id));
    auto staff = registry_->staff(decider_id);
    if (!staff || !may_decide(staff->role, current->kind))
      throw Error("FORBIDDEN_ROLE", std::string(staff ? to_string(staff->role) : "unknown staff") +
                                        " may not decide " + to_string(current->kind) + " batches");
    auto event = decision == Decision::kApprove ? BatchEvent::kApprove : BatchEvent::kReject;
    auto next = transition(current->state, event, current->kind);
    if (!next)
      throw Error("WRONG_STATE", std::string("cannot ") + to_string(event) + " a " + to_string(current->state) +
                                     " batch");
    auto st = db_.prepare("UPDATE batches SET state = ?, decided_at = ?, decided_by = ? WHERE batch_id = ?");
    st.bind_all(to_string(*next), format_iso8601(now), decider_id, batch_id);
    st.run();
  });
  spdlog::info("batch {} {} by {}", batch_id, decision == Decision::kApprove ? "approved" : "rejected", decider_id);
  return *batch(batch_id);
}

void Notifier::set_state(std::int64_t batch_id, BatchState state) {
  auto st = db_.prepare("UPDATE batches SET state = ? WHERE batch_id = ?");
  st.bind_all(to_string(state), batch_id);
  st.run();
}

DispatchReport Notifier::dispatch_batch(std::int64_t batch_id, gateway::SmsSender& sender) {
  {
    std::lock_guard lock(active_mu_);
    if (!active_.insert(batch_id).second)
      throw Error("WRONG_STATE", "batch " + std::to_string(batch_id) + " is already being dispatched");
  }
  struct Release {
    Notifier* self;
    std::int64_t id;
    ~Release() {
      std::lock_guard lock(self->active_mu_);
      self->active_.erase(id);
    }
  } release{this, batch_id};

  db_.write([&] {
    auto current = batch(batch_id);
    if (!current) throw Error("NOT_FOUND", "batch " + std::to_string(batch_id));
    if (current->state == BatchState::kDispatching) {
      spdlog::info("batch {}: resuming dispatch", batch_id);
      return;
    }
    auto next = transition(current->state, BatchEvent::kStartDispatch, current->kind);
    if (!next) throw Error("WRONG_STATE", std::string("cannot dispatch a ") + to_string(current->state) + " batch");
    set_state(batch_id, *next);
  });

  std::vector<OutboundMessage> pending;
  for (auto& m : load_messages(batch_id))
    if (m.status == MessageStatus::kPending) pending.push_back(std::move(m));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex crash_mu;
  std::exception_ptr crash;
  auto work = [&] {
    while (!abort.load()) {
      auto i = next++;
      if (i >= pending.size()) return;
      try {
        send_one(pending[i], sender);
      } catch (...) {
        std::lock_guard lock(crash_mu);
        if (!crash) crash = std::current_exception();
        abort = true;
      }
    }
  };
  auto workers = std::min(std::max<std::size_t>(cfg_.dispatch_concurrency, 1), pending.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < workers; ++i) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (crash) std::rethrow_exception(crash);  // batch stays DISPATCHING for a later resume

  db_.write([&] { set_state(batch_id, *transition(BatchState::kDispatching, BatchEvent::kComplete, BatchKind{})); });
  auto r = report(batch_id);
  spdlog::info("batch {} completed: sent {} delivered {} failed {} skipped {}", batch_id, r.sent, r.delivered,
               r.failed, r.skipped);
  return r;
}

void Notifier::send_one(const OutboundMessage& msg, gateway::SmsSender& sender) {
  auto now = clock_();
  if (msg.reason && sent_recently(msg.student_id, *msg.reason, msg.reference, now, msg.batch_id)) {
    mark(msg.msg_id, MessageStatus::kSkippedDedup, std::nullopt);
    return;
  }
  db_.write([&] {
    auto st = db_.prepare("UPDATE messages SET attempts = attempts + 1 WHERE msg_id = ?");
    st.bind(1, msg.msg_id);
    st.run();
  });
  std::optional<std::string> smsc_id;
  try {
    if (msg.channel == Channel::kSms)
      smsc_id = sender.submit(msg.dest, msg.body).message_id;
    else
      spool_email(msg, cfg_.spool_dir, cfg_.email_from, now);
  } catch (const Error& e) {
    spdlog::warn("message {} to {} failed: {}", msg.msg_id, msg.dest, e.what());
    mark(msg.msg_id, MessageStatus::kFailed, e.what());
    return;
  }
  mark_sent(msg, smsc_id);
}

void Notifier::mark(std::int64_t msg_id, MessageStatus status, const std::optional<std::string>& error) {
  db_.write([&] {
    auto st = db_.prepare("UPDATE messages SET status = ?, error = ? WHERE msg_id = ?");
    st.bind_all(to_string(status), error, msg_id);
    st.run();
  });
}

void Notifier::mark_sent(const OutboundMessage& msg, const std::optional<std::string>& smsc_id) {
  auto now = clock_();
  db_.write([&] {
    auto st = db_.prepare("UPDATE messages SET status = 'SENT', smsc_message_id = ?, error = NULL, sent_at = ? WHERE msg_id = ?");
    st.bind_all(smsc_id, format_iso8601(now), msg.msg_id);
    st.run();
    if (msg.reason) {
      auto d = db_.prepare("INSERT OR REPLACE INTO dedup (student_id, reason, reference, sent_at, batch_id) "
                           "VALUES (?, ?, ?, ?, ?)");
      d.bind_all(msg.student_id, to_string(*msg.reason), msg.reference, format_iso8601(now), msg.batch_id);
      d.run();
    }
    if (smsc_id) {
      std::optional<smpp::ReceiptStat> early;
      {
        std::lock_guard lock(early_mu_);
        if (auto it = early_receipts_.find(*smsc_id); it != early_receipts_.end()) {
          early = it->second;
          early_receipts_.erase(it);
        }
      }
      if (early) apply_receipt(msg, *early);
    }
  });
}

void Notifier::apply_receipt(const OutboundMessage& msg, smpp::ReceiptStat stat) {
  switch (stat) {
    case smpp::ReceiptStat::kDelivered: mark(msg.msg_id, MessageStatus::kDelivered, std::nullopt); break;
    case smpp::ReceiptStat::kExpired:
    case smpp::ReceiptStat::kUndeliverable:
    case smpp::ReceiptStat::kRejected:
      mark(msg.msg_id, MessageStatus::kFailed, std::string("receipt: ") + smpp::to_string(stat));
      break;
    case smpp::ReceiptStat::kUnknown: break;
  }
}

void Notifier::on_receipt(const smpp::Receipt& receipt) {
  db_.write([&] {
    auto st = db_.prepare(std::string("SELECT ") + kMessageColumns +
                          " FROM messages WHERE smsc_message_id = ? AND channel = 'SMS' AND status = 'SENT' "
                          "ORDER BY msg_id DESC LIMIT 1");
    st.bind(1, receipt.message_id);
    if (st.step()) {
      apply_receipt(message_from(st), receipt.stat);
      return;
    }
    std::lock_guard lock(early_mu_);
    if (early_receipts_.size() >= 10000) early_receipts_.erase(early_receipts_.begin());
    early_receipts_[receipt.message_id] = receipt.stat;
  });
}

std::optional<Batch> Notifier::autorun_tick(AutorunKind kind, Timestamp now) {
  auto& mu = kind == AutorunKind::kFees ? fees_tick_mu_ : library_tick_mu_;
  std::unique_lock lock(mu, std::try_to_lock);
  if (!lock.owns_lock()) throw Error("TICK_IN_PROGRESS", std::string(to_string(kind)) + " autorun is still running");

  auto as_of = cfg_.tz.local_date(now);
  std::vector<BatchItem> items;
  BatchKind batch_kind;
  TemplateKey tmpl;
  if (kind == AutorunKind::kFees) {
    items = fee_items(scan_fees(as_of));
    batch_kind = BatchKind::kFeesAutorun;
    tmpl = TemplateKey::kFeeReminder;
  } else {
    items = loan_items(scan_loans(as_of));
    batch_kind = BatchKind::kLibraryAutorun;
    tmpl = TemplateKey::kBookReminder;
  }
  auto result = db_.write([&]() -> std::optional<Batch> {
    auto b = assemble(batch_kind, tmpl, items, cfg_.default_policy, "autorun", now);
    if (b.warning && cfg_.suppress_empty) return std::nullopt;
    return store(std::move(b));
  });
  if (!result)
    spdlog::info("autorun {} at {}: nothing to send ({} overdue, all deduplicated or unreachable)", to_string(kind),
                 as_of.str(), items.size());
  return result;
}

std::vector<OutboundMessage> Notifier::load_messages(std::int64_t batch_id) const {
  return db_.read([&] {
    auto st = db_.prepare(std::string("SELECT ") + kMessageColumns + " FROM messages WHERE batch_id = ? ORDER BY msg_id");
    st.bind(1, batch_id);
    std::vector<OutboundMessage> out;
    while (st.step()) out.push_back(message_from(st));
    return out;
  });
}

std::optional<Batch> Notifier::batch(std::int64_t batch_id) const {
  return db_.read([&]() -> std::optional<Batch> {
    auto st = db_.prepare(std::string("SELECT ") + kBatchColumns + " FROM batches WHERE batch_id = ?");
    st.bind(1, batch_id);
    if (!st.step()) return std::nullopt;
    auto b = batch_from(st);
    b.messages = load_messages(batch_id);
    return b;
  });
}

std::vector<Batch> Notifier::batches(std::optional<BatchState> state, std::optional<std::string> created_by) const {
  return db_.read([&] {
    auto st = db_.prepare(std::string("SELECT ") + kBatchColumns +
                          " FROM batches WHERE (?1 IS NULL OR state = ?1) AND (?2 IS NULL OR created_by = ?2) "
                          "ORDER BY batch_id DESC");
    st.bind(1, state ? opt(to_string(*state)) : std::nullopt);
    st.bind(2, created_by);
    std::vector<Batch> out;
    while (st.step()) out.push_back(batch_from(st));
    return out;
  });
}

DispatchReport Notifier::report(std::int64_t batch_id) const {
  auto b = batch(batch_id);
  if (!b) throw Error("NOT_FOUND", "batch " + std::to_string(batch_id));
  return DispatchReport::of(b->messages);
}

std::vector<std::int64_t> Notifier::unfinished_batches() const {
  return db_.read([&] {
    auto st = db_.prepare("SELECT batch_id FROM batches WHERE state IN ('APPROVED', 'DISPATCHING') ORDER BY batch_id");
    std::vector<std::int64_t> out;
    while (st.step()) out.push_back(st.int64(0));
    return out;
  });
}

Dispatcher::Dispatcher(Notifier& notifier, gateway::SmsSender& sender)
    : notifier_(notifier), sender_(sender), worker_([this] { loop(); }) {}

Dispatcher::~Dispatcher() { stop(); }

void Dispatcher::enqueue(std::int64_t batch_id) {
  {
    std::lock_guard lock(mu_);
    queue_.push_back(batch_id);
  }
  cv_.notify_all();
}

void Dispatcher::wait_idle() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return (queue_.empty() && !busy_) || stopping_; });
}

void Dispatcher::stop() {
  {
    std::lock_guard lock(mu_);
    if (stopping_ && !worker_.joinable()) return;
    stopping_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

void Dispatcher::loop() {
  std::unique_lock lock(mu_);
  for (;;) {
    cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
    if (stopping_) return;
    auto id = queue_.front();
    queue_.pop_front();
    busy_ = true;
    lock.unlock();
    try {
      notifier_.dispatch_batch(id, sender_);
    } catch (const std::exception& e) {
      spdlog::error("dispatch of batch {} stopped: {}", id, e.what());
    }
    lock.lock();
    busy_ = false;
    cv_.notify_all();
  }
}

}  // namespace announcer

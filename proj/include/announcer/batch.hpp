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

// Outbound messages, approvable batches and the batch lifecycle.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "announcer/civil.hpp"
#include "announcer/registry.hpp"

namespace announcer {

enum class Channel { kSms, kEmail };
enum class MessageStatus { kPending, kSent, kDelivered, kFailed, kSkippedDedup, kSkippedNoContact };
enum class ChannelPolicy { kSmsFirst, kEmailFirst, kBoth };
enum class DedupReason { kFeeOverdue, kBookOverdue };
enum class BatchKind { kLecturerAnnounce, kFeesAutorun, kFeesManual, kLibraryAutorun };
enum class BatchState { kDraft, kPendingApproval, kApproved, kRejected, kDispatching, kCompleted };
enum class BatchEvent { kSubmit, kAutoApprove, kApprove, kReject, kStartDispatch, kComplete };
enum class Decision { kApprove, kReject };

const char* to_string(Channel v);
const char* to_string(MessageStatus v);
const char* to_string(ChannelPolicy v);
const char* to_string(DedupReason v);
const char* to_string(BatchKind v);
const char* to_string(BatchState v);
const char* to_string(BatchEvent v);

std::optional<Channel> parse_channel(std::string_view s);
std::optional<MessageStatus> parse_message_status(std::string_view s);
std::optional<ChannelPolicy> parse_channel_policy(std::string_view s);
std::optional<DedupReason> parse_dedup_reason(std::string_view s);
std::optional<BatchKind> parse_batch_kind(std::string_view s);
std::optional<BatchState> parse_batch_state(std::string_view s);

inline constexpr BatchState kAllStates[] = {BatchState::kDraft,    BatchState::kPendingApproval,
                                            BatchState::kApproved, BatchState::kRejected,
                                            BatchState::kDispatching, BatchState::kCompleted};
inline constexpr BatchEvent kAllEvents[] = {BatchEvent::kSubmit,        BatchEvent::kAutoApprove,
                                            BatchEvent::kApprove,       BatchEvent::kReject,
                                            BatchEvent::kStartDispatch, BatchEvent::kComplete};
inline constexpr BatchKind kAllKinds[] = {BatchKind::kLecturerAnnounce, BatchKind::kFeesAutorun,
                                          BatchKind::kFeesManual, BatchKind::kLibraryAutorun};

/// The lifecycle table. nullopt means the event is illegal in that state:
///   DRAFT --SUBMIT--> PENDING_APPROVAL          (all kinds but LECTURER_ANNOUNCE)
///   DRAFT --AUTO_APPROVE--> APPROVED            (LECTURER_ANNOUNCE only)
///   PENDING_APPROVAL --APPROVE--> APPROVED
///   PENDING_APPROVAL --REJECT--> REJECTED
///   APPROVED --START_DISPATCH--> DISPATCHING
///   DISPATCHING --COMPLETE--> COMPLETED
std::optional<BatchState> transition(BatchState from, BatchEvent event, BatchKind kind);

/// Roles allowed to approve or reject a batch of `kind`.
bool may_decide(Role role, BatchKind kind);

struct OutboundMessage {
  std::int64_t msg_id = 0;
  std::int64_t batch_id = 0;
  std::string student_id;
  Channel channel = Channel::kSms;
  std::string dest;  ///< E.164 for SMS, address for EMAIL, empty when skipped for no contact
  std::string subject;
  std::string body;
  MessageStatus status = MessageStatus::kPending;
  std::optional<std::string> smsc_message_id;
  int attempts = 0;
  std::optional<DedupReason> reason;
  std::string reference;  ///< invoice_id or loan_id for reminders
  std::optional<std::string> error;
  std::optional<Timestamp> sent_at;
};

struct Batch {
  std::int64_t batch_id = 0;
  BatchKind kind = BatchKind::kLecturerAnnounce;
  std::string created_by;
  BatchState state = BatchState::kDraft;
  std::vector<OutboundMessage> messages;
  Timestamp created_at{};
  std::optional<Timestamp> decided_at;
  std::optional<std::string> decided_by;
  std::optional<std::string> warning;  ///< EMPTY_BATCH when nothing is sendable
};

/// Counts by current message status; the fields partition the batch.
struct DispatchReport {
  std::size_t pending = 0;
  std::size_t sent = 0;
  std::size_t delivered = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;

  std::size_t total() const { return pending + sent + delivered + failed + skipped; }
  static DispatchReport of(const std::vector<OutboundMessage>& messages);
};

}  // namespace announcer

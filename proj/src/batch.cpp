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

#include "announcer/batch.hpp"

namespace announcer {

namespace {

template <class E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const E (&all)[N]) {
  for (auto v : all)
    if (s == to_string(v)) return v;
  return std::nullopt;
}

}  // namespace

const char* to_string(Channel v) { return v == Channel::kSms ? "SMS" : "EMAIL"; }

const char* to_string(MessageStatus v) {
  switch (v) {
    case MessageStatus::kPending: return "PENDING";
    case MessageStatus::kSent: return "SENT";
    case MessageStatus::kDelivered: return "DELIVERED";
    case MessageStatus::kFailed: return "FAILED";
    case MessageStatus::kSkippedDedup: return "SKIPPED_DEDUP";
    case MessageStatus::kSkippedNoContact: return "SKIPPED_NO_CONTACT";
  }
  return "?";
}

const char* to_string(ChannelPolicy v) {
  switch (v) {
    case ChannelPolicy::kSmsFirst: return "SMS_FIRST";
    case ChannelPolicy::kEmailFirst: return "EMAIL_FIRST";
    case ChannelPolicy::kBoth: return "BOTH";
  }
  return "?";
}

const char* to_string(DedupReason v) { return v == DedupReason::kFeeOverdue ? "FEE_OVERDUE" : "BOOK_OVERDUE"; }

const char* to_string(BatchKind v) {
  switch (v) {
    case BatchKind::kLecturerAnnounce: return "LECTURER_ANNOUNCE";
    case BatchKind::kFeesAutorun: return "FEES_AUTORUN";
    case BatchKind::kFeesManual: return "FEES_MANUAL";
    case BatchKind::kLibraryAutorun: return "LIBRARY_AUTORUN";
  }
  return "?";
}

const char* to_string(BatchState v) {
  switch (v) {
    case BatchState::kDraft: return "DRAFT";
    case BatchState::kPendingApproval: return "PENDING_APPROVAL";
    case BatchState::kApproved: return "APPROVED";
    case BatchState::kRejected: return "REJECTED";
    case BatchState::kDispatching: return "DISPATCHING";
    case BatchState::kCompleted: return "COMPLETED";
  }
  return "?";
}

const char* to_string(BatchEvent v) {
  switch (v) {
    case BatchEvent::kSubmit: return "SUBMIT";
    case BatchEvent::kAutoApprove: return "AUTO_APPROVE";
    case BatchEvent::kApprove: return "APPROVE";
    case BatchEvent::kReject: return "REJECT";
    case BatchEvent::kStartDispatch: return "START_DISPATCH";
    case BatchEvent::kComplete: return "COMPLETE";
  }
  return "?";
}

std::optional<Channel> parse_channel(std::string_view s) {
  static constexpr Channel all[] = {Channel::kSms, Channel::kEmail};
  return parse_enum(s, all);
}

std::optional<MessageStatus> parse_message_status(std::string_view s) {
  static constexpr MessageStatus all[] = {MessageStatus::kPending,      MessageStatus::kSent,
                                          MessageStatus::kDelivered,    MessageStatus::kFailed,
                                          MessageStatus::kSkippedDedup, MessageStatus::kSkippedNoContact};
  return parse_enum(s, all);
}

std::optional<ChannelPolicy> parse_channel_policy(std::string_view s) {
  static constexpr ChannelPolicy all[] = {ChannelPolicy::kSmsFirst, ChannelPolicy::kEmailFirst, ChannelPolicy::kBoth};
  return parse_enum(s, all);
}

std::optional<DedupReason> parse_dedup_reason(std::string_view s) {
  static constexpr DedupReason all[] = {DedupReason::kFeeOverdue, DedupReason::kBookOverdue};
  return parse_enum(s, all);
}

std::optional<BatchKind> parse_batch_kind(std::string_view s) { return parse_enum(s, kAllKinds); }
std::optional<BatchState> parse_batch_state(std::string_view s) { return parse_enum(s, kAllStates); }

std::optional<BatchState> transition(BatchState from, BatchEvent event, BatchKind kind) {
  const bool announce = kind == BatchKind::kLecturerAnnounce;
  switch (event) {
    case BatchEvent::kSubmit:
      if (from == BatchState::kDraft && !announce) return BatchState::kPendingApproval;
      break;
    case BatchEvent::kAutoApprove:
      if (from == BatchState::kDraft && announce) return BatchState::kApproved;
      break;
    case BatchEvent::kApprove:
      if (from == BatchState::kPendingApproval) return BatchState::kApproved;
      break;
    case BatchEvent::kReject:
      if (from == BatchState::kPendingApproval) return BatchState::kRejected;
      break;
    case BatchEvent::kStartDispatch:
      if (from == BatchState::kApproved) return BatchState::kDispatching;
      break;
    case BatchEvent::kComplete:
      if (from == BatchState::kDispatching) return BatchState::kCompleted;
      break;
  }
  return std::nullopt;
}

bool may_decide(Role role, BatchKind kind) {
  if (role == Role::kAdmin) return true;
  switch (kind) {
    case BatchKind::kFeesAutorun:
    case BatchKind::kFeesManual: return role == Role::kRecords;
    case BatchKind::kLibraryAutorun: return role == Role::kLibrary;
    case BatchKind::kLecturerAnnounce: return false;
  }
  return false;
}

DispatchReport DispatchReport::of(const std::vector<OutboundMessage>& messages) {
  DispatchReport r;
  for (const auto& m : messages) {
    switch (m.status) {
      case MessageStatus::kPending: ++r.pending; break;
      case MessageStatus::kSent: ++r.sent; break;
      case MessageStatus::kDelivered: ++r.delivered; break;
      case MessageStatus::kFailed: ++r.failed; break;
      case MessageStatus::kSkippedDedup:
      case MessageStatus::kSkippedNoContact: ++r.skipped; break;
    }
  }
  return r;
}

}  // namespace announcer

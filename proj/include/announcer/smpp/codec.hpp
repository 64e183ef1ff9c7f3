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

// SMPP 3.4 PDUs used by an ESME bound as transmitter or transceiver.
//
// Wire layout: a 16-byte big-endian header (command_length, command_id,
// command_status, sequence_number) followed by the mandatory body fields.
// C-octet strings are NUL-terminated; their maximum sizes below include the NUL.
// Optional TLVs are never produced and are skipped on input.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "announcer/smpp/gsm7.hpp"

namespace announcer::smpp {

enum class CommandId : std::uint32_t {
  kGenericNack = 0x80000000,
  kBindTransmitter = 0x00000002,
  kBindTransmitterResp = 0x80000002,
  kBindTransceiver = 0x00000009,
  kBindTransceiverResp = 0x80000009,
  kSubmitSm = 0x00000004,
  kSubmitSmResp = 0x80000004,
  kDeliverSm = 0x00000005,
  kDeliverSmResp = 0x80000005,
  kUnbind = 0x00000006,
  kUnbindResp = 0x80000006,
  kEnquireLink = 0x00000015,
  kEnquireLinkResp = 0x80000015,
};

/// command_status values from the SMPP 3.4 error table that this system uses.
namespace status {
inline constexpr std::uint32_t kOk = 0x00000000;
inline constexpr std::uint32_t kInvalidMsgLength = 0x00000001;
inline constexpr std::uint32_t kInvalidCmdLength = 0x00000002;
inline constexpr std::uint32_t kInvalidCmdId = 0x00000003;
inline constexpr std::uint32_t kInvalidBindStatus = 0x00000004;
inline constexpr std::uint32_t kAlreadyBound = 0x00000005;
inline constexpr std::uint32_t kSystemError = 0x00000008;
inline constexpr std::uint32_t kInvalidDestAddr = 0x0000000B;
inline constexpr std::uint32_t kBindFailed = 0x0000000D;
inline constexpr std::uint32_t kInvalidPassword = 0x0000000E;
inline constexpr std::uint32_t kInvalidSystemId = 0x0000000F;
inline constexpr std::uint32_t kMsgQueueFull = 0x00000014;
inline constexpr std::uint32_t kThrottled = 0x00000058;
}  // namespace status

inline constexpr std::size_t kHeaderLength = 16;
inline constexpr std::size_t kMaxPduLength = 64 * 1024;
inline constexpr std::size_t kMaxShortMessage = 254;
inline constexpr std::uint8_t kInterfaceVersion = 0x34;
inline constexpr std::uint8_t kEsmUdhi = 0x40;
inline constexpr std::uint8_t kEsmDeliveryReceipt = 0x04;

struct PduHeader {
  std::uint32_t command_length = 0;
  std::uint32_t command_id = 0;
  std::uint32_t command_status = 0;
  std::uint32_t sequence_number = 0;
  bool operator==(const PduHeader&) const = default;
};

template <CommandId Id>
struct BindRequest {
  static constexpr CommandId kId = Id;
  std::string system_id;      // 16
  std::string password;       // 9
  std::string system_type;    // 13
  std::uint8_t interface_version = kInterfaceVersion;
  std::uint8_t addr_ton = 0;
  std::uint8_t addr_npi = 0;
  std::string address_range;  // 41
  bool operator==(const BindRequest&) const = default;
};

template <CommandId Id>
struct BindResponse {
  static constexpr CommandId kId = Id;
  std::string system_id;  // 16
  bool operator==(const BindResponse&) const = default;
};

/// submit_sm and deliver_sm share one body layout.
template <CommandId Id>
struct ShortMessage {
  static constexpr CommandId kId = Id;
  std::string service_type;            // 6
  std::uint8_t source_addr_ton = 0;
  std::uint8_t source_addr_npi = 0;
  std::string source_addr;             // 21
  std::uint8_t dest_addr_ton = 0;
  std::uint8_t dest_addr_npi = 0;
  std::string destination_addr;        // 21
  std::uint8_t esm_class = 0;
  std::uint8_t protocol_id = 0;
  std::uint8_t priority_flag = 0;
  std::string schedule_delivery_time;  // 17
  std::string validity_period;         // 17
  std::uint8_t registered_delivery = 0;
  std::uint8_t replace_if_present_flag = 0;
  std::uint8_t data_coding = 0;
  std::uint8_t sm_default_msg_id = 0;
  Bytes short_message;                 // <= 254, length-prefixed
  bool operator==(const ShortMessage&) const = default;
};

template <CommandId Id>
struct MessageIdResponse {
  static constexpr CommandId kId = Id;
  std::string message_id;  // 65
  bool operator==(const MessageIdResponse&) const = default;
};

template <CommandId Id>
struct HeaderOnly {
  static constexpr CommandId kId = Id;
  bool operator==(const HeaderOnly&) const = default;
};

/// Body of a PDU whose command_id is not one of the supported variants.
struct RawBody {
  std::uint32_t command_id = 0;
  Bytes body;
  bool operator==(const RawBody&) const = default;
};

using BindTransmitter = BindRequest<CommandId::kBindTransmitter>;
using BindTransmitterResp = BindResponse<CommandId::kBindTransmitterResp>;
using BindTransceiver = BindRequest<CommandId::kBindTransceiver>;
using BindTransceiverResp = BindResponse<CommandId::kBindTransceiverResp>;
using SubmitSm = ShortMessage<CommandId::kSubmitSm>;
using SubmitSmResp = MessageIdResponse<CommandId::kSubmitSmResp>;
using DeliverSm = ShortMessage<CommandId::kDeliverSm>;
using DeliverSmResp = MessageIdResponse<CommandId::kDeliverSmResp>;
using EnquireLink = HeaderOnly<CommandId::kEnquireLink>;
using EnquireLinkResp = HeaderOnly<CommandId::kEnquireLinkResp>;
using Unbind = HeaderOnly<CommandId::kUnbind>;
using UnbindResp = HeaderOnly<CommandId::kUnbindResp>;
using GenericNack = HeaderOnly<CommandId::kGenericNack>;

using Body = std::variant<BindTransmitter, BindTransmitterResp, BindTransceiver, BindTransceiverResp,
                          SubmitSm, SubmitSmResp, DeliverSm, DeliverSmResp, EnquireLink,
                          EnquireLinkResp, Unbind, UnbindResp, GenericNack, RawBody>;

struct Pdu {
  std::uint32_t command_status = 0;
  std::uint32_t sequence_number = 0;
  Body body;

  std::uint32_t command_id() const;
  bool is_response() const { return (command_id() & 0x80000000u) != 0; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&body);
  }

  bool operator==(const Pdu&) const = default;
};

/// True if `id` is one of the supported variants (RawBody excluded).
bool is_known_command(std::uint32_t id);

/// Throws Error("FIELD_TOO_LONG") or Error("INVALID_VARIANT").
Bytes encode(const Pdu& pdu);

enum class DecodeStatus {
  kOk,
  kNeedMore,           ///< `missing` bytes are required; nothing consumed
  kBadLength,          ///< command_length < 16 or > 64 KiB; the stream is unusable
  kUnknownCommandId,   ///< `pdu` holds a RawBody; reply generic_nack
  kMalformedBody,      ///< frame skipped (`consumed` set); reply generic_nack
};

struct DecodeResult {
  DecodeStatus status = DecodeStatus::kNeedMore;
  std::optional<Pdu> pdu;
  std::optional<PduHeader> header;
  std::size_t consumed = 0;
  std::size_t missing = 0;
};

/// Total over arbitrary input: never reads outside `buf`, never throws.
DecodeResult decode(std::span<const std::uint8_t> buf);

const char* command_name(std::uint32_t id);

enum class ReceiptStat { kDelivered, kExpired, kUndeliverable, kRejected, kUnknown };

const char* to_string(ReceiptStat stat);  ///< "DELIVRD", "EXPIRED", ...
ReceiptStat receipt_stat_from_string(std::string_view token);

struct Receipt {
  std::string message_id;
  ReceiptStat stat = ReceiptStat::kUnknown;
  bool operator==(const Receipt&) const = default;
};

/// Parses "id:<id> sub:... stat:<STAT> ...". Throws Error("NOT_A_RECEIPT").
Receipt parse_delivery_receipt(std::span<const std::uint8_t> short_message);
Receipt parse_delivery_receipt(std::string_view short_message);

/// Conventional receipt text; dates are "YYMMDDhhmm".
std::string format_delivery_receipt(const std::string& message_id, ReceiptStat stat,
                                    const std::string& submit_date, const std::string& done_date,
                                    std::string_view text);

}  // namespace announcer::smpp

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

#include "announcer/smpp/codec.hpp"

#include <algorithm>
#include <type_traits>

#include "announcer/error.hpp"

namespace announcer::smpp {
namespace {

constexpr std::size_t kSystemIdMax = 16;
constexpr std::size_t kPasswordMax = 9;
constexpr std::size_t kSystemTypeMax = 13;
constexpr std::size_t kAddressRangeMax = 41;
constexpr std::size_t kServiceTypeMax = 6;
constexpr std::size_t kAddrMax = 21;
constexpr std::size_t kTimeMax = 17;
constexpr std::size_t kMessageIdMax = 65;

template <class T>
struct IsBindRequest : std::false_type {};
template <CommandId Id>
struct IsBindRequest<BindRequest<Id>> : std::true_type {};
template <class T>
struct IsBindResponse : std::false_type {};
template <CommandId Id>
struct IsBindResponse<BindResponse<Id>> : std::true_type {};
template <class T>
struct IsShortMessage : std::false_type {};
template <CommandId Id>
struct IsShortMessage<ShortMessage<Id>> : std::true_type {};
template <class T>
struct IsMessageIdResponse : std::false_type {};
template <CommandId Id>
struct IsMessageIdResponse<MessageIdResponse<Id>> : std::true_type {};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  void cstr(const std::string& s, std::size_t max, const char* field) {
    if (s.size() + 1 > max)
      throw Error("FIELD_TOO_LONG", std::string(field) + " exceeds " + std::to_string(max - 1));
    if (s.find('\0') != std::string::npos)
      throw Error("INVALID_VARIANT", std::string(field) + " contains NUL");
    out_.insert(out_.end(), s.begin(), s.end());
    out_.push_back(0);
  }
  void octets(const Bytes& b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void patch_length() {
    auto n = static_cast<std::uint32_t>(out_.size());
    for (int i = 0; i < 4; ++i) out_[i] = static_cast<std::uint8_t>(n >> (24 - 8 * i));
  }
  Bytes take() { return std::move(out_); }
  std::size_t size() const { return out_.size(); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> buf) : buf_(buf) {}

  std::uint8_t u8() {
    if (pos_ >= buf_.size()) return fail(), 0;
    return buf_[pos_++];
  }
  std::string cstr(std::size_t max) {
    std::size_t limit = std::min(buf_.size(), pos_ + max);
    for (std::size_t i = pos_; i < limit; ++i) {
      if (buf_[i] == 0) {
        std::string s(buf_.begin() + static_cast<std::ptrdiff_t>(pos_),
                      buf_.begin() + static_cast<std::ptrdiff_t>(i));
        pos_ = i + 1;
        return s;
      }
    }
    fail();
    return {};
  }
  Bytes octets(std::size_t n) {
    if (buf_.size() - pos_ < n) return fail(), Bytes{};
    Bytes b(buf_.begin() + static_cast<std::ptrdiff_t>(pos_),
            buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return b;
  }
  bool at_end() const { return pos_ >= buf_.size(); }
  bool ok() const { return ok_; }

 private:
  void fail() {
    ok_ = false;
    pos_ = buf_.size();
  }
  std::span<const std::uint8_t> buf_;
  std::size_t pos_ = 0;
  bool ok_ = true;
};

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

template <class T>
void encode_body(Writer& w, const T& body, std::uint32_t command_status) {
  if constexpr (IsBindRequest<T>::value) {
    w.cstr(body.system_id, kSystemIdMax, "system_id");
    w.cstr(body.password, kPasswordMax, "password");
    w.cstr(body.system_type, kSystemTypeMax, "system_type");
    w.u8(body.interface_version);
    w.u8(body.addr_ton);
    w.u8(body.addr_npi);
    w.cstr(body.address_range, kAddressRangeMax, "address_range");
  } else if constexpr (IsBindResponse<T>::value) {
    // Error responses conventionally carry no body.
    if (command_status == status::kOk || !body.system_id.empty())
      w.cstr(body.system_id, kSystemIdMax, "system_id");
  } else if constexpr (IsShortMessage<T>::value) {
    if (body.short_message.size() > kMaxShortMessage)
      throw Error("FIELD_TOO_LONG", "short_message is " + std::to_string(body.short_message.size()) +
                                        " bytes, limit 254");
    w.cstr(body.service_type, kServiceTypeMax, "service_type");
    w.u8(body.source_addr_ton);
    w.u8(body.source_addr_npi);
    w.cstr(body.source_addr, kAddrMax, "source_addr");
    w.u8(body.dest_addr_ton);
    w.u8(body.dest_addr_npi);
    w.cstr(body.destination_addr, kAddrMax, "destination_addr");
    w.u8(body.esm_class);
    w.u8(body.protocol_id);
    w.u8(body.priority_flag);
    w.cstr(body.schedule_delivery_time, kTimeMax, "schedule_delivery_time");
    w.cstr(body.validity_period, kTimeMax, "validity_period");
    w.u8(body.registered_delivery);
    w.u8(body.replace_if_present_flag);
    w.u8(body.data_coding);
    w.u8(body.sm_default_msg_id);
    w.u8(static_cast<std::uint8_t>(body.short_message.size()));
    w.octets(body.short_message);
  } else if constexpr (IsMessageIdResponse<T>::value) {
    if (command_status == status::kOk || !body.message_id.empty())
      w.cstr(body.message_id, kMessageIdMax, "message_id");
  } else if constexpr (std::is_same_v<T, RawBody>) {
    w.octets(body.body);
  }
}

template <class T>
T decode_body(Reader& r) {
  T body;
  if constexpr (IsBindRequest<T>::value) {
    body.system_id = r.cstr(kSystemIdMax);
    body.password = r.cstr(kPasswordMax);
    body.system_type = r.cstr(kSystemTypeMax);
    body.interface_version = r.u8();
    body.addr_ton = r.u8();
    body.addr_npi = r.u8();
    body.address_range = r.cstr(kAddressRangeMax);
  } else if constexpr (IsBindResponse<T>::value) {
    if (!r.at_end()) body.system_id = r.cstr(kSystemIdMax);
  } else if constexpr (IsShortMessage<T>::value) {
    body.service_type = r.cstr(kServiceTypeMax);
    body.source_addr_ton = r.u8();
    body.source_addr_npi = r.u8();
    body.source_addr = r.cstr(kAddrMax);
    body.dest_addr_ton = r.u8();
    body.dest_addr_npi = r.u8();
    body.destination_addr = r.cstr(kAddrMax);
    body.esm_class = r.u8();
    body.protocol_id = r.u8();
    body.priority_flag = r.u8();
    body.schedule_delivery_time = r.cstr(kTimeMax);
    body.validity_period = r.cstr(kTimeMax);
    body.registered_delivery = r.u8();
    body.replace_if_present_flag = r.u8();
    body.data_coding = r.u8();
    body.sm_default_msg_id = r.u8();
    std::size_t len = r.u8();
    body.short_message = r.octets(len);
  } else if constexpr (IsMessageIdResponse<T>::value) {
    if (!r.at_end()) body.message_id = r.cstr(kMessageIdMax);
  }
  return body;
}

template <std::size_t I = 0>
std::optional<Body> decode_known(std::uint32_t id, Reader& r) {
  if constexpr (I + 1 < std::variant_size_v<Body>) {  // last alternative is RawBody
    using T = std::variant_alternative_t<I, Body>;
    if (static_cast<std::uint32_t>(T::kId) == id) return Body{decode_body<T>(r)};
    return decode_known<I + 1>(id, r);
  } else {
    return std::nullopt;
  }
}

}  // namespace

std::uint32_t Pdu::command_id() const {
  return std::visit(
      [](const auto& b) -> std::uint32_t {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, RawBody>)
          return b.command_id;
        else
          return static_cast<std::uint32_t>(T::kId);
      },
      body);
}

bool is_known_command(std::uint32_t id) { return std::string_view(command_name(id)) != "unknown"; }

Bytes encode(const Pdu& pdu) {
  if (const auto* raw = pdu.as<RawBody>(); raw && is_known_command(raw->command_id))
    throw Error("INVALID_VARIANT", "raw body carries known command_id " + std::string(command_name(raw->command_id)));
  Writer w;
  w.u32(0);
  w.u32(pdu.command_id());
  w.u32(pdu.command_status);
  w.u32(pdu.sequence_number);
  std::visit([&](const auto& b) { encode_body(w, b, pdu.command_status); }, pdu.body);
  if (w.size() > kMaxPduLength) throw Error("FIELD_TOO_LONG", "PDU exceeds 64 KiB");
  w.patch_length();
  return w.take();
}

DecodeResult decode(std::span<const std::uint8_t> buf) {
  DecodeResult res;
  if (buf.size() < 4) {
    res.status = DecodeStatus::kNeedMore;
    res.missing = kHeaderLength - buf.size();
    return res;
  }
  std::uint32_t length = read_u32(buf, 0);
  if (length < kHeaderLength || length > kMaxPduLength) {
    res.status = DecodeStatus::kBadLength;
    return res;
  }
  if (buf.size() < length) {
    res.status = DecodeStatus::kNeedMore;
    res.missing = length - buf.size();
    return res;
  }
  PduHeader h{length, read_u32(buf, 4), read_u32(buf, 8), read_u32(buf, 12)};
  res.header = h;
  res.consumed = length;

  Reader r(buf.subspan(kHeaderLength, length - kHeaderLength));
  auto body = decode_known(h.command_id, r);
  if (!body) {
    res.status = DecodeStatus::kUnknownCommandId;
    auto rest = buf.subspan(kHeaderLength, length - kHeaderLength);
    res.pdu = Pdu{h.command_status, h.sequence_number, RawBody{h.command_id, Bytes(rest.begin(), rest.end())}};
    return res;
  }
  if (!r.ok()) {
    res.status = DecodeStatus::kMalformedBody;
    return res;
  }
  res.status = DecodeStatus::kOk;
  res.pdu = Pdu{h.command_status, h.sequence_number, std::move(*body)};
  return res;
}

const char* command_name(std::uint32_t id) {
  switch (static_cast<CommandId>(id)) {
    case CommandId::kGenericNack: return "generic_nack";
    case CommandId::kBindTransmitter: return "bind_transmitter";
    case CommandId::kBindTransmitterResp: return "bind_transmitter_resp";
    case CommandId::kBindTransceiver: return "bind_transceiver";
    case CommandId::kBindTransceiverResp: return "bind_transceiver_resp";
    case CommandId::kSubmitSm: return "submit_sm";
    case CommandId::kSubmitSmResp: return "submit_sm_resp";
    case CommandId::kDeliverSm: return "deliver_sm";
    case CommandId::kDeliverSmResp: return "deliver_sm_resp";
    case CommandId::kUnbind: return "unbind";
    case CommandId::kUnbindResp: return "unbind_resp";
    case CommandId::kEnquireLink: return "enquire_link";
    case CommandId::kEnquireLinkResp: return "enquire_link_resp";
  }
  return "unknown";
}

const char* to_string(ReceiptStat stat) {
  switch (stat) {
    case ReceiptStat::kDelivered: return "DELIVRD";
    case ReceiptStat::kExpired: return "EXPIRED";
    case ReceiptStat::kUndeliverable: return "UNDELIV";
    case ReceiptStat::kRejected: return "REJECTD";
    case ReceiptStat::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

ReceiptStat receipt_stat_from_string(std::string_view token) {
  if (token == "DELIVRD") return ReceiptStat::kDelivered;
  if (token == "EXPIRED") return ReceiptStat::kExpired;
  if (token == "UNDELIV") return ReceiptStat::kUndeliverable;
  if (token == "REJECTD") return ReceiptStat::kRejected;
  return ReceiptStat::kUnknown;
}

Receipt parse_delivery_receipt(std::string_view sm) {
  // A field starts at the beginning of the text or after whitespace.
  auto field = [sm](std::string_view key) -> std::optional<std::string_view> {
    for (std::size_t pos = sm.find(key); pos != std::string_view::npos; pos = sm.find(key, pos + 1)) {
      if (pos != 0 && sm[pos - 1] != ' ' && sm[pos - 1] != '\t') continue;
      auto start = pos + key.size();
      auto end = sm.find_first_of(" \t\r\n", start);
      return sm.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    }
    return std::nullopt;
  };
  auto id = field("id:");
  if (!id || id->empty()) throw Error("NOT_A_RECEIPT");
  Receipt r;
  r.message_id = std::string(*id);
  auto st = field("stat:");
  r.stat = st ? receipt_stat_from_string(*st) : ReceiptStat::kUnknown;
  return r;
}

Receipt parse_delivery_receipt(std::span<const std::uint8_t> sm) {
  return parse_delivery_receipt(std::string_view(reinterpret_cast<const char*>(sm.data()), sm.size()));
}

std::string format_delivery_receipt(const std::string& message_id, ReceiptStat stat,
                                    const std::string& submit_date, const std::string& done_date,
                                    std::string_view text) {
  bool ok = stat == ReceiptStat::kDelivered;
  std::string out = "id:" + message_id + " sub:001 dlvrd:" + (ok ? "001" : "000") +
                    " submit date:" + submit_date + " done date:" + done_date +
                    " stat:" + to_string(stat) + " err:" + (ok ? "000" : "001") + " text:";
  out += text.substr(0, 20);
  return out;
}

}  // namespace announcer::smpp

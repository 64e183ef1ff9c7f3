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

#include <gtest/gtest.h>

#include "announcer/error.hpp"
#include "generators.hpp"

namespace announcer::smpp {
namespace {

// Hand-assembled header: length, command_id, status, sequence; 4 octets each, big-endian.
const Bytes kEnquireLinkSeq1 = {0x00, 0x00, 0x00, 0x10, 0x00, 0x00, 0x00, 0x15,
                                0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01};

std::string code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

TEST(SmppEncode, EnquireLinkMatchesHandAssembledBytes) {
  EXPECT_EQ(encode(Pdu{0, 1, EnquireLink{}}), kEnquireLinkSeq1);
}

TEST(SmppEncode, GenericNackIsSixteenBytes) {
  auto bytes = encode(Pdu{0, 0, GenericNack{}});
  const Bytes expected = {0x00, 0x00, 0x00, 0x10, 0x80, 0x00, 0x00, 0x00,
                          0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00};
  EXPECT_EQ(bytes, expected);
}

TEST(SmppEncode, SubmitSmLayout) {
  SubmitSm sm;
  sm.source_addr = "ANN";
  sm.destination_addr = "+60123";
  sm.registered_delivery = 1;
  sm.short_message = {'h', 'i'};
  auto bytes = encode(Pdu{0, 7, sm});
  const Bytes expected = {
      0x00, 0x00, 0x00, 0x2C, 0x00, 0x00, 0x00, 0x04, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x07,
      0x00,                          // service_type ""
      0x00, 0x00, 'A', 'N', 'N', 0x00,  // source ton/npi/addr
      0x00, 0x00, '+', '6', '0', '1', '2', '3', 0x00,
      0x00, 0x00, 0x00,              // esm_class, protocol_id, priority_flag
      0x00, 0x00,                    // schedule_delivery_time, validity_period
      0x01, 0x00, 0x00, 0x00,        // registered_delivery, replace, data_coding, default_msg_id
      0x02, 'h', 'i'};
  EXPECT_EQ(bytes, expected);
}

TEST(SmppEncode, ShortMessageOver254IsRejected) {
  SubmitSm sm;
  sm.short_message.assign(300, 'x');
  EXPECT_EQ(code_of([&] { encode(Pdu{0, 1, sm}); }), "FIELD_TOO_LONG");
}

TEST(SmppEncode, CStringOverLimitIsRejected) {
  BindTransceiver b;
  b.password = "123456789";  // 9 chars + NUL > 9
  EXPECT_EQ(code_of([&] { encode(Pdu{0, 1, b}); }), "FIELD_TOO_LONG");
}

TEST(SmppEncode, RawBodyWithKnownIdIsInvalid) {
  EXPECT_EQ(code_of([] { encode(Pdu{0, 1, RawBody{0x00000015, {}}}); }), "INVALID_VARIANT");
}

TEST(SmppDecode, EnquireLinkInverse) {
  auto r = decode(kEnquireLinkSeq1);
  ASSERT_EQ(r.status, DecodeStatus::kOk);
  EXPECT_EQ(r.consumed, 16u);
  EXPECT_EQ(*r.pdu, (Pdu{0, 1, EnquireLink{}}));
}

TEST(SmppDecode, TruncatedReportsMissingBytes) {
  auto r = decode(std::span(kEnquireLinkSeq1).first(10));
  EXPECT_EQ(r.status, DecodeStatus::kNeedMore);
  EXPECT_EQ(r.missing, 6u);
  EXPECT_EQ(r.consumed, 0u);
  EXPECT_EQ(decode(std::span(kEnquireLinkSeq1).first(2)).missing, 14u);
}

TEST(SmppDecode, LengthBelowHeaderIsBad) {
  Bytes b = kEnquireLinkSeq1;
  b[3] = 0x08;
  EXPECT_EQ(decode(b).status, DecodeStatus::kBadLength);
}

TEST(SmppDecode, LengthAboveCapIsBad) {
  Bytes b = {0x00, 0x01, 0x00, 0x01};
  EXPECT_EQ(decode(b).status, DecodeStatus::kBadLength);
}

TEST(SmppDecode, UnknownCommandYieldsRawBody) {
  Bytes b = {0x00, 0x00, 0x00, 0x12, 0x00, 0x00, 0x01, 0x11, 0, 0, 0, 0, 0, 0, 0, 9, 0xAB, 0xCD};
  auto r = decode(b);
  ASSERT_EQ(r.status, DecodeStatus::kUnknownCommandId);
  EXPECT_EQ(r.consumed, 18u);
  const auto* raw = r.pdu->as<RawBody>();
  ASSERT_NE(raw, nullptr);
  EXPECT_EQ(raw->command_id, 0x111u);
  EXPECT_EQ(raw->body, (Bytes{0xAB, 0xCD}));
  EXPECT_EQ(r.pdu->sequence_number, 9u);
}

TEST(SmppDecode, UnterminatedStringIsMalformed) {
  Bytes b = {0x00, 0x00, 0x00, 0x13, 0x80, 0x00, 0x00, 0x04, 0, 0, 0, 0, 0, 0, 0, 3, 'a', 'b', 'c'};
  auto r = decode(b);
  EXPECT_EQ(r.status, DecodeStatus::kMalformedBody);
  EXPECT_EQ(r.consumed, 19u);
  EXPECT_EQ(r.header->sequence_number, 3u);
}

TEST(SmppDecode, ErrorResponseWithoutBody) {
  Bytes b = {0x00, 0x00, 0x00, 0x10, 0x80, 0x00, 0x00, 0x09, 0, 0, 0, 0x0E, 0, 0, 0, 1};
  auto r = decode(b);
  ASSERT_EQ(r.status, DecodeStatus::kOk);
  EXPECT_EQ(r.pdu->command_status, status::kInvalidPassword);
  EXPECT_NE(r.pdu->as<BindTransceiverResp>(), nullptr);
  EXPECT_EQ(encode(*r.pdu), b);
}

TEST(SmppProperty, RoundTripRandomPdus) {
  testing::Rng rng(20240601);
  for (int i = 0; i < 2000; ++i) {
    auto p = testing::random_pdu(rng);
    auto bytes = encode(p);
    ASSERT_EQ(bytes.size(), (std::size_t{bytes[0]} << 24 | std::size_t{bytes[1]} << 16 |
                             std::size_t{bytes[2]} << 8 | bytes[3]));
    auto r = decode(bytes);
    ASSERT_EQ(r.status, DecodeStatus::kOk) << "iteration " << i;
    ASSERT_EQ(r.consumed, bytes.size());
    ASSERT_EQ(*r.pdu, p) << "iteration " << i << " " << command_name(p.command_id());
  }
}

TEST(SmppProperty, DecodeIsTotalOnGarbage) {
  testing::Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    auto buf = testing::random_bytes(rng, 300);
    // Bias half the buffers toward plausible lengths so bodies get parsed.
    if (buf.size() >= 16 && i % 2 == 0) {
      buf[0] = buf[1] = 0;
      buf[2] = static_cast<std::uint8_t>(buf.size() >> 8);
      buf[3] = static_cast<std::uint8_t>(buf.size());
    }
    auto r = decode(buf);
    if (r.status == DecodeStatus::kOk || r.status == DecodeStatus::kUnknownCommandId)
      ASSERT_LE(r.consumed, buf.size());
  }
}

TEST(SmppStream, ConsecutiveFramesDecodeInOrder) {
  Bytes stream = encode(Pdu{0, 1, EnquireLink{}});
  auto second = encode(Pdu{0, 2, SubmitSmResp{"42"}});
  stream.insert(stream.end(), second.begin(), second.end());
  auto first = decode(stream);
  ASSERT_EQ(first.status, DecodeStatus::kOk);
  auto next = decode(std::span(stream).subspan(first.consumed));
  ASSERT_EQ(next.status, DecodeStatus::kOk);
  EXPECT_EQ(next.pdu->as<SubmitSmResp>()->message_id, "42");
}

TEST(Receipt, ConventionalFormat) {
  auto r = parse_delivery_receipt(std::string_view(
      "id:12345 sub:001 dlvrd:001 submit date:1003010200 done date:1003010201 stat:DELIVRD err:000 text:hi"));
  EXPECT_EQ(r, (Receipt{"12345", ReceiptStat::kDelivered}));
}

TEST(Receipt, MinimalFields) {
  EXPECT_EQ(parse_delivery_receipt(std::string_view("id:7 stat:UNDELIV")),
            (Receipt{"7", ReceiptStat::kUndeliverable}));
}

TEST(Receipt, UnknownStatToken) {
  EXPECT_EQ(parse_delivery_receipt(std::string_view("id:9 stat:ACCEPTD")).stat, ReceiptStat::kUnknown);
}

TEST(Receipt, NotAReceipt) {
  EXPECT_EQ(code_of([] { parse_delivery_receipt(std::string_view("hello")); }), "NOT_A_RECEIPT");
  // "id:" must start a field, not appear inside a word.
  EXPECT_EQ(code_of([] { parse_delivery_receipt(std::string_view("paid:5")); }), "NOT_A_RECEIPT");
}

TEST(Receipt, FormatParsesBack) {
  auto text = format_delivery_receipt("88", ReceiptStat::kRejected, "1003010200", "1003010201", "Dear Ali");
  EXPECT_EQ(parse_delivery_receipt(std::string_view(text)), (Receipt{"88", ReceiptStat::kRejected}));
}

}  // namespace
}  // namespace announcer::smpp

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

#include "announcer/smpp/gsm7.hpp"

#include <gtest/gtest.h>

#include "announcer/error.hpp"
#include "generators.hpp"

namespace announcer::smpp {
namespace {

// Packing by hand: lay each septet's bits out LSB-first on a bit
// tape, then cut the tape into octets, again LSB-first.
Bytes pack_by_bit_tape(const std::vector<int>& septets) {
  std::vector<int> tape;
  for (int s : septets)
    for (int b = 0; b < 7; ++b) tape.push_back((s >> b) & 1);
  Bytes out;
  for (std::size_t i = 0; i < tape.size(); i += 8) {
    int v = 0;
    for (std::size_t b = 0; b < 8 && i + b < tape.size(); ++b) v |= tape[i + b] << b;
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

TEST(Gsm7Pack, HelloMatchesBitTapeOracle) {
  // 'h' 'e' 'l' 'l' 'o' sit at their ASCII positions in the default alphabet.
  auto oracle = pack_by_bit_tape({0x68, 0x65, 0x6C, 0x6C, 0x6F});
  EXPECT_EQ(oracle, (Bytes{0xE8, 0x32, 0x9B, 0xFD, 0x06}));
  EXPECT_EQ(gsm7_pack("hello"), oracle);
}

TEST(Gsm7Pack, SingleSeptetUnchanged) { EXPECT_EQ(gsm7_pack("A"), (Bytes{0x41})); }

TEST(Gsm7Pack, Empty) { EXPECT_TRUE(gsm7_pack("").empty()); }

TEST(Gsm7Pack, EightSeptetsFillSevenOctets) {
  EXPECT_EQ(gsm7_pack("12345678"), pack_by_bit_tape({0x31, 0x32, 0x33, 0x34, 0x35, 0x36, 0x37, 0x38}));
  EXPECT_EQ(gsm7_pack("12345678").size(), 7u);
}

TEST(Gsm7Encode, ExtensionTableUsesEscape) {
  EXPECT_EQ(gsm7_encode("€"), (Bytes{0x1B, 0x65}));
  EXPECT_EQ(gsm7_encode("@£"), (Bytes{0x00, 0x01}));
  EXPECT_EQ(gsm7_septet_count("a{b}"), 6u);
}

TEST(Gsm7Encode, UnencodableCharNamesPosition) {
  try {
    gsm7_encode("ab日");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "UNENCODABLE_CHAR");
    EXPECT_NE(e.detail().find("2"), std::string::npos);
  }
}

TEST(Gsm7Property, PackUnpackRoundTrip) {
  testing::Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    auto t = testing::random_text(rng, std::uniform_int_distribution<std::size_t>(0, 300)(rng), 0.0);
    auto septets = gsm7_septet_count(t.text);
    ASSERT_EQ(gsm7_unpack(gsm7_pack(t.text), septets), t.text);
  }
}

TEST(Ucs2, SurrogatePairsRoundTrip) {
  std::string s = "Hi 😀 日本";
  auto b = ucs2_encode(s);
  EXPECT_EQ(b.size(), 2u * 8u);  // H i space (2 units) space 日 本
  EXPECT_EQ(ucs2_decode(b), s);
}

TEST(Segment, ExactlyOneSixtyIsSingle) {
  auto p = segment(std::string(160, 'a'), 1);
  ASSERT_EQ(p.segments.size(), 1u);
  EXPECT_TRUE(p.segments[0].udh.empty());
  EXPECT_EQ(p.encoding, Encoding::kGsm7);
}

TEST(Segment, OneSixtyOneSplits153And8) {
  auto p = segment(std::string(161, 'a'), 0x2A);
  ASSERT_EQ(p.segments.size(), 2u);
  EXPECT_EQ(p.segments[0].payload.size(), 153u);
  EXPECT_EQ(p.segments[1].payload.size(), 8u);
  EXPECT_EQ(p.segments[0].udh, (Bytes{0x05, 0x00, 0x03, 0x2A, 0x02, 0x01}));
  EXPECT_EQ(p.segments[1].udh, (Bytes{0x05, 0x00, 0x03, 0x2A, 0x02, 0x02}));
}

TEST(Segment, EuroCountsTwoSeptetsButStaysSingle) {
  // 139 basic + one euro = 141 septets.
  auto p = segment(std::string(139, 'x') + "€", 1);
  EXPECT_EQ(p.encoding, Encoding::kGsm7);
  EXPECT_EQ(p.segments.size(), 1u);
  EXPECT_EQ(p.segments[0].payload.size(), 141u);
}

TEST(Segment, EscapeNeverSplitAcrossSegments) {
  auto p = segment(std::string(152, 'x') + "€" + std::string(20, 'y'), 1);
  ASSERT_EQ(p.segments.size(), 2u);
  EXPECT_EQ(p.segments[0].payload.size(), 152u);
  EXPECT_EQ(p.segments[1].payload[0], 0x1B);
}

TEST(Segment, Ucs2Boundaries) {
  std::string seventy;
  for (int i = 0; i < 70; ++i) seventy += "日";
  EXPECT_EQ(segment(seventy, 1).segments.size(), 1u);
  EXPECT_EQ(segment(seventy, 1).encoding, Encoding::kUcs2);
  auto two = segment(seventy + "本", 1);
  ASSERT_EQ(two.segments.size(), 2u);
  EXPECT_EQ(two.segments[0].payload.size(), 67u * 2);
}

TEST(Segment, TooManySegments) {
  try {
    segment(std::string(153 * 255 + 1, 'a'), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "TOO_MANY_SEGMENTS");
  }
  EXPECT_EQ(segment(std::string(153 * 255, 'a'), 1).segments.size(), 255u);
}

TEST(SegmentProperty, CountsAndConcatenation) {
  testing::Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    auto t = testing::random_text(rng, std::uniform_int_distribution<std::size_t>(0, 600)(rng), 0.4);
    auto p = segment(t.text, 5);
    ASSERT_EQ(p.encoding == Encoding::kGsm7, t.gsm);
    ASSERT_EQ(p.segments.size(), testing::expected_segment_count(t));
    std::string joined;
    for (const auto& s : p.segments) joined += payload_text(s.payload, p.encoding);
    ASSERT_EQ(joined, t.text);
  }
}

TEST(Udh, SplitFindsConcatElement) {
  Bytes sm = {0x05, 0x00, 0x03, 0x07, 0x03, 0x02, 'h', 'i'};
  auto s = split_udh(sm);
  ASSERT_TRUE(s.ok);
  ASSERT_TRUE(s.concat.has_value());
  EXPECT_EQ(s.concat->ref, 7);
  EXPECT_EQ(s.concat->total, 3);
  EXPECT_EQ(s.concat->index, 2);
  EXPECT_EQ(s.payload, (Bytes{'h', 'i'}));
  EXPECT_FALSE(split_udh(Bytes{0x09, 0x00}).ok);
}

}  // namespace
}  // namespace announcer::smpp

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

// GSM 03.38 default alphabet, 7-bit packing, UCS2 and concatenated-SMS
// segmentation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace announcer::smpp {

using Bytes = std::vector<std::uint8_t>;

/// Lenient UTF-8 decode: invalid sequences become U+FFFD.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);

/// True if every character has a GSM 03.38 encoding (basic or extension table).
bool gsm7_representable(std::string_view utf8);

/// Septets (one per octet, escape-prefixed for extension characters).
/// Throws Error("UNENCODABLE_CHAR") naming the code-point index.
Bytes gsm7_encode(std::string_view utf8);
std::string gsm7_decode(std::span<const std::uint8_t> septets);

/// Number of septets `utf8` occupies; extension-table characters count 2.
std::size_t gsm7_septet_count(std::string_view utf8);

/// Packs the text's septets LSB-first, 8 septets per 7 octets.
Bytes gsm7_pack(std::string_view utf8);
Bytes gsm7_pack_septets(std::span<const std::uint8_t> septets);
Bytes gsm7_unpack_septets(std::span<const std::uint8_t> packed, std::size_t septet_count);
std::string gsm7_unpack(std::span<const std::uint8_t> packed, std::size_t septet_count);

/// UTF-16BE; characters beyond the BMP become surrogate pairs.
Bytes ucs2_encode(std::string_view utf8);
std::string ucs2_decode(std::span<const std::uint8_t> bytes);

enum class Encoding { kGsm7, kUcs2 };

constexpr std::uint8_t data_coding(Encoding e) { return e == Encoding::kGsm7 ? 0x00 : 0x08; }

inline constexpr std::size_t kSingleGsm7 = 160;
inline constexpr std::size_t kMultiGsm7 = 153;
inline constexpr std::size_t kSingleUcs2 = 70;
inline constexpr std::size_t kMultiUcs2 = 67;
inline constexpr std::size_t kMaxSegments = 255;

struct Segment {
  Bytes udh;      ///< empty, or `05 00 03 ref total idx`
  Bytes payload;  ///< unpacked septets (GSM7) or UTF-16BE (UCS2)

  Bytes short_message() const;
  bool operator==(const Segment&) const = default;
};

struct SmsPayload {
  std::string text;
  Encoding encoding = Encoding::kGsm7;
  std::vector<Segment> segments;
};

/// GSM7 when representable, otherwise UCS2. An empty text yields one empty
/// segment. Extension-table escapes and surrogate pairs are never split.
/// Throws Error("TOO_MANY_SEGMENTS").
SmsPayload segment(std::string_view text, std::uint8_t ref_num);

/// Decoded text of a single segment's payload.
std::string payload_text(std::span<const std::uint8_t> payload, Encoding encoding);

struct ConcatInfo {
  std::uint8_t ref = 0;
  std::uint8_t total = 1;
  std::uint8_t index = 1;
};

/// Splits a UDH-prefixed short_message. Returns the concatenation element if
/// the header carries an 8-bit reference IE, and the payload after the header.
struct UdhSplit {
  std::optional<ConcatInfo> concat;
  Bytes payload;
  bool ok = true;
};
UdhSplit split_udh(std::span<const std::uint8_t> short_message);

}  // namespace announcer::smpp

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

#include <array>
#include <unordered_map>

#include "announcer/error.hpp"

namespace announcer::smpp {
namespace {

constexpr std::uint8_t kEscape = 0x1B;

// Basic table, indexed by septet. 0x1B is the escape and maps to nothing.
constexpr std::array<char32_t, 128> kBasic = {
    U'@',  U'£', U'$',  U'¥', U'è', U'é', U'ù', U'ì', U'ò', U'Ç', U'\n', U'Ø', U'ø', U'\r', U'Å', U'å',
    U'Δ',  U'_', U'Φ',  U'Γ', U'Λ', U'Ω', U'Π', U'Ψ', U'Σ', U'Θ', U'Ξ',  0,    U'Æ', U'æ',  U'ß', U'É',
    U' ',  U'!', U'"',  U'#', U'¤', U'%', U'&', U'\'', U'(', U')', U'*', U'+', U',', U'-',  U'.', U'/',
    U'0',  U'1', U'2',  U'3', U'4', U'5', U'6', U'7', U'8', U'9', U':',  U';', U'<', U'=',  U'>', U'?',
    U'¡',  U'A', U'B',  U'C', U'D', U'E', U'F', U'G', U'H', U'I', U'J',  U'K', U'L', U'M',  U'N', U'O',
    U'P',  U'Q', U'R',  U'S', U'T', U'U', U'V', U'W', U'X', U'Y', U'Z',  U'Ä', U'Ö', U'Ñ',  U'Ü', U'§',
    U'¿',  U'a', U'b',  U'c', U'd', U'e', U'f', U'g', U'h', U'i', U'j',  U'k', U'l', U'm',  U'n', U'o',
    U'p',  U'q', U'r',  U's', U't', U'u', U'v', U'w', U'x', U'y', U'z',  U'ä', U'ö', U'ñ',  U'ü', U'à',
};

struct ExtEntry {
  std::uint8_t septet;
  char32_t ch;
};
constexpr std::array<ExtEntry, 10> kExtension = {{
    {0x0A, U'\f'}, {0x14, U'^'}, {0x28, U'{'}, {0x29, U'}'}, {0x2F, U'\\'},
    {0x3C, U'['},  {0x3D, U'~'}, {0x3E, U']'}, {0x40, U'|'}, {0x65, U'€'},
}};

struct Gsm7Lookup {
  std::unordered_map<char32_t, std::uint8_t> basic;
  std::unordered_map<char32_t, std::uint8_t> ext;
  Gsm7Lookup() {
    for (std::size_t i = 0; i < kBasic.size(); ++i)
      if (i != kEscape) basic.emplace(kBasic[i], static_cast<std::uint8_t>(i));
    for (auto e : kExtension) ext.emplace(e.ch, e.septet);
  }
};

const Gsm7Lookup& lookup() {
  static const Gsm7Lookup table;
  return table;
}

// Septet width of a code point: 1, 2, or 0 if not representable.
int gsm7_width(char32_t c) {
  const auto& t = lookup();
  if (t.basic.count(c)) return 1;
  if (t.ext.count(c)) return 2;
  return 0;
}

int ucs2_width(char32_t c) { return c > 0xFFFF ? 2 : 1; }

void append_ucs2(Bytes& out, char32_t c) {
  auto put = [&out](std::uint16_t u) {
    out.push_back(static_cast<std::uint8_t>(u >> 8));
    out.push_back(static_cast<std::uint8_t>(u & 0xFF));
  };
  if (c > 0xFFFF) {
    char32_t v = c - 0x10000;
    put(static_cast<std::uint16_t>(0xD800 + (v >> 10)));
    put(static_cast<std::uint16_t>(0xDC00 + (v & 0x3FF)));
  } else {
    put(static_cast<std::uint16_t>(c));
  }
}

void append_gsm7(Bytes& out, char32_t c, std::size_t position) {
  const auto& t = lookup();
  if (auto it = t.basic.find(c); it != t.basic.end()) {
    out.push_back(it->second);
  } else if (auto et = t.ext.find(c); et != t.ext.end()) {
    out.push_back(kEscape);
    out.push_back(et->second);
  } else {
    throw Error("UNENCODABLE_CHAR", "position " + std::to_string(position));
  }
}

}  // namespace

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto b = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (b < 0x80) {
      len = 1, cp = b;
    } else if ((b & 0xE0) == 0xC0) {
      len = 2, cp = b & 0x1F;
    } else if ((b & 0xF0) == 0xE0) {
      len = 3, cp = b & 0x0F;
    } else if ((b & 0xF8) == 0xF0) {
      len = 4, cp = b & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      auto c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (c & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  for (char32_t c : text) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c < 0x800) {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
      out += static_cast<char>(0xE0 | (c >> 12));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (c >> 18));
      out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

bool gsm7_representable(std::string_view utf8) {
  for (char32_t c : utf8_decode(utf8))
    if (gsm7_width(c) == 0) return false;
  return true;
}

Bytes gsm7_encode(std::string_view utf8) {
  Bytes out;
  auto cps = utf8_decode(utf8);
  for (std::size_t i = 0; i < cps.size(); ++i) append_gsm7(out, cps[i], i);
  return out;
}

std::string gsm7_decode(std::span<const std::uint8_t> septets) {
  std::u32string out;
  for (std::size_t i = 0; i < septets.size(); ++i) {
    std::uint8_t s = septets[i] & 0x7F;
    if (s != kEscape) {
      out.push_back(kBasic[s]);
      continue;
    }
    if (i + 1 == septets.size()) break;  // dangling escape
    std::uint8_t e = septets[++i] & 0x7F;
    char32_t c = 0;
    for (auto entry : kExtension)
      if (entry.septet == e) c = entry.ch;
    // Unknown extension codes fall back to the basic character.
    out.push_back(c ? c : (e == kEscape ? U' ' : kBasic[e]));
  }
  return utf8_encode(out);
}

std::size_t gsm7_septet_count(std::string_view utf8) { return gsm7_encode(utf8).size(); }

Bytes gsm7_pack_septets(std::span<const std::uint8_t> septets) {
  Bytes out((septets.size() * 7 + 7) / 8, 0);
  for (std::size_t i = 0; i < septets.size(); ++i) {
    std::size_t bit = i * 7;
    unsigned v = septets[i] & 0x7F;
    out[bit / 8] |= static_cast<std::uint8_t>(v << (bit % 8));
    if (bit % 8 > 1) out[bit / 8 + 1] |= static_cast<std::uint8_t>(v >> (8 - bit % 8));
  }
  return out;
}

Bytes gsm7_pack(std::string_view utf8) { return gsm7_pack_septets(gsm7_encode(utf8)); }

Bytes gsm7_unpack_septets(std::span<const std::uint8_t> packed, std::size_t septet_count) {
  Bytes out;
  out.reserve(septet_count);
  for (std::size_t i = 0; i < septet_count; ++i) {
    std::size_t bit = i * 7;
    if (bit / 8 >= packed.size()) break;
    unsigned v = packed[bit / 8] >> (bit % 8);
    if (bit % 8 > 1 && bit / 8 + 1 < packed.size()) v |= packed[bit / 8 + 1] << (8 - bit % 8);
    out.push_back(static_cast<std::uint8_t>(v & 0x7F));
  }
  return out;
}

std::string gsm7_unpack(std::span<const std::uint8_t> packed, std::size_t septet_count) {
  return gsm7_decode(gsm7_unpack_septets(packed, septet_count));
}

Bytes ucs2_encode(std::string_view utf8) {
  Bytes out;
  for (char32_t c : utf8_decode(utf8)) append_ucs2(out, c);
  return out;
}

std::string ucs2_decode(std::span<const std::uint8_t> bytes) {
  std::u32string out;
  for (std::size_t i = 0; i + 1 < bytes.size(); i += 2) {
    char32_t u = (bytes[i] << 8) | bytes[i + 1];
    if (u >= 0xD800 && u <= 0xDBFF && i + 3 < bytes.size()) {
      char32_t lo = (bytes[i + 2] << 8) | bytes[i + 3];
      if (lo >= 0xDC00 && lo <= 0xDFFF) {
        out.push_back(0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00));
        i += 2;
        continue;
      }
    }
    out.push_back(u >= 0xD800 && u <= 0xDFFF ? char32_t{0xFFFD} : u);
  }
  return utf8_encode(out);
}

Bytes Segment::short_message() const {
  Bytes out = udh;
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

SmsPayload segment(std::string_view text, std::uint8_t ref_num) {
  SmsPayload result;
  result.text = std::string(text);
  auto cps = utf8_decode(text);
  bool gsm = true;
  for (char32_t c : cps)
    if (gsm7_width(c) == 0) gsm = false;
  result.encoding = gsm ? Encoding::kGsm7 : Encoding::kUcs2;

  auto width = [gsm](char32_t c) { return gsm ? gsm7_width(c) : ucs2_width(c); };
  auto append = [gsm](Bytes& out, char32_t c, std::size_t pos) {
    if (gsm)
      append_gsm7(out, c, pos);
    else
      append_ucs2(out, c);
  };

  std::size_t total_units = 0;
  for (char32_t c : cps) total_units += static_cast<std::size_t>(width(c));
  const std::size_t single = gsm ? kSingleGsm7 : kSingleUcs2;
  const std::size_t multi = gsm ? kMultiGsm7 : kMultiUcs2;

  if (total_units <= single) {
    Segment seg;
    for (std::size_t i = 0; i < cps.size(); ++i) append(seg.payload, cps[i], i);
    result.segments.push_back(std::move(seg));
    return result;
  }

  // Greedy fill; a two-unit character never straddles a boundary.
  std::vector<Bytes> parts(1);
  std::size_t used = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    auto w = static_cast<std::size_t>(width(cps[i]));
    if (used + w > multi) {
      parts.emplace_back();
      used = 0;
    }
    append(parts.back(), cps[i], i);
    used += w;
  }
  if (parts.size() > kMaxSegments)
    throw Error("TOO_MANY_SEGMENTS", std::to_string(parts.size()) + " segments");

  auto total = static_cast<std::uint8_t>(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    Segment seg;
    seg.udh = {0x05, 0x00, 0x03, ref_num, total, static_cast<std::uint8_t>(i + 1)};
    seg.payload = std::move(parts[i]);
    result.segments.push_back(std::move(seg));
  }
  return result;
}

std::string payload_text(std::span<const std::uint8_t> payload, Encoding encoding) {
  return encoding == Encoding::kGsm7 ? gsm7_decode(payload) : ucs2_decode(payload);
}

UdhSplit split_udh(std::span<const std::uint8_t> sm) {
  UdhSplit out;
  if (sm.empty()) {
    out.ok = false;
    return out;
  }
  std::size_t udhl = sm[0];
  if (1 + udhl > sm.size()) {
    out.ok = false;
    return out;
  }
  std::size_t pos = 1;
  while (pos + 2 <= 1 + udhl) {
    std::uint8_t iei = sm[pos], len = sm[pos + 1];
    if (pos + 2 + len > 1 + udhl) {
      out.ok = false;
      return out;
    }
    if (iei == 0x00 && len == 3) out.concat = ConcatInfo{sm[pos + 2], sm[pos + 3], sm[pos + 4]};
    pos += 2 + len;
  }
  out.payload.assign(sm.begin() + static_cast<std::ptrdiff_t>(1 + udhl), sm.end());
  return out;
}

}  // namespace announcer::smpp

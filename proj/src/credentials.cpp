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

#include "announcer/credentials.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <charconv>
#include <vector>

#include "announcer/error.hpp"

namespace announcer {
namespace {

constexpr int kIterations = 100000;
constexpr std::size_t kDigestBytes = 32;

std::string to_hex(const unsigned char* p, std::size_t n) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(n * 2, '0');
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = kHex[p[i] >> 4];
    out[2 * i + 1] = kHex[p[i] & 0xF];
  }
  return out;
}

std::string derive(std::string_view password, std::string_view salt, int iterations) {
  unsigned char out[kDigestBytes];
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                        reinterpret_cast<const unsigned char*>(salt.data()), static_cast<int>(salt.size()),
                        iterations, EVP_sha256(), sizeof out, out) != 1)
    throw Error("CRYPTO_ERROR", "PBKDF2 failed");
  return to_hex(out, sizeof out);
}

}  // namespace

std::string random_hex(std::size_t n) {
  std::vector<unsigned char> buf(n);
  if (RAND_bytes(buf.data(), static_cast<int>(n)) != 1) throw Error("CRYPTO_ERROR", "RAND_bytes failed");
  return to_hex(buf.data(), n);
}

std::string hash_password(std::string_view password, std::string_view salt_hex) {
  return "pbkdf2-sha256$" + std::to_string(kIterations) + "$" + derive(password, salt_hex, kIterations);
}

bool verify_password(std::string_view password, std::string_view stored, std::string_view salt_hex) {
  constexpr std::string_view kPrefix = "pbkdf2-sha256$";
  if (stored.substr(0, kPrefix.size()) != kPrefix) return false;
  auto rest = stored.substr(kPrefix.size());
  auto dollar = rest.find('$');
  if (dollar == std::string_view::npos) return false;
  int iterations = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + dollar, iterations);
  if (ec != std::errc{} || ptr != rest.data() + dollar || iterations < 1) return false;
  return constant_time_equals(derive(password, salt_hex, iterations), rest.substr(dollar + 1));
}

bool constant_time_equals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace announcer

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

#include <cstddef>
#include <string>
#include <string_view>

namespace announcer {

/// Hex of `n` bytes from the OpenSSL CSPRNG.
std::string random_hex(std::size_t n);

/// PBKDF2-HMAC-SHA256; returns "pbkdf2-sha256$<iterations>$<hex digest>".
std::string hash_password(std::string_view password, std::string_view salt_hex);

/// Constant-time comparison against a stored hash. Malformed hashes never verify.
bool verify_password(std::string_view password, std::string_view stored_hash, std::string_view salt_hex);

bool constant_time_equals(std::string_view a, std::string_view b);

}  // namespace announcer

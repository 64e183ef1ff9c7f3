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

// Minimal blocking TCP over POSIX sockets, plus SMPP frame extraction.

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "announcer/smpp/codec.hpp"

namespace announcer::net {

/// Owns a socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { close(); }
  Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void close();
  /// Wakes any thread blocked in recv on this socket.
  void shutdown();

  /// Writes everything or returns false.
  bool send_all(std::span<const std::uint8_t> bytes);
  /// Returns bytes read; 0 on orderly close; -1 on error or timeout.
  long recv_some(std::span<std::uint8_t> buf, std::optional<std::chrono::milliseconds> timeout = std::nullopt);

 private:
  int fd_ = -1;
};

/// Throws Error("CONNECT_FAILED").
Socket connect_tcp(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout);

class Listener {
 public:
  /// Port 0 picks an ephemeral port. Throws Error("PORT_IN_USE") or ("LISTEN_FAILED").
  Listener(const std::string& host, std::uint16_t port);
  std::uint16_t port() const { return port_; }
  /// Waits up to `timeout`; nullopt if nothing arrived.
  std::optional<Socket> accept(std::chrono::milliseconds timeout);
  void close() { sock_.close(); }

 private:
  Socket sock_;
  std::uint16_t port_ = 0;
};

/// Accumulates stream bytes and yields complete SMPP frames.
class FrameBuffer {
 public:
  void append(std::span<const std::uint8_t> bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }
  /// Next decode outcome; kNeedMore when no complete frame is buffered. Frames
  /// that decode to anything but kNeedMore/kBadLength are consumed.
  smpp::DecodeResult next();

 private:
  std::vector<std::uint8_t> buf_;
};

}  // namespace announcer::net

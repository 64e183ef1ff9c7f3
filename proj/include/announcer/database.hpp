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

#include <sqlite3.h>

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace announcer {

class Statement {
 public:
  Statement(sqlite3* db, std::string_view sql);
  ~Statement();
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;
  Statement(Statement&& o) noexcept : db_(o.db_), stmt_(o.stmt_) { o.stmt_ = nullptr; }

  Statement& bind(int index, std::int64_t value);
  Statement& bind(int index, int value) { return bind(index, static_cast<std::int64_t>(value)); }
  Statement& bind(int index, std::string_view value);
  Statement& bind(int index, const char* value) { return bind(index, std::string_view(value)); }
  Statement& bind(int index, const std::string& value) { return bind(index, std::string_view(value)); }
  Statement& bind(int index, const std::optional<std::string>& value);
  Statement& bind_null(int index);

  /// Binds every argument in order, starting at index 1.
  template <class... Args>
  Statement& bind_all(const Args&... args) {
    int i = 0;
    (bind(++i, args), ...);
    return *this;
  }

  /// True while a row is available.
  bool step();
  /// Runs to completion, for statements that return no rows.
  void run();
  void reset();

  std::int64_t int64(int col) const;
  std::string text(int col) const;
  std::optional<std::string> optional_text(int col) const;
  bool is_null(int col) const;

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

/// One SQLite file. Reads may run concurrently; writes go through a single
/// writer gate and always run inside a transaction.
class Database {
 public:
  explicit Database(const std::string& path);
  ~Database();
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;

  Statement prepare(std::string_view sql) const { return Statement(db_, sql); }
  void exec(std::string_view sql);
  std::int64_t last_insert_rowid() const { return sqlite3_last_insert_rowid(db_); }
  std::int64_t changes() const { return sqlite3_changes(db_); }

  /// Runs `fn` in an IMMEDIATE transaction under the writer gate; rolls back
  /// if `fn` throws. Nested calls on the same thread join the outer transaction.
  template <class Fn>
  decltype(auto) write(Fn&& fn) {
    if (write_depth_ > 0) return fn();
    if (read_depth_ > 0) throw std::logic_error("write inside read");
    std::unique_lock lock(gate_);
    Depth depth;
    exec("BEGIN IMMEDIATE");
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        exec("COMMIT");
      } else {
        decltype(auto) result = fn();
        exec("COMMIT");
        return result;
      }
    } catch (...) {
      sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
      throw;
    }
  }

  template <class Fn>
  decltype(auto) read(Fn&& fn) const {
    if (write_depth_ > 0 || read_depth_ > 0) return fn();
    std::shared_lock lock(gate_);
    ReadDepth depth;
    return fn();
  }

  const std::string& path() const { return path_; }

 private:
  struct Depth {
    Depth() { ++write_depth_; }
    ~Depth() { --write_depth_; }
  };
  struct ReadDepth {
    ReadDepth() { ++read_depth_; }
    ~ReadDepth() { --read_depth_; }
  };
  static thread_local int write_depth_;
  static thread_local int read_depth_;

  std::string path_;
  sqlite3* db_ = nullptr;
  mutable std::shared_mutex gate_;
};

}  // namespace announcer

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
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace announcer {

/// RFC 4180 record reader: quoted fields, doubled quotes, embedded newlines,
/// CRLF or LF line endings, a leading UTF-8 BOM.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  struct Record {
    std::size_t line = 0;  ///< 1-based physical line the record starts on
    std::vector<std::string> fields;
    bool unterminated_quote = false;
  };

  std::optional<Record> next();

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  bool first_ = true;
};

std::string csv_escape(const std::string& field);

}  // namespace announcer

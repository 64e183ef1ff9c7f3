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

// Pre-formatted message texts with {placeholder} substitution.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace announcer {

enum class TemplateKey { kFeeReminder, kBookReminder, kAnnounce };

const char* to_string(TemplateKey key);
std::optional<TemplateKey> parse_template_key(std::string_view text);

using Bindings = std::map<std::string, std::string>;

/// Placeholders are `{name}` with name one of: name, amount, due_date,
/// book_title, fine, body. Any other brace is literal text.
class Template {
 public:
  /// Throws Error("UNKNOWN_PLACEHOLDER") for `{word}` outside the known set.
  explicit Template(std::string text);
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

/// Single pass: substituted values are never re-scanned. Throws
/// Error("MISSING_BINDING", name).
std::string render(const Template& tmpl, const Bindings& bindings);

class TemplateSet {
 public:
  /// Built-in texts for every key.
  TemplateSet();
  /// Built-ins overridden by `KEY = text` lines from `path`. Throws
  /// Error("CONFIG_NOT_FOUND") or Error("BAD_TEMPLATE").
  static TemplateSet load(const std::filesystem::path& path);

  const Template& get(TemplateKey key) const { return templates_.at(key); }
  void set(TemplateKey key, Template t) { templates_.insert_or_assign(key, std::move(t)); }

 private:
  std::map<TemplateKey, Template> templates_;
};

}  // namespace announcer

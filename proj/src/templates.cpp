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

#include "announcer/templates.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "announcer/error.hpp"

namespace announcer {

namespace {

constexpr std::array<std::string_view, 6> kPlaceholders = {"name", "amount", "due_date", "book_title", "fine", "body"};

bool word_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Calls `on_placeholder(name)` for each {word} and `on_text(chunk)` between them.
template <class OnText, class OnPlaceholder>
void scan(std::string_view text, OnText on_text, OnPlaceholder on_placeholder) {
  std::size_t i = 0, literal = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      std::size_t j = i + 1;
      while (j < text.size() && word_char(text[j])) ++j;
      if (j > i + 1 && j < text.size() && text[j] == '}') {
        on_text(text.substr(literal, i - literal));
        on_placeholder(text.substr(i + 1, j - i - 1));
        i = literal = j + 1;
        continue;
      }
    }
    ++i;
  }
  on_text(text.substr(literal));
}

}  // namespace

const char* to_string(TemplateKey key) {
  switch (key) {
    case TemplateKey::kFeeReminder: return "FEE_REMINDER";
    case TemplateKey::kBookReminder: return "BOOK_REMINDER";
    case TemplateKey::kAnnounce: return "ANNOUNCE";
  }
  return "?";
}

std::optional<TemplateKey> parse_template_key(std::string_view text) {
  for (auto k : {TemplateKey::kFeeReminder, TemplateKey::kBookReminder, TemplateKey::kAnnounce})
    if (text == to_string(k)) return k;
  return std::nullopt;
}

Template::Template(std::string text) : text_(std::move(text)) {
  scan(
      text_, [](std::string_view) {},
      [](std::string_view name) {
        if (std::find(kPlaceholders.begin(), kPlaceholders.end(), name) == kPlaceholders.end())
          throw Error("UNKNOWN_PLACEHOLDER", std::string(name));
      });
}

std::string render(const Template& tmpl, const Bindings& bindings) {
  std::string out;
  scan(
      tmpl.text(), [&](std::string_view chunk) { out += chunk; },
      [&](std::string_view name) {
        auto it = bindings.find(std::string(name));
        if (it == bindings.end()) throw Error("MISSING_BINDING", std::string(name));
        out += it->second;
      });
  return out;
}

TemplateSet::TemplateSet() {
  templates_.emplace(TemplateKey::kFeeReminder,
                     Template("Dear {name}, your fee balance of RM{amount} was due on {due_date}. "
                              "Please settle it at the records office."));
  templates_.emplace(TemplateKey::kBookReminder,
                     Template("Dear {name}, \"{book_title}\" was due on {due_date}. Fine to date: RM{fine}. "
                              "Please return it to the library."));
  templates_.emplace(TemplateKey::kAnnounce, Template("{body}"));
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("CONFIG_NOT_FOUND", path.string());
  TemplateSet set;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("BAD_TEMPLATE", "line " + std::to_string(lineno) + ": expected KEY = text");
    auto key_text = line.substr(first, eq - first);
    key_text.erase(key_text.find_last_not_of(" \t") + 1);
    auto key = parse_template_key(key_text);
    if (!key) throw Error("BAD_TEMPLATE", "line " + std::to_string(lineno) + ": unknown key " + key_text);
    auto value = line.substr(eq + 1);
    if (!value.empty() && value.front() == ' ') value.erase(0, 1);
    try {
      set.set(*key, Template(value));
    } catch (const Error& e) {
      throw Error("BAD_TEMPLATE", "line " + std::to_string(lineno) + ": unknown placeholder {" + e.detail() + "}");
    }
  }
  return set;
}

}  // namespace announcer

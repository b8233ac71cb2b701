// phrasekit/config.cpp

// Copyright 2026  The PhraseKit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "phrasekit/config.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "phrasekit/common.hpp"
#include "phrasekit/io_util.hpp"

namespace fs = std::filesystem;

namespace pk {

namespace {

constexpr int kMaxIncludeDepth = 16;

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::load(const std::string& path) {
  Config c;
  c.parse(read_text_file(path), fs::path(path).parent_path().string(), 0);
  return c;
}

Config Config::from_string(const std::string& text, const std::string& base_dir) {
  Config c;
  c.parse(text, base_dir, 0);
  return c;
}

void Config::parse(const std::string& text, const std::string& base_dir, int depth) {
  PK_CHECK(depth < kMaxIncludeDepth, "config-parse", "include nesting too deep");
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.rfind("include ", 0) == 0) {
      fs::path inc(trim(line.substr(8)));
      if (!inc.is_absolute() && !base_dir.empty()) inc = fs::path(base_dir) / inc;
      parse(read_text_file(inc.string()), inc.parent_path().string(), depth + 1);
      continue;
    }

    const std::size_t eq = line.find('=');
    PK_CHECK(eq != std::string::npos, "config-parse",
             "line " << lineno << ": expected 'key = value', got '" << line << "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    PK_CHECK(!key.empty(), "config-parse", "line " << lineno << ": empty key");
    entries_[key] = value;
  }
}

void Config::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

std::string Config::require_string(const std::string& key) const {
  const auto it = entries_.find(key);
  PK_CHECK(it != entries_.end(), "config-missing", "required config key '" << key << "'");
  return it->second;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    PK_ERR("config-parse", "key '" << key << "': not an integer: '" << it->second << "'");
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    PK_ERR("config-parse", "key '" << key << "': not a number: '" << it->second << "'");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  PK_ERR("config-parse", "key '" << key << "': not a boolean: '" << it->second << "'");
}

}  // namespace pk

// phrasekit/config.hpp

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

#ifndef PHRASEKIT_CONFIG_HPP
#define PHRASEKIT_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

namespace pk {

// Flat "key = value" text config.  '#' starts a comment; "include <path>"
// splices another file (relative to the including file); later keys override
// earlier ones.
class Config {
 public:
  Config() = default;

  static Config load(const std::string& path);
  static Config from_string(const std::string& text, const std::string& base_dir = "");

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  void parse(const std::string& text, const std::string& base_dir, int depth);
  std::map<std::string, std::string> entries_;
};

}  // namespace pk

#endif  // PHRASEKIT_CONFIG_HPP

// phrasekit/manifest.cpp

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

#include "phrasekit/manifest.hpp"

#include <filesystem>
#include <set>
#include <sstream>

#include "phrasekit/common.hpp"
#include "phrasekit/io_util.hpp"

namespace fs = std::filesystem;

namespace pk {

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kEnroll: return "enroll";
    default: return "eval";
  }
}

Split split_from_name(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "enroll") return Split::kEnroll;
  if (s == "eval") return Split::kEval;
  PK_ERR("bad-split", "unknown split tag '" << s << "'");
}

std::string Manifest::resolve_path(const ManifestRow& row) const {
  fs::path p(row.path);
  if (p.is_absolute() || base_dir.empty()) return row.path;
  return (fs::path(base_dir) / p).string();
}

std::vector<const ManifestRow*> Manifest::rows_in(Split split) const {
  std::vector<const ManifestRow*> out;
  for (const auto& r : rows)
    if (r.split == split) out.push_back(&r);
  return out;
}

std::vector<std::string> Manifest::phrases_in(Split split) const {
  std::set<std::string> s;
  for (const auto& r : rows)
    if (r.split == split) s.insert(r.phrase);
  return {s.begin(), s.end()};
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::vector<std::string> split_spaces(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

Manifest load_manifest(const std::string& path) {
  const std::string content = read_text_file(path);
  std::istringstream is(content);
  Manifest m;
  m.base_dir = fs::path(path).parent_path().string();

  std::string line;
  PK_CHECK(std::getline(is, line), "bad-format", path << ": empty manifest");
  {
    const auto header = split_tabs(line);
    PK_CHECK(header.size() >= 5 && header[0] == "utt_id" && header[1] == "path" &&
                 header[2] == "phrase" && header[3] == "speaker" && header[4] == "split",
             "bad-format", path << ": bad header line");
  }

  std::set<std::string> seen;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    PK_CHECK(fields.size() == 5 || fields.size() == 6, "bad-format",
             path << ":" << lineno << ": expected 5 or 6 fields, got " << fields.size());
    ManifestRow row;
    row.utt_id = fields[0];
    row.path = fields[1];
    row.phrase = fields[2];
    row.speaker = fields[3];
    row.split = split_from_name(fields[4]);
    if (fields.size() == 6) row.transcript = split_spaces(fields[5]);
    PK_CHECK(seen.insert(row.utt_id).second, "manifest-duplicate-id",
             path << ":" << lineno << ": duplicate utterance id '" << row.utt_id << "'");
    PK_CHECK(fs::exists(m.resolve_path(row)), "manifest-missing-file",
             path << ":" << lineno << ": missing file '" << m.resolve_path(row) << "'");
    m.rows.push_back(std::move(row));
  }
  PK_CHECK(!m.rows.empty(), "bad-format", path << ": manifest has no rows");
  return m;
}

void save_manifest(const std::string& path, const Manifest& manifest) {
  std::ostringstream ss;
  ss << "utt_id\tpath\tphrase\tspeaker\tsplit\ttranscript\n";
  for (const auto& r : manifest.rows) {
    ss << r.utt_id << '\t' << r.path << '\t' << r.phrase << '\t' << r.speaker << '\t'
       << split_name(r.split) << '\t';
    for (std::size_t i = 0; i < r.transcript.size(); ++i) {
      if (i) ss << ' ';
      ss << r.transcript[i];
    }
    ss << '\n';
  }
  write_text_file(path, ss.str());
}

}  // namespace pk

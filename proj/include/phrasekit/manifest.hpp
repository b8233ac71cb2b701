// phrasekit/manifest.hpp

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

#ifndef PHRASEKIT_MANIFEST_HPP
#define PHRASEKIT_MANIFEST_HPP

#include <string>
#include <vector>

namespace pk {

enum class Split { kTrain, kEnroll, kEval };

const char* split_name(Split s);
Split split_from_name(const std::string& s);

struct ManifestRow {
  std::string utt_id;
  std::string path;  // audio (.wav) or PKFT feature file; relative to the manifest
  std::string phrase;
  std::string speaker;
  Split split = Split::kTrain;
  std::vector<std::string> transcript;  // may be empty
};

// Tab-separated UTF-8 with a header line:
//   utt_id<TAB>path<TAB>phrase<TAB>speaker<TAB>split<TAB>transcript
// transcript is a space-separated label sequence and may be empty.
struct Manifest {
  std::vector<ManifestRow> rows;
  std::string base_dir;  // directory of the manifest file; resolves paths

  std::string resolve_path(const ManifestRow& row) const;
  std::vector<const ManifestRow*> rows_in(Split split) const;
  std::vector<std::string> phrases_in(Split split) const;  // sorted unique
};

// Validation rejects duplicate ids, unknown split tags and dangling paths
// before any compute starts.
Manifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const Manifest& manifest);

}  // namespace pk

#endif  // PHRASEKIT_MANIFEST_HPP

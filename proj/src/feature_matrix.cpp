// phrasekit/feature_matrix.cpp

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

#include "phrasekit/feature_matrix.hpp"

#include <vector>

#include "phrasekit/common.hpp"
#include "phrasekit/io_util.hpp"

namespace pk {

static const char kFeatMagic[4] = {'P', 'K', 'F', 'T'};
static const std::uint32_t kFeatVersion = 1;

void write_features(const std::string& path, const FeatureMatrix& feat) {
  PK_CHECK(feat.num_frames() >= 1 && feat.dim() >= 1, "bad-shape",
           "refusing to write empty feature matrix: " << path);
  BinaryWriter w(path);
  w.write_magic(kFeatMagic);
  w.write_u32(kFeatVersion);
  w.write_u32(static_cast<std::uint32_t>(feat.num_frames()));
  w.write_u32(static_cast<std::uint32_t>(feat.dim()));
  w.write_f32(static_cast<float>(feat.frame_shift));
  std::vector<float> row(feat.dim());
  for (int t = 0; t < feat.num_frames(); ++t) {
    for (int d = 0; d < feat.dim(); ++d)
      row[d] = static_cast<float>(feat.data(t, d));
    w.write_f32_array(row.data(), row.size());
  }
  w.close();
}

FeatureMatrix read_features(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic(kFeatMagic);
  r.expect_version(kFeatVersion);
  const std::uint32_t num_frames = r.read_u32();
  const std::uint32_t dim = r.read_u32();
  PK_CHECK(num_frames >= 1 && dim >= 1, "bad-shape",
           path << ": empty feature matrix");
  FeatureMatrix feat;
  feat.frame_shift = static_cast<double>(r.read_f32());
  feat.data.resize(num_frames, dim);
  std::vector<float> row(dim);
  for (std::uint32_t t = 0; t < num_frames; ++t) {
    r.read_f32_array(row.data(), dim);
    for (std::uint32_t d = 0; d < dim; ++d)
      feat.data(t, d) = static_cast<double>(row[d]);
  }
  return feat;
}

FeatureMatrix quantize_to_f32(const FeatureMatrix& feat) {
  FeatureMatrix out = feat;
  out.data = feat.data.cast<float>().cast<double>();
  return out;
}

}  // namespace pk

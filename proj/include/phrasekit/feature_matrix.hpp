// phrasekit/feature_matrix.hpp

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

#ifndef PHRASEKIT_FEATURE_MATRIX_HPP
#define PHRASEKIT_FEATURE_MATRIX_HPP

#include <Eigen/Dense>
#include <string>

namespace pk {

// One row per frame.  Math is done in double; the on-disk format (PKFT)
// stores float32, so a loaded matrix always holds float-representable values.
struct FeatureMatrix {
  Eigen::MatrixXd data;
  double frame_shift = 0.01;  // seconds

  int num_frames() const { return static_cast<int>(data.rows()); }
  int dim() const { return static_cast<int>(data.cols()); }
};

// PKFT feature file, little-endian:
//   magic "PKFT", u32 version=1, u32 num_frames, u32 dim,
//   f32 frame_shift_seconds, num_frames*dim f32 row-major.
// This is also the ingestion path for externally computed features
// (e.g. bottleneck features): anything in this container is accepted.
void write_features(const std::string& path, const FeatureMatrix& feat);
FeatureMatrix read_features(const std::string& path);

// Casts every value through float32.  Applied at the feature-stage boundary
// of the pipeline so that in-process runs match staged CLI runs that go
// through PKFT files bit for bit.
FeatureMatrix quantize_to_f32(const FeatureMatrix& feat);

}  // namespace pk

#endif  // PHRASEKIT_FEATURE_MATRIX_HPP

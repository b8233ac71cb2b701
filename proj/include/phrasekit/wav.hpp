// phrasekit/wav.hpp

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

#ifndef PHRASEKIT_WAV_HPP
#define PHRASEKIT_WAV_HPP

#include <string>
#include <vector>

namespace pk {

struct AudioBuffer {
  std::vector<double> samples;  // amplitudes in [-1, 1]
  int sample_rate = 0;          // Hz

  std::size_t num_samples() const { return samples.size(); }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// Reads a RIFF/WAVE file.  Only mono 16-bit linear PCM is accepted; samples
// are scaled by 1/32768 so the int16 range maps into [-1, 1).
// Errors: "wav-malformed", "wav-multichannel", "wav-encoding".
AudioBuffer read_wav(const std::string& path);

// Writes mono 16-bit PCM.  Values are clamped to [-1, 1] and rounded.
void write_wav(const std::string& path, const AudioBuffer& audio);

}  // namespace pk

#endif  // PHRASEKIT_WAV_HPP

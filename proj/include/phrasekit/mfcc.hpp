// phrasekit/mfcc.hpp

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

#ifndef PHRASEKIT_MFCC_HPP
#define PHRASEKIT_MFCC_HPP

#include <complex>
#include <vector>

#include "phrasekit/feature_matrix.hpp"
#include "phrasekit/wav.hpp"

namespace pk {

struct MfccConfig {
  double window_length = 0.025;  // seconds
  double frame_shift = 0.010;    // seconds
  int num_mel_filters = 24;
  int num_cepstra = 20;          // including c0
  double preemphasis = 0.97;
  int delta_window = 2;          // frames on each side
  bool apply_cmvn = true;
  bool vad = false;              // optional energy-based frame dropper
  double vad_threshold_db = 30.0;
};

// Per frame: pre-emphasis -> Hamming window -> power spectrum (radix-2 FFT,
// zero padded to the next power of two) -> mel filterbank -> log (floored at
// 1e-10) -> orthonormal DCT-II, keeping num_cepstra coefficients incl. c0.
// Frame count is floor((num_samples - window) / shift) + 1.
// Errors: "audio-too-short" when no full window fits, "bad-config",
// "sample-rate" is never resampled.
FeatureMatrix compute_mfcc(const AudioBuffer& audio, const MfccConfig& cfg);

// Appends first- and second-order regression deltas (window +-delta_window,
// edges replicated); output dim = 3x input dim.
FeatureMatrix append_deltas(const FeatureMatrix& feat, int delta_window);

// Per-utterance, per-dimension mean subtraction; variance normalized to 1
// where the raw (population) variance is >= the floor, mean-only otherwise.
// A single-frame input degrades to mean-only normalization with a warning.
FeatureMatrix apply_cmvn(const FeatureMatrix& feat);

// Drops frames whose c0 falls more than threshold_db below the utterance
// maximum.  Keeps at least one frame.
FeatureMatrix drop_low_energy_frames(const FeatureMatrix& feat, double threshold_db,
                                     int num_mel_filters);

// Full frontend chain: MFCC -> (optional VAD) -> deltas -> (optional CMVN).
FeatureMatrix extract_features(const AudioBuffer& audio, const MfccConfig& cfg);

// --- internals exposed for direct verification ---

struct MelFilter {
  int first_bin = 0;                 // index of the first nonzero FFT bin
  std::vector<double> weights;       // weights for bins first_bin..first_bin+n-1
  double left_hz = 0, center_hz = 0, right_hz = 0;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters equally spaced on the mel scale between 0 Hz and
// Nyquist, with weights linear in mel.
std::vector<MelFilter> build_mel_filterbank(int num_filters, int sample_rate,
                                            int nfft);

// In-place radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& x);

// Mel filterbank energies of one analysis frame (pre-emphasized, windowed,
// power spectrum applied); used by compute_mfcc and testable directly.
std::vector<double> mel_energies_of_frame(const std::vector<double>& frame,
                                          const std::vector<MelFilter>& filters,
                                          int nfft);

}  // namespace pk

#endif  // PHRASEKIT_MFCC_HPP

// phrasekit/synth.hpp

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

#ifndef PHRASEKIT_SYNTH_HPP
#define PHRASEKIT_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "phrasekit/manifest.hpp"

namespace pk {

// Synthetic pass-phrase corpus.  A phrase is a fixed sequence of 4-8
// "segments"; a segment is filtered noise with a label-deterministic
// spectral envelope (two resonators) and duration.  Speakers perturb
// envelopes and durations with speaker-deterministic offsets; utterances add
// per-utterance jitter plus white noise at the configured SNR, and carry a
// short "sil" segment at each end.  Transcripts are the segment-label
// sequences (including "sil"), which serve as phones downstream.  Everything
// is reproducible from the seed.
struct SpeakerGroup {
  int num_speakers = 0;
  int reps_per_speaker = 0;
  Split split = Split::kTrain;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  int num_phrases = 10;
  std::vector<SpeakerGroup> groups;
  int sample_rate = 16000;
  double snr_db = 20.0;
  int alphabet_size = 16;  // distinct speech segment labels
  double speaker_formant_sigma = 0.04;   // log-scale spread of speaker envelopes
  double speaker_duration_sigma = 0.08;  // log-scale spread of speaker tempo
};

// The speech-segment label sequences (without "sil"), deterministic in the
// seed.  Sequences use 4-8 distinct labels and any two phrases differ in at
// least two labels.
std::vector<std::vector<std::string>> phrase_label_sequences(std::uint64_t seed,
                                                             int num_phrases,
                                                             int alphabet_size);

// Writes wavs under <out_dir>/audio and the manifest to
// <out_dir>/manifest.tsv; returns the manifest.
Manifest generate_synthetic_corpus_ex(const SynthConfig& cfg, const std::string& out_dir);

// Single-group convenience: num_speakers all in the train split.
Manifest generate_synthetic_corpus(std::uint64_t seed, int num_phrases, int num_speakers,
                                   int reps_per_speaker, const std::string& out_dir);

}  // namespace pk

#endif  // PHRASEKIT_SYNTH_HPP

// phrasekit/synth.cpp

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

#include "phrasekit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "phrasekit/common.hpp"
#include "phrasekit/rng.hpp"
#include "phrasekit/wav.hpp"

namespace fs = std::filesystem;

namespace pk {

namespace {

// derive_seed stream ids
enum Stream : std::uint64_t {
  kStreamPhrase = 1,
  kStreamLabel = 2,
  kStreamSpeaker = 3,
  kStreamUtterance = 4,
};

constexpr double kSpeechRms = 0.1;
constexpr double kSilenceRms = 0.003;
constexpr double kUttFormantSigma = 0.015;
constexpr double kUttDurationSigma = 0.06;

struct LabelEnvelope {
  double f1, f2;    // resonator center frequencies, Hz
  double bw1, bw2;  // bandwidths, Hz
  double mix2;      // level of the second resonator
  double duration;  // base seconds
};

LabelEnvelope label_envelope(std::uint64_t seed, int label_index) {
  Rng rng(derive_seed(seed, kStreamLabel, static_cast<std::uint64_t>(label_index)));
  LabelEnvelope e;
  e.f1 = rng.uniform(300.0, 1100.0);
  e.f2 = rng.uniform(1400.0, 3800.0);
  e.bw1 = rng.uniform(80.0, 200.0);
  e.bw2 = rng.uniform(100.0, 250.0);
  e.mix2 = rng.uniform(0.4, 0.9);
  e.duration = rng.uniform(0.25, 0.40);
  return e;
}

struct SpeakerVoice {
  double formant_mult;
  double bandwidth_mult;
  double duration_mult;
};

SpeakerVoice speaker_voice(const SynthConfig& cfg, int speaker_index) {
  Rng rng(derive_seed(cfg.seed, kStreamSpeaker, static_cast<std::uint64_t>(speaker_index)));
  SpeakerVoice v;
  v.formant_mult = std::exp(rng.normal(0.0, cfg.speaker_formant_sigma));
  v.bandwidth_mult = std::exp(rng.normal(0.0, 0.1));
  v.duration_mult = std::exp(rng.normal(0.0, cfg.speaker_duration_sigma));
  return v;
}

// Two-pole resonator driven by the excitation.
std::vector<double> resonate(const std::vector<double>& x, double freq_hz,
                             double bw_hz, int sample_rate) {
  const double r = std::exp(-M_PI * bw_hz / sample_rate);
  const double a1 = 2.0 * r * std::cos(2.0 * M_PI * freq_hz / sample_rate);
  const double a2 = -r * r;
  const double b0 = 1.0 - r;
  std::vector<double> y(x.size());
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    y[n] = b0 * x[n] + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y[n];
  }
  return y;
}

void scale_to_rms(std::vector<double>* x, double target_rms) {
  double e = 0.0;
  for (double v : *x) e += v * v;
  const double rms = std::sqrt(e / x->size());
  if (rms <= 0.0) return;
  const double g = target_rms / rms;
  for (double& v : *x) v *= g;
}

void apply_edge_ramps(std::vector<double>* x, int ramp_samples) {
  const int n = static_cast<int>(x->size());
  const int ramp = std::min(ramp_samples, n / 2);
  for (int i = 0; i < ramp; ++i) {
    const double g = static_cast<double>(i + 1) / (ramp + 1);
    (*x)[i] *= g;
    (*x)[n - 1 - i] *= g;
  }
}

std::vector<double> speech_segment(Rng* utt_rng, const LabelEnvelope& env,
                                   const SpeakerVoice& voice, int sample_rate) {
  const double dur = env.duration * voice.duration_mult *
                     std::exp(utt_rng->normal(0.0, kUttDurationSigma));
  const int n = std::max(sample_rate / 50, static_cast<int>(std::lround(dur * sample_rate)));
  std::vector<double> excitation(n);
  for (double& v : excitation) v = utt_rng->normal();
  const double jitter = std::exp(utt_rng->normal(0.0, kUttFormantSigma));
  const auto y1 = resonate(excitation, env.f1 * voice.formant_mult * jitter,
                           env.bw1 * voice.bandwidth_mult, sample_rate);
  const auto y2 = resonate(excitation, env.f2 * voice.formant_mult * jitter,
                           env.bw2 * voice.bandwidth_mult, sample_rate);
  std::vector<double> seg(n);
  for (int i = 0; i < n; ++i) seg[i] = y1[i] + env.mix2 * y2[i];
  scale_to_rms(&seg, kSpeechRms);
  apply_edge_ramps(&seg, sample_rate / 200);  // 5 ms
  return seg;
}

std::vector<double> silence_segment(Rng* utt_rng, int sample_rate) {
  const double dur = utt_rng->uniform(0.12, 0.18);
  const int n = static_cast<int>(std::lround(dur * sample_rate));
  std::vector<double> seg(n);
  for (double& v : seg) v = kSilenceRms * utt_rng->normal();
  return seg;
}

std::string label_name(int index) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "a%02d", index);
  return buf;
}

}  // namespace

std::vector<std::vector<std::string>> phrase_label_sequences(std::uint64_t seed,
                                                             int num_phrases,
                                                             int alphabet_size) {
  PK_CHECK(num_phrases >= 1, "bad-config", "need at least one phrase");
  PK_CHECK(alphabet_size >= 10, "bad-config", "alphabet too small for distinct phrases");

  std::vector<std::set<int>> accepted_sets;
  std::vector<std::vector<std::string>> sequences;
  for (int p = 0; p < num_phrases; ++p) {
    bool placed = false;
    for (std::uint64_t salt = 0; salt < 1000 && !placed; ++salt) {
      Rng rng(derive_seed(seed, kStreamPhrase,
                          static_cast<std::uint64_t>(p) * 1009 + salt));
      const int len = 4 + static_cast<int>(rng.uniform_int(5));  // 4..8
      std::vector<int> pool(alphabet_size);
      for (int i = 0; i < alphabet_size; ++i) pool[i] = i;
      for (int i = 0; i < len; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(alphabet_size - i));
        std::swap(pool[i], pool[j]);
      }
      std::set<int> labels(pool.begin(), pool.begin() + len);
      // any two phrases must differ in at least two labels
      bool ok = true;
      for (const auto& other : accepted_sets) {
        std::vector<int> sym;
        std::set_symmetric_difference(labels.begin(), labels.end(), other.begin(),
                                      other.end(), std::back_inserter(sym));
        if (sym.size() < 2) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      accepted_sets.push_back(labels);
      std::vector<std::string> names;
      for (int i = 0; i < len; ++i) names.push_back(label_name(pool[i]));
      sequences.push_back(std::move(names));
      placed = true;
    }
    PK_CHECK(placed, "bad-config",
             "could not place " << num_phrases << " distinct phrases over an alphabet of "
                                << alphabet_size);
  }
  return sequences;
}

Manifest generate_synthetic_corpus_ex(const SynthConfig& cfg, const std::string& out_dir) {
  PK_CHECK(!cfg.groups.empty(), "bad-config", "no speaker groups");
  PK_CHECK(cfg.sample_rate > 0, "bad-config", "bad sample rate");
  fs::create_directories(fs::path(out_dir) / "audio");

  const auto phrases = phrase_label_sequences(cfg.seed, cfg.num_phrases, cfg.alphabet_size);
  std::vector<LabelEnvelope> envelopes(cfg.alphabet_size);
  for (int l = 0; l < cfg.alphabet_size; ++l) envelopes[l] = label_envelope(cfg.seed, l);

  Manifest manifest;
  manifest.base_dir = out_dir;

  int speaker_base = 0;
  std::uint64_t utt_index = 0;
  for (const auto& group : cfg.groups) {
    for (int s = 0; s < group.num_speakers; ++s) {
      const int speaker_id = speaker_base + s;
      const SpeakerVoice voice = speaker_voice(cfg, speaker_id);
      char spk_name[16];
      std::snprintf(spk_name, sizeof(spk_name), "s%03d", speaker_id);

      for (int p = 0; p < cfg.num_phrases; ++p) {
        for (int rep = 0; rep < group.reps_per_speaker; ++rep, ++utt_index) {
          Rng utt_rng(derive_seed(cfg.seed, kStreamUtterance, utt_index));

          std::vector<double> samples;
          {
            const auto sil = silence_segment(&utt_rng, cfg.sample_rate);
            samples.insert(samples.end(), sil.begin(), sil.end());
          }
          for (const auto& label : phrases[p]) {
            const int li = std::stoi(label.substr(1));
            const auto seg = speech_segment(&utt_rng, envelopes[li], voice, cfg.sample_rate);
            samples.insert(samples.end(), seg.begin(), seg.end());
          }
          {
            const auto sil = silence_segment(&utt_rng, cfg.sample_rate);
            samples.insert(samples.end(), sil.begin(), sil.end());
          }

          // additive noise at the configured SNR, relative to overall RMS
          double e = 0.0;
          for (double v : samples) e += v * v;
          const double rms = std::sqrt(e / samples.size());
          const double noise_rms = rms / std::pow(10.0, cfg.snr_db / 20.0);
          for (double& v : samples) v += noise_rms * utt_rng.normal();

          double peak = 0.0;
          for (double v : samples) peak = std::max(peak, std::abs(v));
          if (peak > 0.97)
            for (double& v : samples) v *= 0.97 / peak;

          char utt_id[48];
          std::snprintf(utt_id, sizeof(utt_id), "p%02d_%s_r%d", p, spk_name, rep);

          AudioBuffer audio;
          audio.sample_rate = cfg.sample_rate;
          audio.samples = std::move(samples);
          const std::string rel = std::string("audio/") + utt_id + ".wav";
          write_wav((fs::path(out_dir) / rel).string(), audio);

          ManifestRow row;
          row.utt_id = utt_id;
          row.path = rel;
          char phrase_name[16];
          std::snprintf(phrase_name, sizeof(phrase_name), "p%02d", p);
          row.phrase = phrase_name;
          row.speaker = spk_name;
          row.split = group.split;
          row.transcript.push_back("sil");
          for (const auto& l : phrases[p]) row.transcript.push_back(l);
          row.transcript.push_back("sil");
          manifest.rows.push_back(std::move(row));
        }
      }
    }
    speaker_base += group.num_speakers;
  }

  save_manifest((fs::path(out_dir) / "manifest.tsv").string(), manifest);
  return manifest;
}

Manifest generate_synthetic_corpus(std::uint64_t seed, int num_phrases, int num_speakers,
                                   int reps_per_speaker, const std::string& out_dir) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.num_phrases = num_phrases;
  cfg.groups.push_back({num_speakers, reps_per_speaker, Split::kTrain});
  return generate_synthetic_corpus_ex(cfg, out_dir);
}

}  // namespace pk

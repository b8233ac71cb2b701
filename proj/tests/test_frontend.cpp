// phrasekit/tests/test_frontend.cpp

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

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <fstream>

#include "oracles.hpp"
#include "phrasekit/common.hpp"
#include "phrasekit/io_util.hpp"
#include "phrasekit/mfcc.hpp"
#include "phrasekit/wav.hpp"
#include "test_util.hpp"

using namespace pk;

namespace {

AudioBuffer sine_tone(double freq, double seconds, int sample_rate, double amp = 0.5) {
  AudioBuffer a;
  a.sample_rate = sample_rate;
  const int n = static_cast<int>(seconds * sample_rate);
  a.samples.resize(n);
  for (int i = 0; i < n; ++i)
    a.samples[i] = amp * std::sin(2.0 * M_PI * freq * i / sample_rate);
  return a;
}

// Hand-written RIFF so the reader is tested against exact bytes, not against
// our own writer.
void write_raw_wav(const std::string& path, std::uint16_t format,
                   std::uint16_t channels, std::uint32_t sample_rate,
                   std::uint16_t bits, const std::vector<std::int16_t>& pcm) {
  std::ofstream os(path, std::ios::binary);
  const std::uint32_t data_size = static_cast<std::uint32_t>(pcm.size() * 2);
  const std::uint32_t riff_size = 36 + data_size;
  const std::uint32_t fmt_size = 16;
  const std::uint32_t byte_rate = sample_rate * channels * bits / 8;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  os.write("RIFF", 4);
  os.write(reinterpret_cast<const char*>(&riff_size), 4);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  os.write(reinterpret_cast<const char*>(&fmt_size), 4);
  os.write(reinterpret_cast<const char*>(&format), 2);
  os.write(reinterpret_cast<const char*>(&channels), 2);
  os.write(reinterpret_cast<const char*>(&sample_rate), 4);
  os.write(reinterpret_cast<const char*>(&byte_rate), 4);
  os.write(reinterpret_cast<const char*>(&block_align), 2);
  os.write(reinterpret_cast<const char*>(&bits), 2);
  os.write("data", 4);
  os.write(reinterpret_cast<const char*>(&data_size), 4);
  os.write(reinterpret_cast<const char*>(pcm.data()), data_size);
}

}  // namespace

TEST_CASE("read_wav accepts mono 16-bit PCM and scales by 1/32768") {
  pk_test::TempDir tmp("wav");
  const std::string path = tmp.str() + "/mono.wav";
  std::vector<std::int16_t> pcm(16000, 0);
  pcm[0] = -32768;
  pcm[1] = 16384;
  write_raw_wav(path, 1, 1, 16000, 16, pcm);

  const AudioBuffer a = read_wav(path);
  CHECK(a.sample_rate == 16000);
  CHECK(a.num_samples() == 16000);
  CHECK(a.samples[0] == -1.0);  // exact by the scaling definition
  CHECK(a.samples[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("read_wav rejects stereo, non-PCM and malformed files distinctly") {
  pk_test::TempDir tmp("wavbad");
  const std::vector<std::int16_t> pcm(64, 0);

  const std::string stereo = tmp.str() + "/stereo.wav";
  write_raw_wav(stereo, 1, 2, 16000, 16, pcm);
  CHECK_THROWS_WITH_AS(read_wav(stereo), doctest::Contains("wav-multichannel"), Error);

  const std::string ieee = tmp.str() + "/float.wav";
  write_raw_wav(ieee, 3, 1, 16000, 16, pcm);
  CHECK_THROWS_WITH_AS(read_wav(ieee), doctest::Contains("wav-encoding"), Error);

  const std::string junk = tmp.str() + "/junk.wav";
  pk::write_text_file(junk, "definitely not a wav file");
  CHECK_THROWS_WITH_AS(read_wav(junk), doctest::Contains("wav-malformed"), Error);
}

TEST_CASE("wav writer round-trips through the reader") {
  pk_test::TempDir tmp("wavrt");
  const AudioBuffer a = sine_tone(440.0, 0.25, 16000);
  const std::string path = tmp.str() + "/tone.wav";
  write_wav(path, a);
  const AudioBuffer b = read_wav(path);
  REQUIRE(b.num_samples() == a.num_samples());
  for (std::size_t i = 0; i < 100; ++i)
    CHECK(b.samples[i] == doctest::Approx(a.samples[i]).epsilon(1e-3));
}

TEST_CASE("compute_mfcc frame count follows the framing formula") {
  AudioBuffer a = sine_tone(300.0, 1.0, 16000);
  REQUIRE(a.num_samples() == 16000);
  MfccConfig cfg;
  const FeatureMatrix f = compute_mfcc(a, cfg);
  CHECK(f.num_frames() == 98);  // floor((16000-400)/160)+1
  CHECK(f.dim() == cfg.num_cepstra);

  // general formula on a few more shapes
  for (int n : {400, 401, 559, 560, 561, 4000}) {
    AudioBuffer b;
    b.sample_rate = 16000;
    b.samples.assign(n, 0.01);
    const int expected = (n - 400) / 160 + 1;
    CHECK(compute_mfcc(b, cfg).num_frames() == expected);
  }
}

TEST_CASE("compute_mfcc rejects audio shorter than one window") {
  AudioBuffer a;
  a.sample_rate = 16000;
  a.samples.assign(399, 0.0);
  CHECK_THROWS_WITH_AS(compute_mfcc(a, MfccConfig{}), doctest::Contains("audio-too-short"),
                       Error);
}

TEST_CASE("all-zero signal produces identical frames") {
  AudioBuffer a;
  a.sample_rate = 16000;
  a.samples.assign(8000, 0.0);
  const FeatureMatrix f = compute_mfcc(a, MfccConfig{});
  for (int t = 1; t < f.num_frames(); ++t)
    CHECK((f.data.row(t) - f.data.row(0)).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("mfcc is deterministic") {
  const AudioBuffer a = sine_tone(700.0, 0.5, 16000);
  const FeatureMatrix f1 = compute_mfcc(a, MfccConfig{});
  const FeatureMatrix f2 = compute_mfcc(a, MfccConfig{});
  CHECK((f1.data - f2.data).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("1 kHz tone: filterbank argmax contains 1 kHz; FFT path matches naive DFT") {
  const int sr = 16000, window = 400, nfft = 512;
  const AudioBuffer a = sine_tone(1000.0, 0.1, sr);
  const auto filters = build_mel_filterbank(24, sr, nfft);

  // one pre-emphasized, Hamming-windowed frame, exactly as compute_mfcc does
  std::vector<double> frame(a.samples.begin(), a.samples.begin() + window);
  for (int i = window - 1; i > 0; --i) frame[i] -= 0.97 * frame[i - 1];
  frame[0] -= 0.97 * frame[0];
  for (int i = 0; i < window; ++i)
    frame[i] *= 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (window - 1));

  const auto energies = mel_energies_of_frame(frame, filters, nfft);

  // independent DFT route
  const auto power = pk_test::naive_power_spectrum(frame, nfft);
  std::vector<double> oracle(filters.size(), 0.0);
  for (std::size_t m = 0; m < filters.size(); ++m)
    for (std::size_t i = 0; i < filters[m].weights.size(); ++i)
      oracle[m] += filters[m].weights[i] * power[filters[m].first_bin + i];

  int argmax = 0, oracle_argmax = 0;
  for (std::size_t m = 0; m < energies.size(); ++m) {
    if (energies[m] > energies[argmax]) argmax = static_cast<int>(m);
    if (oracle[m] > oracle[oracle_argmax]) oracle_argmax = static_cast<int>(m);
    CHECK(energies[m] == doctest::Approx(oracle[m]).epsilon(1e-9));
  }
  CHECK(argmax == oracle_argmax);
  CHECK(filters[argmax].left_hz < 1000.0);
  CHECK(filters[argmax].right_hz > 1000.0);
}

TEST_CASE("append_deltas: constants, ramps and single frames") {
  const int T = 20, D = 3;

  SUBCASE("constant sequence gives zero deltas and accelerations") {
    FeatureMatrix f;
    f.data = Eigen::MatrixXd::Constant(T, D, 2.5);
    const FeatureMatrix out = append_deltas(f, 2);
    CHECK(out.dim() == 3 * D);
    CHECK(out.data.rightCols(2 * D).lpNorm<Eigen::Infinity>() == 0.0);
  }

  SUBCASE("linear ramp has interior delta equal to the slope") {
    const double slope = 0.75;
    FeatureMatrix f;
    f.data.resize(T, 1);
    for (int t = 0; t < T; ++t) f.data(t, 0) = slope * t;
    const FeatureMatrix out = append_deltas(f, 2);
    for (int t = 2; t < T - 2; ++t)
      CHECK(out.data(t, 1) == doctest::Approx(slope).epsilon(1e-12));
    for (int t = 4; t < T - 4; ++t)
      CHECK(out.data(t, 2) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("single frame replicates edges, so deltas vanish") {
    FeatureMatrix f;
    f.data = Eigen::MatrixXd::Constant(1, D, 1.0);
    const FeatureMatrix out = append_deltas(f, 2);
    CHECK(out.num_frames() == 1);
    CHECK(out.data.rightCols(2 * D).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("apply_cmvn normalizes columns") {
  pk::Rng rng(99);
  FeatureMatrix f = pk_test::random_features(rng, 50, 4, 3.0);
  f.data.col(2).array() += 10.0;

  const FeatureMatrix out = apply_cmvn(f);
  const Eigen::RowVectorXd mean = out.data.colwise().mean();
  const Eigen::RowVectorXd var =
      (out.data.rowwise() - mean).array().square().colwise().mean();
  for (int d = 0; d < out.dim(); ++d) {
    CHECK(std::abs(mean[d]) < 1e-10);
    CHECK(var[d] == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("constant column becomes the zero column") {
    f.data.col(1).setConstant(7.0);
    const FeatureMatrix z = apply_cmvn(f);
    CHECK(z.data.col(1).lpNorm<Eigen::Infinity>() == 0.0);
  }

  SUBCASE("single frame degrades to mean-only normalization") {
    FeatureMatrix one;
    one.data = Eigen::MatrixXd::Constant(1, 3, 4.0);
    const FeatureMatrix z = apply_cmvn(one);
    CHECK(z.data.lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("silence prefix leaves non-boundary frames bit-identical (pre-CMVN)") {
  const AudioBuffer sig = sine_tone(600.0, 0.3, 16000);
  AudioBuffer padded;
  padded.sample_rate = 16000;
  padded.samples.assign(1600, 0.0);  // 10 full frame shifts of silence
  padded.samples.insert(padded.samples.end(), sig.samples.begin(), sig.samples.end());

  MfccConfig cfg;
  cfg.apply_cmvn = false;
  const FeatureMatrix a = compute_mfcc(sig, cfg);
  const FeatureMatrix b = compute_mfcc(padded, cfg);
  for (int t = 0; t < a.num_frames(); ++t)
    CHECK((a.data.row(t) - b.data.row(t + 10)).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("energy VAD drops silent frames") {
  AudioBuffer a = sine_tone(500.0, 0.5, 16000);
  a.samples.resize(2 * a.samples.size(), 1e-6);  // second half ~silence
  MfccConfig cfg;
  const FeatureMatrix f = compute_mfcc(a, cfg);
  const FeatureMatrix kept = drop_low_energy_frames(f, 30.0, cfg.num_mel_filters);
  CHECK(kept.num_frames() < f.num_frames());
  CHECK(kept.num_frames() >= f.num_frames() / 3);
}

TEST_CASE("PKFT feature files round-trip and reject corruption") {
  pk_test::TempDir tmp("pkft");
  pk::Rng rng(5);
  FeatureMatrix f = pk_test::random_features(rng, 17, 6);
  f = quantize_to_f32(f);
  f.frame_shift = 0.01;

  const std::string path = tmp.str() + "/x.pkft";
  write_features(path, f);
  const FeatureMatrix g = read_features(path);
  CHECK(g.num_frames() == 17);
  CHECK(g.dim() == 6);
  CHECK((f.data - g.data).lpNorm<Eigen::Infinity>() == 0.0);  // f32 values exact

  // a second write of the reloaded matrix is byte-identical
  const std::string path2 = tmp.str() + "/y.pkft";
  write_features(path2, g);
  CHECK(pk::read_text_file(path) == pk::read_text_file(path2));

  const std::string bad = tmp.str() + "/bad.pkft";
  pk::write_text_file(bad, "XXXXgarbage that is long enough to parse a header from");
  CHECK_THROWS_WITH_AS(read_features(bad), doctest::Contains("bad-magic"), Error);
}

TEST_CASE("extract_features produces 3x cepstra dims with CMVN applied") {
  const AudioBuffer a = sine_tone(800.0, 0.4, 16000);
  MfccConfig cfg;
  const FeatureMatrix f = extract_features(a, cfg);
  CHECK(f.dim() == 3 * cfg.num_cepstra);
  const Eigen::RowVectorXd mean = f.data.colwise().mean();
  CHECK(mean.lpNorm<Eigen::Infinity>() < 1e-9);
}

// phrasekit/mfcc.cpp

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

#include "phrasekit/mfcc.hpp"

#include <algorithm>
#include <cmath>

#include "phrasekit/common.hpp"

namespace pk {

namespace {

constexpr double kLogFloor = 1e-10;         // filterbank energy floor
constexpr double kCmvnVarianceFloor = 1e-8;

int next_power_of_two(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void validate(const MfccConfig& cfg) {
  PK_CHECK(cfg.window_length >= cfg.frame_shift, "bad-config",
           "window_length must be >= frame_shift");
  PK_CHECK(cfg.frame_shift > 0, "bad-config", "frame_shift must be positive");
  PK_CHECK(cfg.num_cepstra <= cfg.num_mel_filters, "bad-config",
           "num_cepstra must be <= num_mel_filters");
  PK_CHECK(cfg.num_cepstra >= 1 && cfg.num_mel_filters >= 1, "bad-config",
           "cepstra/filter counts must be positive");
  PK_CHECK(cfg.preemphasis >= 0.0 && cfg.preemphasis < 1.0, "bad-config",
           "preemphasis must be in [0, 1)");
  PK_CHECK(cfg.delta_window >= 1, "bad-config", "delta_window must be >= 1");
}

}  // namespace

double hz_to_mel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

std::vector<MelFilter> build_mel_filterbank(int num_filters, int sample_rate,
                                            int nfft) {
  const double nyquist = sample_rate / 2.0;
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(nyquist);
  std::vector<double> centers(num_filters + 2);
  for (int m = 0; m < num_filters + 2; ++m)
    centers[m] = mel_lo + (mel_hi - mel_lo) * m / (num_filters + 1);

  const int num_bins = nfft / 2 + 1;
  const double bin_width = static_cast<double>(sample_rate) / nfft;
  std::vector<MelFilter> filters(num_filters);
  for (int m = 0; m < num_filters; ++m) {
    const double left = centers[m], center = centers[m + 1], right = centers[m + 2];
    MelFilter& f = filters[m];
    f.left_hz = mel_to_hz(left);
    f.center_hz = mel_to_hz(center);
    f.right_hz = mel_to_hz(right);
    f.first_bin = -1;
    for (int k = 0; k < num_bins; ++k) {
      const double mel_k = hz_to_mel(k * bin_width);
      double w = 0.0;
      if (mel_k > left && mel_k < right) {
        w = mel_k <= center ? (mel_k - left) / (center - left)
                            : (right - mel_k) / (right - center);
      }
      if (w > 0.0) {
        if (f.first_bin < 0) f.first_bin = k;
        f.weights.push_back(w);
      } else if (f.first_bin >= 0) {
        break;  // triangles are contiguous in bin index
      }
    }
    if (f.first_bin < 0) {  // filter narrower than one bin
      f.first_bin = std::min<int>(
          num_bins - 1, static_cast<int>(std::round(f.center_hz / bin_width)));
      f.weights.assign(1, 1.0);
    }
  }
  return filters;
}

void fft_radix2(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  PK_CHECK(n && (n & (n - 1)) == 0, "bad-config", "FFT size must be a power of two");
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = x[i + k];
        const std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<double> mel_energies_of_frame(const std::vector<double>& frame,
                                          const std::vector<MelFilter>& filters,
                                          int nfft) {
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = {frame[i], 0.0};
  fft_radix2(buf);
  const int num_bins = nfft / 2 + 1;
  std::vector<double> power(num_bins);
  for (int k = 0; k < num_bins; ++k) power[k] = std::norm(buf[k]);

  std::vector<double> energies(filters.size());
  for (std::size_t m = 0; m < filters.size(); ++m) {
    const MelFilter& f = filters[m];
    double e = 0.0;
    for (std::size_t i = 0; i < f.weights.size(); ++i)
      e += f.weights[i] * power[f.first_bin + static_cast<int>(i)];
    energies[m] = e;
  }
  return energies;
}

FeatureMatrix compute_mfcc(const AudioBuffer& audio, const MfccConfig& cfg) {
  validate(cfg);
  PK_CHECK(audio.sample_rate > 0, "bad-audio", "sample_rate must be positive");
  const int window = static_cast<int>(std::lround(cfg.window_length * audio.sample_rate));
  const int shift = static_cast<int>(std::lround(cfg.frame_shift * audio.sample_rate));
  PK_CHECK(window >= 2 && shift >= 1, "bad-config", "window/shift too small for sample rate");
  const std::size_t n = audio.num_samples();
  PK_CHECK(n >= static_cast<std::size_t>(window), "audio-too-short",
           "need at least " << window << " samples for one window, got " << n);

  const int num_frames = static_cast<int>((n - window) / shift) + 1;
  const int nfft = next_power_of_two(window);
  const auto filters = build_mel_filterbank(cfg.num_mel_filters, audio.sample_rate, nfft);

  // Hamming window
  std::vector<double> ham(window);
  for (int i = 0; i < window; ++i)
    ham[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (window - 1));

  // Orthonormal DCT-II table: c_k = a_k * sum_m log_e(m) cos(pi k (m+0.5)/M)
  const int M = cfg.num_mel_filters;
  Eigen::MatrixXd dct(cfg.num_cepstra, M);
  for (int k = 0; k < cfg.num_cepstra; ++k) {
    const double a = k == 0 ? std::sqrt(1.0 / M) : std::sqrt(2.0 / M);
    for (int m = 0; m < M; ++m)
      dct(k, m) = a * std::cos(M_PI * k * (m + 0.5) / M);
  }

  FeatureMatrix out;
  out.frame_shift = cfg.frame_shift;
  out.data.resize(num_frames, cfg.num_cepstra);

  std::vector<double> frame(window);
  Eigen::VectorXd log_e(M);
  for (int t = 0; t < num_frames; ++t) {
    const std::size_t off = static_cast<std::size_t>(t) * shift;
    for (int i = 0; i < window; ++i) frame[i] = audio.samples[off + i];
    // pre-emphasis within the frame, so a frame depends only on its own samples
    for (int i = window - 1; i > 0; --i) frame[i] -= cfg.preemphasis * frame[i - 1];
    frame[0] -= cfg.preemphasis * frame[0];
    for (int i = 0; i < window; ++i) frame[i] *= ham[i];

    const auto energies = mel_energies_of_frame(frame, filters, nfft);
    for (int m = 0; m < M; ++m) log_e[m] = std::log(std::max(energies[m], kLogFloor));
    out.data.row(t) = (dct * log_e).transpose();
  }
  return out;
}

FeatureMatrix append_deltas(const FeatureMatrix& feat, int delta_window) {
  PK_CHECK(feat.num_frames() >= 1, "bad-shape", "empty feature matrix");
  PK_CHECK(delta_window >= 1, "bad-config", "delta_window must be >= 1");
  const int T = feat.num_frames(), D = feat.dim(), W = delta_window;
  double denom = 0.0;
  for (int k = 1; k <= W; ++k) denom += 2.0 * k * k;

  auto regress = [&](const Eigen::MatrixXd& src) {
    Eigen::MatrixXd d(T, src.cols());
    for (int t = 0; t < T; ++t) {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(src.cols());
      for (int k = 1; k <= W; ++k) {
        const int hi = std::min(t + k, T - 1);
        const int lo = std::max(t - k, 0);
        acc += k * (src.row(hi) - src.row(lo));
      }
      d.row(t) = acc / denom;
    }
    return d;
  };

  const Eigen::MatrixXd delta = regress(feat.data);
  const Eigen::MatrixXd accel = regress(delta);

  FeatureMatrix out;
  out.frame_shift = feat.frame_shift;
  out.data.resize(T, 3 * D);
  out.data.leftCols(D) = feat.data;
  out.data.middleCols(D, D) = delta;
  out.data.rightCols(D) = accel;
  return out;
}

FeatureMatrix apply_cmvn(const FeatureMatrix& feat) {
  const int T = feat.num_frames();
  PK_CHECK(T >= 1, "bad-shape", "empty feature matrix");
  if (T < 2) PK_WARN("apply_cmvn on a single frame: mean-only normalization");

  FeatureMatrix out;
  out.frame_shift = feat.frame_shift;
  const Eigen::RowVectorXd mean = feat.data.colwise().mean();
  Eigen::MatrixXd centered = feat.data.rowwise() - mean;
  const Eigen::RowVectorXd var = centered.array().square().colwise().mean();
  for (int d = 0; d < feat.dim(); ++d) {
    if (T >= 2 && var[d] >= kCmvnVarianceFloor)
      centered.col(d) /= std::sqrt(var[d]);
    // else mean-only for this dimension
  }
  out.data = std::move(centered);
  return out;
}

FeatureMatrix drop_low_energy_frames(const FeatureMatrix& feat, double threshold_db,
                                     int num_mel_filters) {
  const int T = feat.num_frames();
  PK_CHECK(T >= 1, "bad-shape", "empty feature matrix");
  // c0 (orthonormal DCT) = sqrt(1/M) * sum_m log_e(m); an energy drop of
  // x dB moves every log filterbank term by x*ln(10)/10.
  const double c0_per_db = std::sqrt(static_cast<double>(num_mel_filters)) * std::log(10.0) / 10.0;
  const double c0_max = feat.data.col(0).maxCoeff();
  const double cutoff = c0_max - threshold_db * c0_per_db;
  std::vector<int> keep;
  for (int t = 0; t < T; ++t)
    if (feat.data(t, 0) >= cutoff) keep.push_back(t);
  if (keep.empty()) keep.push_back(0);

  FeatureMatrix out;
  out.frame_shift = feat.frame_shift;
  out.data.resize(static_cast<int>(keep.size()), feat.dim());
  for (std::size_t i = 0; i < keep.size(); ++i) out.data.row(static_cast<int>(i)) = feat.data.row(keep[i]);
  return out;
}

FeatureMatrix extract_features(const AudioBuffer& audio, const MfccConfig& cfg) {
  FeatureMatrix feat = compute_mfcc(audio, cfg);
  if (cfg.vad) feat = drop_low_energy_frames(feat, cfg.vad_threshold_db, cfg.num_mel_filters);
  feat = append_deltas(feat, cfg.delta_window);
  if (cfg.apply_cmvn) feat = apply_cmvn(feat);
  return feat;
}

}  // namespace pk

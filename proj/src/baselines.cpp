// phrasekit/baselines.cpp

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

#include "phrasekit/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "phrasekit/common.hpp"

namespace pk {

DtwResult dtw_distance(const FeatureMatrix& a, const FeatureMatrix& b) {
  PK_CHECK(a.dim() == b.dim(), "dim-mismatch",
           "DTW inputs have dims " << a.dim() << " and " << b.dim());
  PK_CHECK(a.num_frames() >= 1 && b.num_frames() >= 1, "bad-shape",
           "DTW inputs must be non-empty");
  const int n = a.num_frames(), m = b.num_frames();

  Eigen::MatrixXd d(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      d(i, j) = (a.data.row(i) - b.data.row(j)).norm();

  // 0 = diag, 1 = from above (i-1, j), 2 = from left (i, j-1)
  Eigen::MatrixXd acc(n, m);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> from(n, m);
  acc(0, 0) = d(0, 0);
  for (int i = 1; i < n; ++i) {
    acc(i, 0) = acc(i - 1, 0) + d(i, 0);
    from(i, 0) = 1;
  }
  for (int j = 1; j < m; ++j) {
    acc(0, j) = acc(0, j - 1) + d(0, j);
    from(0, j) = 2;
  }
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < m; ++j) {
      double best = acc(i - 1, j - 1);
      std::uint8_t arg = 0;
      if (acc(i - 1, j) < best) {
        best = acc(i - 1, j);
        arg = 1;
      }
      if (acc(i, j - 1) < best) {
        best = acc(i, j - 1);
        arg = 2;
      }
      acc(i, j) = best + d(i, j);
      from(i, j) = arg;
    }
  }

  DtwResult res;
  res.cost = acc(n - 1, m - 1);
  int i = n - 1, j = m - 1;
  res.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    switch (from(i, j)) {
      case 0: --i; --j; break;
      case 1: --i; break;
      default: --j; break;
    }
    res.path.emplace_back(i, j);
  }
  std::reverse(res.path.begin(), res.path.end());
  res.path_length = static_cast<int>(res.path.size());
  return res;
}

double uv1_score(const DiagonalGmm& phrase_model, const DiagonalGmm& ubm,
                 const FeatureMatrix& features) {
  return avg_loglik(phrase_model, features) - avg_loglik(ubm, features);
}

double uv2_score(const GaussianInventory& inventory, const PhraseHmm& phrase_hmm,
                 const DiagonalGmm& ubm, const FeatureMatrix& features) {
  if (features.num_frames() < phrase_hmm.num_states()) return kRejectScore;
  const AlignmentPath path = viterbi_align(inventory, phrase_hmm, features);
  return path.log_likelihood / features.num_frames() - avg_loglik(ubm, features);
}

double uv3_score(const std::vector<FeatureMatrix>& enrollment,
                 const FeatureMatrix& test) {
  PK_CHECK(!enrollment.empty(), "empty-enrollment", "UV3 needs >= 1 template");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& tmpl : enrollment)
    best = std::min(best, dtw_distance(tmpl, test).normalized());
  return -best;
}

std::vector<double> fuse_scores(const std::vector<std::vector<double>>& per_system_scores,
                                const std::vector<double>& weights) {
  PK_CHECK(!per_system_scores.empty(), "bad-input", "no systems to fuse");
  const std::size_t n = per_system_scores[0].size();
  for (const auto& s : per_system_scores)
    PK_CHECK(s.size() == n, "length-mismatch", "fused systems differ in trial count");
  std::vector<double> w = weights;
  if (w.empty()) w.assign(per_system_scores.size(), 1.0 / per_system_scores.size());
  PK_CHECK(w.size() == per_system_scores.size(), "length-mismatch",
           "one weight per system required");

  std::vector<double> fused(n, 0.0);
  for (std::size_t s = 0; s < per_system_scores.size(); ++s)
    for (std::size_t i = 0; i < n; ++i) fused[i] += w[s] * per_system_scores[s][i];
  return fused;
}

std::vector<double> znorm(const std::vector<double>& scores, double mean, double stddev) {
  PK_CHECK(stddev > 0.0, "bad-config", "znorm stddev must be positive");
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - mean) / stddev;
  return out;
}

}  // namespace pk

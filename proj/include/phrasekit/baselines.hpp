// phrasekit/baselines.hpp

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

#ifndef PHRASEKIT_BASELINES_HPP
#define PHRASEKIT_BASELINES_HPP

#include <limits>
#include <vector>

#include "phrasekit/gmm.hpp"
#include "phrasekit/hmm.hpp"

namespace pk {

// Score reported for trials whose alignment is infeasible (too-short test
// utterance under a left-to-right model): an unconditional rejection.
constexpr double kRejectScore = -std::numeric_limits<double>::infinity();

struct DtwResult {
  double cost = 0.0;   // accumulated frame distances along the best path
  int path_length = 0; // number of path nodes
  std::vector<std::pair<int, int>> path;  // (i, j) nodes, start (0,0) to end
  double normalized() const { return cost / path_length; }
};

// Classic boundary-anchored dynamic programming with steps
// {(1,0),(0,1),(1,1)}, no slope weights; frame-to-frame distortion is the
// Euclidean distance.
DtwResult dtw_distance(const FeatureMatrix& a, const FeatureMatrix& b);

// UV1: average-log-likelihood ratio of a relevance-MAP adapted phrase model
// against the shared UBM.
double uv1_score(const DiagonalGmm& phrase_model, const DiagonalGmm& ubm,
                 const FeatureMatrix& features);

// UV2: per-frame Viterbi path log-likelihood of the phrase HMM minus the UBM
// average log-likelihood.  Infeasible alignments return kRejectScore.
double uv2_score(const GaussianInventory& inventory, const PhraseHmm& phrase_hmm,
                 const DiagonalGmm& ubm, const FeatureMatrix& features);

// UV3: negated minimum normalized DTW cost over the enrollment templates
// (higher = more similar, like every other scorer here).
double uv3_score(const std::vector<FeatureMatrix>& enrollment,
                 const FeatureMatrix& test);

// Equal-weight (or weighted) sum of per-system score lists.  Callers are
// responsible for z-normalizing each system's scores first; znorm below
// applies a caller-supplied development mean/stddev.
std::vector<double> fuse_scores(const std::vector<std::vector<double>>& per_system_scores,
                                const std::vector<double>& weights = {});

std::vector<double> znorm(const std::vector<double>& scores, double mean, double stddev);

}  // namespace pk

#endif  // PHRASEKIT_BASELINES_HPP

// phrasekit/hmm.hpp

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

#ifndef PHRASEKIT_HMM_HPP
#define PHRASEKIT_HMM_HPP

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phrasekit/feature_matrix.hpp"
#include "phrasekit/gmm.hpp"

namespace pk {

// One pool of Gaussians shared by all HMM states of all phones.  Component
// indices are globally unique: an i-vector model built on top of HMM
// alignment sees a single phrase-independent component inventory.
struct GaussianInventory {
  Eigen::MatrixXd means;      // G x F
  Eigen::MatrixXd variances;  // G x F

  int size() const { return static_cast<int>(means.rows()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

// A state's emission GMM: indices into the shared inventory plus weights
// (weights sum to 1).
struct StateGmm {
  std::vector<int> component_ids;
  Eigen::VectorXd weights;
};

struct HmmState {
  StateGmm gmm;
  double self_loop = 0.5;  // forward probability is 1 - self_loop
};

struct Monophone {
  std::string name;
  std::vector<HmmState> states;
};

struct MonophoneSet {
  GaussianInventory inventory;
  std::vector<Monophone> phones;

  int find_phone(const std::string& name) const;  // -1 when absent
};

// Strict left-to-right chain, no skips: a frame either stays in its state or
// advances to the next one.  Frame 0 occupies state 0; the last frame must
// occupy the last state.
struct PhraseHmm {
  std::vector<HmmState> states;

  int num_states() const { return static_cast<int>(states.size()); }
};

struct AlignmentPath {
  std::vector<int> states;  // per frame, non-decreasing, unit increments
  // Per frame: (global component id, within-state responsibility) for the
  // aligned state's components.
  std::vector<std::vector<std::pair<int, double>>> responsibilities;
  double log_likelihood = 0.0;  // emission + transition score of the path
};

// Emission log-likelihood of every frame under every state (logsumexp over
// the state's weighted components), shape T x S.
Eigen::MatrixXd state_log_likelihoods(const GaussianInventory& inventory,
                                      const std::vector<HmmState>& states,
                                      const FeatureMatrix& features);

// Concatenates the phones' state chains; shared component indices are
// preserved (composition never creates Gaussians).  Unknown phone ->
// "unknown-phone".
PhraseHmm compose_phrase_hmm(const MonophoneSet& mono,
                             const std::vector<std::string>& phone_sequence);

// Maximum-likelihood monotone alignment (Viterbi), log domain throughout.
// Needs num_frames >= num_states ("align-infeasible").
AlignmentPath viterbi_align(const GaussianInventory& inventory,
                            const PhraseHmm& hmm, const FeatureMatrix& features);

// Recomputes the log-likelihood of an explicit state path (emissions +
// transitions); used to cross-check the DP score.
double path_log_likelihood(const GaussianInventory& inventory, const PhraseHmm& hmm,
                           const FeatureMatrix& features,
                           const std::vector<int>& path);

// Flat-start Viterbi training of 3-state (configurable) monophones with
// comps_per_state Gaussians per state.  Alternates Viterbi alignment with
// hard-assignment GMM re-estimation; transition probabilities use add-one
// smoothing with a 1e-3 floor.  ll_history receives the total Viterbi path
// log-likelihood per iteration (non-decreasing within 1e-6 relative).
// Preconditions: every transcript phone occurs >= 3 times in the corpus;
// every utterance is at least as long as its composed state count.
MonophoneSet train_monophones(const std::vector<FeatureMatrix>& features,
                              const std::vector<std::vector<std::string>>& transcripts,
                              int num_states, int comps_per_state, int iters,
                              std::vector<double>* ll_history = nullptr);

// UV2 phrase model: a left-to-right HMM whose per-state GMMs are
// relevance-MAP adapted copies of the shared UBM.  States start from a
// uniform segmentation; each iteration re-adapts states from the current
// alignment, re-estimates transitions from path counts (add-one smoothing),
// and re-aligns.  Returned as a MonophoneSet holding a single "phone" named
// `phrase_name` so the PKHM container and composition path are reused.
MonophoneSet train_uv2_model(const DiagonalGmm& ubm,
                             const std::vector<FeatureMatrix>& features,
                             int num_states, double relevance_factor, int iters,
                             const std::string& phrase_name,
                             std::vector<double>* ll_history = nullptr);

// PKHM model file, little-endian: magic, u32 version=1, u32 F, u32 G,
// inventory means/variances (f64), u32 num_phones, then per phone: name,
// u32 num_states, per state: f64 self_loop, u32 num_comps,
// (u32 component_id, f64 weight)*.
void write_monophone_set(const std::string& path, const MonophoneSet& mono);
MonophoneSet read_monophone_set(const std::string& path);

// Debug dump: one "frame_index state_index" line per frame.
void write_alignment(const std::string& path, const AlignmentPath& alignment);

}  // namespace pk

#endif  // PHRASEKIT_HMM_HPP

// phrasekit/ivector.hpp

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

#ifndef PHRASEKIT_IVECTOR_HPP
#define PHRASEKIT_IVECTOR_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phrasekit/gmm.hpp"
#include "phrasekit/hmm.hpp"

namespace pk {

// Zeroth/first-order statistics of one utterance against a component
// inventory.  First-order sums are stored centered around the inventory
// means: F_c = sum_t gamma_tc (x_t - m_c).
struct SufficientStats {
  Eigen::VectorXd zeroth;  // C, nonnegative; sums to the frame count
  Eigen::MatrixXd first;   // C x F

  int num_components() const { return static_cast<int>(zeroth.size()); }
  int dim() const { return static_cast<int>(first.cols()); }
};

// Soft alignment by UBM frame posteriors.
SufficientStats collect_stats_gmm(const DiagonalGmm& ubm,
                                  const FeatureMatrix& features);

// Viterbi alignment to the phrase HMM; each frame is distributed over the
// aligned state's components by within-state responsibilities, accumulated
// into the monophone set's global component inventory, so the stats layout
// is phrase independent.
SufficientStats collect_stats_hmm(const MonophoneSet& mono, const PhraseHmm& phrase_hmm,
                                  const FeatureMatrix& features);

// Low-rank model of mean-supervector offsets: component c is shifted by
// T_c w for a latent w ~ N(0, I).
struct TotalVariabilityModel {
  Eigen::MatrixXd T;      // (C*F) x R, component row blocks in order
  Eigen::MatrixXd sigma;  // C x F diagonal covariances from the alignment model

  int num_components() const { return static_cast<int>(sigma.rows()); }
  int dim() const { return static_cast<int>(sigma.cols()); }
  int rank() const { return static_cast<int>(T.cols()); }
};

enum class AlignmentSource { kGmm, kHmm };

struct IVector {
  Eigen::VectorXd w;
  AlignmentSource alignment = AlignmentSource::kGmm;
  std::string feature_tag;
};

// Posterior precision L = I + sum_c N_c T_c' Sigma_c^-1 T_c of the latent
// variable given the stats.
Eigen::MatrixXd posterior_precision(const TotalVariabilityModel& tv,
                                    const SufficientStats& stats);

// MAP point estimate (posterior mean) w = L^-1 sum_c T_c' Sigma_c^-1 F_c.
// Empty stats or T = 0 give exactly the zero vector (the prior mean).
IVector extract_ivector(const TotalVariabilityModel& tv, const SufficientStats& stats,
                        AlignmentSource alignment = AlignmentSource::kGmm,
                        const std::string& feature_tag = "");

// EM estimation of T.  Initialization is deterministic pseudo-random
// (mt19937_64(seed), Box-Muller) scaled by 0.1*sqrt(mean variance).  If
// objective_history is given it receives, per iteration, the T-dependent part
// of the marginal log-likelihood 0.5*sum_u (b' L^-1 b - logdet L), which EM
// never decreases (1e-6 relative).  Singular M-step normal equations are
// solved with a 1e-8 ridge and logged; components with no occupancy anywhere
// keep their current rows (so all-empty stats leave T at its initialization).
// Requires at least `rank` utterances.
TotalVariabilityModel train_tv(const std::vector<SufficientStats>& stats,
                               const Eigen::MatrixXd& sigma, int rank, int iters,
                               std::uint64_t seed,
                               std::vector<double>* objective_history = nullptr);

// PKST stats file: magic, u32 version=1, u32 C, u32 F, N (C f64),
// first-order matrix (C*F f64 row-major).
void write_stats(const std::string& path, const SufficientStats& stats);
SufficientStats read_stats(const std::string& path);

// PKTV model file: magic, u32 version=1, u32 C, u32 F, u32 R,
// T ((C*F)*R f64 row-major).  Sigma is not stored; it is re-attached from
// the alignment model (UBM or monophone set) at load time.
void write_tv(const std::string& path, const TotalVariabilityModel& tv);
TotalVariabilityModel read_tv(const std::string& path, const Eigen::MatrixXd& sigma);

// PKIV archive: magic, u32 version=1, u32 R, u32 count, then per record a
// length-prefixed utterance id + R f64.
struct IvectorArchive {
  int rank = 0;
  std::vector<std::pair<std::string, Eigen::VectorXd>> entries;

  const Eigen::VectorXd* find(const std::string& utt_id) const;
};

void write_ivector_archive(const std::string& path, const IvectorArchive& archive);
IvectorArchive read_ivector_archive(const std::string& path);

}  // namespace pk

#endif  // PHRASEKIT_IVECTOR_HPP

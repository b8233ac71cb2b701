// phrasekit/gmm.hpp

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

#ifndef PHRASEKIT_GMM_HPP
#define PHRASEKIT_GMM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phrasekit/feature_matrix.hpp"

namespace pk {

// Diagonal-covariance GMM.  Weights form a simplex; variances are floored
// strictly above zero, so every log-domain quantity stays finite.
struct DiagonalGmm {
  Eigen::VectorXd weights;    // C
  Eigen::MatrixXd means;      // C x F
  Eigen::MatrixXd variances;  // C x F

  int num_components() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

// Per-frame posteriors over components (rows sum to 1).
using Responsibilities = Eigen::MatrixXd;

// log p(x_t, c) = log w_c + log N(x_t | m_c, diag v_c), shape T x C.
Eigen::MatrixXd component_log_likelihoods(const DiagonalGmm& gmm,
                                          const FeatureMatrix& features);

// Softmax over components in the log domain (log-sum-exp).
Responsibilities frame_posteriors(const DiagonalGmm& gmm,
                                  const FeatureMatrix& features);

// Mean over frames of log p(x_t | gmm).
double avg_loglik(const DiagonalGmm& gmm, const FeatureMatrix& features);

// Expected sufficient statistics of one utterance under the current model.
// Combinable by addition across utterances (map-reduce contract).
struct GmmAccumulator {
  Eigen::VectorXd gamma;   // C: posterior counts
  Eigen::MatrixXd x;       // C x F: posterior-weighted feature sums
  Eigen::MatrixXd x2;      // C x F: posterior-weighted squared sums
  double loglik = 0.0;     // total log-likelihood of accumulated frames
  std::int64_t frames = 0;

  GmmAccumulator() = default;
  GmmAccumulator(int num_components, int dim);
  GmmAccumulator& operator+=(const GmmAccumulator& other);
};

GmmAccumulator accumulate_gmm_stats(const DiagonalGmm& gmm,
                                    const FeatureMatrix& features);

// EM training with deterministic binary-splitting initialization from the
// global Gaussian (children at mean +- 0.1 sigma).  Components emptied during
// EM are re-split from the heaviest component.  If ll_history is given, it
// receives the total log-likelihood observed at each E-step of the final
// fixed-size EM phase (a non-decreasing sequence up to 1e-8 relative).
// Requires total frames >= 10 * num_components ("insufficient-data").
DiagonalGmm train_ubm(const std::vector<FeatureMatrix>& features,
                      int num_components, int em_iters, std::uint64_t seed,
                      std::vector<double>* ll_history = nullptr);

// Relevance-MAP adaptation of the means only:
//   m_c <- (sum_t gamma_tc x_t + r m_c^ubm) / (n_c + r).
// Weights and variances are copied from the UBM.  Components with no
// occupancy stay at the UBM mean.
DiagonalGmm map_adapt_means(const DiagonalGmm& ubm, const FeatureMatrix& features,
                            double relevance_factor);

// PKGM model file, little-endian: magic, u32 version=1, u32 C, u32 F,
// weights (C f64), means (C*F f64 row-major), variances (C*F f64).
void write_gmm(const std::string& path, const DiagonalGmm& gmm);
DiagonalGmm read_gmm(const std::string& path);

// Normalized exponentials of a log-weight vector, computed stably.
Eigen::VectorXd softmax_from_log(const Eigen::VectorXd& logs);

double logsumexp(const Eigen::VectorXd& logs);

// log N(x_t | m_g, diag v_g) for every frame/Gaussian pair, shape T x G.
// No mixture weights involved; shared by the HMM state emissions and the
// i-vector statistics paths.
Eigen::MatrixXd gaussian_log_densities(const Eigen::MatrixXd& means,
                                       const Eigen::MatrixXd& variances,
                                       const Eigen::MatrixXd& frames);

}  // namespace pk

#endif  // PHRASEKIT_GMM_HPP

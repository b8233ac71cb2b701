// phrasekit/scoring.hpp

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

#ifndef PHRASEKIT_SCORING_HPP
#define PHRASEKIT_SCORING_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pk {

enum class ScoreNorm { kNone, kMaxNorm, kPosterior };

// Per-class scores of one test vector plus the normalization applied.
struct ScoreVector {
  Eigen::VectorXd scores;
  ScoreNorm norm = ScoreNorm::kNone;
};

// Class means, the shared within-class covariance, and the counts behind
// them.  Built by estimate_within_class_cov; consumed by LgcModel either
// whole (same-dataset estimation) or covariance-only (phrase-independent
// covariance estimated on a different dataset).
struct WithinClassStats {
  std::vector<std::string> labels;  // K, file order
  Eigen::MatrixXd means;            // K x R
  Eigen::MatrixXd covariance;       // R x R, regularized SPD
  Eigen::VectorXd counts;           // K
  double lambda_used = 0.0;         // shrinkage actually applied
};

// Class means are per-class averages; the covariance pools deviations over
// all classes and divides by the total sample count N (not N - K), then is
// shrunk: Sigma <- (1-lambda) Sigma + lambda diag(Sigma) + eps*s*I with
// eps = 1e-6 and s = tr(Sigma)/R (or 1 when the scatter is all zero).  When
// the scatter cannot be full rank (N - K < R) and lambda is below 0.1, the
// shrinkage is forced to 0.1 and logged.
WithinClassStats estimate_within_class_cov(
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& labeled_ivectors,
    double shrinkage);

class LgcModel {
 public:
  // Means and covariance from the same data.
  static LgcModel fit(
      const std::vector<std::pair<std::string, Eigen::VectorXd>>& labeled_ivectors,
      double shrinkage);
  // Means from `labeled_ivectors`, covariance supplied externally.
  static LgcModel fit_with_covariance(
      const std::vector<std::pair<std::string, Eigen::VectorXd>>& labeled_ivectors,
      const Eigen::MatrixXd& covariance);

  // Eq.-style posterior P(i|w) with equal priors unless set otherwise,
  // computed via log densities and log-sum-exp.  Needs K >= 2.
  ScoreVector posteriors(const Eigen::VectorXd& w) const;

  // log N(w | m_i, Sigma) per class (up to no constant: exact log densities).
  Eigen::VectorXd log_densities(const Eigen::VectorXd& w) const;

  void set_priors(const Eigen::VectorXd& priors);

  int num_classes() const { return static_cast<int>(labels_.size()); }
  int dim() const { return static_cast<int>(means_.cols()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& means() const { return means_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const Eigen::VectorXd& priors() const { return priors_; }

  // PKLG file: magic, u32 version=1, u32 K, u32 R, labels (length-prefixed,
  // file order), priors (K f64), means (K*R f64), covariance (R*R f64).
  void save(const std::string& path) const;
  static LgcModel load(const std::string& path);

 private:
  LgcModel() = default;
  void finalize();  // factorization + log-determinant of the covariance

  std::vector<std::string> labels_;
  Eigen::MatrixXd means_;
  Eigen::MatrixXd covariance_;
  Eigen::VectorXd priors_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
};

class CosineModel {
 public:
  // Class means are plain averages of enrollment i-vectors; a zero-vector
  // mean is an enrollment error.
  static CosineModel fit(
      const std::vector<std::pair<std::string, Eigen::VectorXd>>& labeled_ivectors);

  // score_i = <w, m_i> / (|w| |m_i|); w must be nonzero.
  ScoreVector scores(const Eigen::VectorXd& w) const;

  int num_classes() const { return static_cast<int>(labels_.size()); }
  int dim() const { return static_cast<int>(means_.cols()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& means() const { return means_; }

  // PKCS file: magic, u32 version=1, u32 K, u32 R, labels, means (K*R f64).
  void save(const std::string& path) const;
  static CosineModel load(const std::string& path);

 private:
  CosineModel() = default;
  std::vector<std::string> labels_;
  Eigen::MatrixXd means_;
};

// out_i = s_i - max_{j != i} s_j.  Input must be un-normalized and K >= 2.
ScoreVector max_norm(const ScoreVector& scores);

// Argmax; ties broken toward the lowest class index.
int classify(const ScoreVector& scores);

}  // namespace pk

#endif  // PHRASEKIT_SCORING_HPP

// phrasekit/scoring.cpp

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

#include "phrasekit/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "phrasekit/common.hpp"
#include "phrasekit/gmm.hpp"
#include "phrasekit/io_util.hpp"

namespace pk {

namespace {

constexpr double kEps = 1e-6;        // identity regularizer scale
constexpr double kForcedLambda = 0.1;

// Groups samples by label in first-appearance order.
struct Grouped {
  std::vector<std::string> labels;
  std::vector<std::vector<const Eigen::VectorXd*>> samples;
};

Grouped group_by_label(
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& data) {
  PK_CHECK(!data.empty(), "insufficient-data", "no enrollment i-vectors");
  Grouped g;
  std::map<std::string, int> index;
  const int dim = static_cast<int>(data[0].second.size());
  for (const auto& [label, w] : data) {
    PK_CHECK(w.size() == dim, "dim-mismatch", "inconsistent i-vector dims");
    auto it = index.find(label);
    if (it == index.end()) {
      index[label] = static_cast<int>(g.labels.size());
      g.labels.push_back(label);
      g.samples.emplace_back();
      it = index.find(label);
    }
    g.samples[it->second].push_back(&w);
  }
  return g;
}

}  // namespace

WithinClassStats estimate_within_class_cov(
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& labeled_ivectors,
    double shrinkage) {
  PK_CHECK(shrinkage >= 0.0 && shrinkage <= 1.0, "bad-config",
           "shrinkage must be in [0, 1]");
  const Grouped g = group_by_label(labeled_ivectors);
  const int K = static_cast<int>(g.labels.size());
  const int R = static_cast<int>(labeled_ivectors[0].second.size());
  const int N = static_cast<int>(labeled_ivectors.size());

  WithinClassStats out;
  out.labels = g.labels;
  out.means.resize(K, R);
  out.counts.resize(K);

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(R, R);
  for (int i = 0; i < K; ++i) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(R);
    for (const auto* w : g.samples[i]) mean += *w;
    mean /= static_cast<double>(g.samples[i].size());
    out.means.row(i) = mean.transpose();
    out.counts[i] = static_cast<double>(g.samples[i].size());
    for (const auto* w : g.samples[i]) {
      const Eigen::VectorXd d = *w - mean;
      scatter.noalias() += d * d.transpose();
    }
  }
  Eigen::MatrixXd cov = scatter / static_cast<double>(N);  // divide by N, not N-K

  double lambda = shrinkage;
  if (N - K < R && lambda < kForcedLambda) {
    PK_WARN("within-class scatter has rank at most " << N - K << " < " << R
            << "; forcing shrinkage to " << kForcedLambda);
    lambda = kForcedLambda;
  }
  const double trace = cov.trace();
  const double scale = trace > 0.0 ? trace / R : 1.0;
  Eigen::MatrixXd reg = (1.0 - lambda) * cov;
  reg += lambda * cov.diagonal().asDiagonal();
  reg += kEps * scale * Eigen::MatrixXd::Identity(R, R);
  // exact symmetry after the arithmetic above
  out.covariance = 0.5 * (reg + reg.transpose());
  out.lambda_used = lambda;
  return out;
}

void LgcModel::finalize() {
  const int R = dim();
  PK_CHECK(covariance_.rows() == R && covariance_.cols() == R, "dim-mismatch",
           "covariance shape mismatch");
  llt_.compute(covariance_);
  PK_CHECK(llt_.info() == Eigen::Success, "numerical",
           "within-class covariance is not positive definite after regularization");
  log_det_ = 0.0;
  for (int r = 0; r < R; ++r) log_det_ += 2.0 * std::log(llt_.matrixL()(r, r));
  if (priors_.size() != num_classes())
    priors_ = Eigen::VectorXd::Constant(num_classes(), 1.0 / num_classes());
}

LgcModel LgcModel::fit(
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& labeled_ivectors,
    double shrinkage) {
  const WithinClassStats st = estimate_within_class_cov(labeled_ivectors, shrinkage);
  LgcModel m;
  m.labels_ = st.labels;
  m.means_ = st.means;
  m.covariance_ = st.covariance;
  m.finalize();
  return m;
}

LgcModel LgcModel::fit_with_covariance(
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& labeled_ivectors,
    const Eigen::MatrixXd& covariance) {
  const Grouped g = group_by_label(labeled_ivectors);
  LgcModel m;
  m.labels_ = g.labels;
  const int K = static_cast<int>(g.labels.size());
  const int R = static_cast<int>(labeled_ivectors[0].second.size());
  m.means_.resize(K, R);
  for (int i = 0; i < K; ++i) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(R);
    for (const auto* w : g.samples[i]) mean += *w;
    m.means_.row(i) = (mean / static_cast<double>(g.samples[i].size())).transpose();
  }
  m.covariance_ = covariance;
  m.finalize();
  return m;
}

Eigen::VectorXd LgcModel::log_densities(const Eigen::VectorXd& w) const {
  PK_CHECK(w.size() == dim(), "dim-mismatch", "test vector dimension mismatch");
  PK_CHECK(w.allFinite(), "bad-input", "non-finite test vector");
  const int K = num_classes(), R = dim();
  Eigen::VectorXd out(K);
  const double constant = -0.5 * (R * std::log(2.0 * M_PI) + log_det_);
  for (int i = 0; i < K; ++i) {
    const Eigen::VectorXd d = w - means_.row(i).transpose();
    out[i] = constant - 0.5 * d.dot(llt_.solve(d));
  }
  return out;
}

ScoreVector LgcModel::posteriors(const Eigen::VectorXd& w) const {
  PK_CHECK(num_classes() >= 2, "bad-config", "posteriors need K >= 2 classes");
  Eigen::VectorXd logp = log_densities(w);
  logp += priors_.array().max(1e-300).log().matrix();
  ScoreVector sv;
  sv.norm = ScoreNorm::kPosterior;
  sv.scores = softmax_from_log(logp);
  return sv;
}

void LgcModel::set_priors(const Eigen::VectorXd& priors) {
  PK_CHECK(priors.size() == num_classes(), "dim-mismatch", "priors size mismatch");
  PK_CHECK((priors.array() >= 0).all() && priors.sum() > 0, "bad-config",
           "priors must be nonnegative and not all zero");
  priors_ = priors / priors.sum();
}

static const char kLgcMagic[4] = {'P', 'K', 'L', 'G'};
static const char kCosMagic[4] = {'P', 'K', 'C', 'S'};
static const std::uint32_t kVersion = 1;

void LgcModel::save(const std::string& path) const {
  BinaryWriter w(path);
  w.write_magic(kLgcMagic);
  w.write_u32(kVersion);
  w.write_u32(static_cast<std::uint32_t>(num_classes()));
  w.write_u32(static_cast<std::uint32_t>(dim()));
  for (const auto& l : labels_) w.write_string(l);
  w.write_f64_array(priors_.data(), priors_.size());
  for (int i = 0; i < num_classes(); ++i)
    for (int r = 0; r < dim(); ++r) w.write_f64(means_(i, r));
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) w.write_f64(covariance_(i, j));
  w.close();
}

LgcModel LgcModel::load(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic(kLgcMagic);
  r.expect_version(kVersion);
  const std::uint32_t K = r.read_u32();
  const std::uint32_t R = r.read_u32();
  LgcModel m;
  for (std::uint32_t i = 0; i < K; ++i) m.labels_.push_back(r.read_string());
  m.priors_.resize(K);
  r.read_f64_array(m.priors_.data(), K);
  m.means_.resize(K, R);
  for (std::uint32_t i = 0; i < K; ++i)
    for (std::uint32_t j = 0; j < R; ++j) m.means_(i, j) = r.read_f64();
  m.covariance_.resize(R, R);
  for (std::uint32_t i = 0; i < R; ++i)
    for (std::uint32_t j = 0; j < R; ++j) m.covariance_(i, j) = r.read_f64();
  m.finalize();
  return m;
}

CosineModel CosineModel::fit(
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& labeled_ivectors) {
  const Grouped g = group_by_label(labeled_ivectors);
  CosineModel m;
  m.labels_ = g.labels;
  const int K = static_cast<int>(g.labels.size());
  const int R = static_cast<int>(labeled_ivectors[0].second.size());
  m.means_.resize(K, R);
  for (int i = 0; i < K; ++i) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(R);
    for (const auto* w : g.samples[i]) mean += *w;
    mean /= static_cast<double>(g.samples[i].size());
    PK_CHECK(mean.norm() > 0.0, "zero-vector",
             "class '" << g.labels[i] << "' has a zero mean i-vector");
    m.means_.row(i) = mean.transpose();
  }
  return m;
}

ScoreVector CosineModel::scores(const Eigen::VectorXd& w) const {
  PK_CHECK(w.size() == dim(), "dim-mismatch", "test vector dimension mismatch");
  const double wn = w.norm();
  PK_CHECK(wn > 0.0, "zero-vector", "zero test i-vector");
  ScoreVector sv;
  sv.norm = ScoreNorm::kNone;
  sv.scores.resize(num_classes());
  for (int i = 0; i < num_classes(); ++i)
    sv.scores[i] = means_.row(i).dot(w) / (means_.row(i).norm() * wn);
  return sv;
}

void CosineModel::save(const std::string& path) const {
  BinaryWriter w(path);
  w.write_magic(kCosMagic);
  w.write_u32(kVersion);
  w.write_u32(static_cast<std::uint32_t>(num_classes()));
  w.write_u32(static_cast<std::uint32_t>(dim()));
  for (const auto& l : labels_) w.write_string(l);
  for (int i = 0; i < num_classes(); ++i)
    for (int r = 0; r < dim(); ++r) w.write_f64(means_(i, r));
  w.close();
}

CosineModel CosineModel::load(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic(kCosMagic);
  r.expect_version(kVersion);
  const std::uint32_t K = r.read_u32();
  const std::uint32_t R = r.read_u32();
  CosineModel m;
  for (std::uint32_t i = 0; i < K; ++i) m.labels_.push_back(r.read_string());
  m.means_.resize(K, R);
  for (std::uint32_t i = 0; i < K; ++i)
    for (std::uint32_t j = 0; j < R; ++j) m.means_(i, j) = r.read_f64();
  return m;
}

ScoreVector max_norm(const ScoreVector& scores) {
  PK_CHECK(scores.norm == ScoreNorm::kNone, "bad-input",
           "max_norm expects un-normalized scores");
  const int K = static_cast<int>(scores.scores.size());
  PK_CHECK(K >= 2, "bad-config", "max_norm needs K >= 2");
  ScoreVector out;
  out.norm = ScoreNorm::kMaxNorm;
  out.scores.resize(K);
  for (int i = 0; i < K; ++i) {
    double best_other = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < K; ++j)
      if (j != i) best_other = std::max(best_other, scores.scores[j]);
    out.scores[i] = scores.scores[i] - best_other;
  }
  return out;
}

int classify(const ScoreVector& scores) {
  PK_CHECK(scores.scores.size() >= 1, "bad-input", "empty score vector");
  int best = 0;
  for (int i = 1; i < scores.scores.size(); ++i)
    if (scores.scores[i] > scores.scores[best]) best = i;
  return best;
}

}  // namespace pk

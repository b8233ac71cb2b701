// phrasekit/gmm.cpp

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

#include "phrasekit/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phrasekit/common.hpp"
#include "phrasekit/io_util.hpp"
#include "phrasekit/parallel.hpp"

namespace pk {

namespace {

constexpr double kVarianceFloorScale = 1e-4;  // x global per-dim variance
constexpr double kVarianceFloorAbs = 1e-10;
constexpr double kEmptyComponentCount = 1e-3;  // occupancy below this is "empty"

void check_dims(const DiagonalGmm& gmm, const FeatureMatrix& features) {
  PK_CHECK(gmm.dim() == features.dim(), "dim-mismatch",
           "model dim " << gmm.dim() << " vs feature dim " << features.dim());
}

}  // namespace

double logsumexp(const Eigen::VectorXd& logs) {
  const double m = logs.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf
  return m + std::log((logs.array() - m).exp().sum());
}

Eigen::VectorXd softmax_from_log(const Eigen::VectorXd& logs) {
  const double lse = logsumexp(logs);
  return (logs.array() - lse).exp();
}

Eigen::MatrixXd gaussian_log_densities(const Eigen::MatrixXd& means,
                                       const Eigen::MatrixXd& variances,
                                       const Eigen::MatrixXd& frames) {
  PK_CHECK(means.cols() == frames.cols() && variances.cols() == frames.cols(),
           "dim-mismatch", "Gaussian dim " << means.cols() << " vs feature dim "
                                           << frames.cols());
  const int G = static_cast<int>(means.rows());
  const int F = static_cast<int>(means.cols());
  // logN = -0.5*(F log 2pi + sum log v) - 0.5*(x'Ax - 2x'(Am) + m'Am), A = diag(1/v)
  const Eigen::MatrixXd inv_var = variances.array().inverse();        // G x F
  const Eigen::MatrixXd mean_iv = means.array() * inv_var.array();    // G x F
  Eigen::VectorXd comp_const(G);
  for (int g = 0; g < G; ++g) {
    comp_const[g] = -0.5 * (F * std::log(2.0 * M_PI) +
                            variances.row(g).array().log().sum() +
                            mean_iv.row(g).dot(means.row(g)));
  }
  Eigen::MatrixXd ll = frames * mean_iv.transpose();                  // T x G
  ll.noalias() -= 0.5 * (frames.array().square().matrix() * inv_var.transpose());
  ll.rowwise() += comp_const.transpose();
  return ll;
}

Eigen::MatrixXd component_log_likelihoods(const DiagonalGmm& gmm,
                                          const FeatureMatrix& features) {
  check_dims(gmm, features);
  Eigen::MatrixXd ll = gaussian_log_densities(gmm.means, gmm.variances, features.data);
  Eigen::RowVectorXd log_w = gmm.weights.array().max(1e-300).log().transpose();
  ll.rowwise() += log_w;
  return ll;
}

Responsibilities frame_posteriors(const DiagonalGmm& gmm,
                                  const FeatureMatrix& features) {
  Eigen::MatrixXd ll = component_log_likelihoods(gmm, features);
  for (int t = 0; t < ll.rows(); ++t) {
    const double lse = logsumexp(ll.row(t));
    ll.row(t) = (ll.row(t).array() - lse).exp();
  }
  return ll;
}

double avg_loglik(const DiagonalGmm& gmm, const FeatureMatrix& features) {
  const Eigen::MatrixXd ll = component_log_likelihoods(gmm, features);
  double total = 0.0;
  for (int t = 0; t < ll.rows(); ++t) total += logsumexp(ll.row(t));
  return total / ll.rows();
}

GmmAccumulator::GmmAccumulator(int num_components, int dim)
    : gamma(Eigen::VectorXd::Zero(num_components)),
      x(Eigen::MatrixXd::Zero(num_components, dim)),
      x2(Eigen::MatrixXd::Zero(num_components, dim)) {}

GmmAccumulator& GmmAccumulator::operator+=(const GmmAccumulator& other) {
  if (gamma.size() == 0) {
    *this = other;
    return *this;
  }
  PK_CHECK(gamma.size() == other.gamma.size() && x.cols() == other.x.cols(),
           "dim-mismatch", "accumulator shapes differ");
  gamma += other.gamma;
  x += other.x;
  x2 += other.x2;
  loglik += other.loglik;
  frames += other.frames;
  return *this;
}

GmmAccumulator accumulate_gmm_stats(const DiagonalGmm& gmm,
                                    const FeatureMatrix& features) {
  Eigen::MatrixXd ll = component_log_likelihoods(gmm, features);
  GmmAccumulator acc(gmm.num_components(), gmm.dim());
  acc.frames = features.num_frames();
  for (int t = 0; t < ll.rows(); ++t) {
    const double lse = logsumexp(ll.row(t));
    acc.loglik += lse;
    ll.row(t) = (ll.row(t).array() - lse).exp();
  }
  acc.gamma = ll.colwise().sum();
  acc.x.noalias() = ll.transpose() * features.data;
  acc.x2.noalias() = ll.transpose() * features.data.array().square().matrix();
  return acc;
}

namespace {

GmmAccumulator accumulate_corpus(const DiagonalGmm& gmm,
                                 const std::vector<FeatureMatrix>& features) {
  std::vector<GmmAccumulator> per_utt(features.size());
  parallel_for(features.size(), [&](std::size_t i) {
    per_utt[i] = accumulate_gmm_stats(gmm, features[i]);
  });
  GmmAccumulator total(gmm.num_components(), gmm.dim());
  for (const auto& a : per_utt) total += a;  // fixed order: deterministic
  return total;
}

void split_component(DiagonalGmm* gmm, int c) {
  const int C = gmm->num_components(), F = gmm->dim();
  DiagonalGmm out;
  out.weights.resize(C + 1);
  out.means.resize(C + 1, F);
  out.variances.resize(C + 1, F);
  out.weights.head(C) = gmm->weights;
  out.means.topRows(C) = gmm->means;
  out.variances.topRows(C) = gmm->variances;
  const Eigen::RowVectorXd sigma = gmm->variances.row(c).array().sqrt();
  out.means.row(c) = gmm->means.row(c) + 0.1 * sigma;
  out.means.row(C) = gmm->means.row(c) - 0.1 * sigma;
  out.variances.row(C) = gmm->variances.row(c);
  out.weights[c] = gmm->weights[c] / 2.0;
  out.weights[C] = out.weights[c];
  *gmm = std::move(out);
}

// One EM iteration; returns the total log-likelihood seen at the E-step
// (i.e. the objective of the model passed in).
double em_iteration(DiagonalGmm* gmm, const std::vector<FeatureMatrix>& features,
                    const Eigen::RowVectorXd& var_floor) {
  GmmAccumulator acc = accumulate_corpus(*gmm, features);

  const double total_gamma = acc.gamma.sum();
  std::vector<int> empty;
  for (int c = 0; c < gmm->num_components(); ++c) {
    const double n = acc.gamma[c];
    if (n < kEmptyComponentCount) {
      empty.push_back(c);
      continue;
    }
    const Eigen::RowVectorXd mean = acc.x.row(c) / n;
    Eigen::RowVectorXd var = acc.x2.row(c) / n - mean.array().square().matrix();
    var = var.cwiseMax(var_floor);
    gmm->means.row(c) = mean;
    gmm->variances.row(c) = var;
    gmm->weights[c] = n / total_gamma;
  }

  // Components that lost all occupancy are re-split from the heaviest one
  // (after its own M-step update, so the perturbation survives).
  for (int c : empty) {
    int heaviest;
    gmm->weights.maxCoeff(&heaviest);
    PK_LOG("empty component " << c << " re-split from component " << heaviest);
    const Eigen::RowVectorXd sigma = gmm->variances.row(heaviest).array().sqrt();
    gmm->means.row(c) = gmm->means.row(heaviest) + 0.1 * sigma;
    gmm->means.row(heaviest) -= 0.1 * sigma;
    gmm->variances.row(c) = gmm->variances.row(heaviest);
    gmm->weights[c] = gmm->weights[heaviest] / 2.0;
    gmm->weights[heaviest] = gmm->weights[c];
  }
  gmm->weights /= gmm->weights.sum();
  return acc.loglik;
}

}  // namespace

DiagonalGmm train_ubm(const std::vector<FeatureMatrix>& features,
                      int num_components, int em_iters, std::uint64_t seed,
                      std::vector<double>* ll_history) {
  PK_CHECK(num_components >= 1, "bad-config", "num_components must be >= 1");
  PK_CHECK(!features.empty(), "insufficient-data", "no training features");
  (void)seed;  // splitting is fully deterministic; kept for interface stability

  const int F = features[0].dim();
  std::int64_t total_frames = 0;
  for (const auto& f : features) {
    PK_CHECK(f.dim() == F, "dim-mismatch", "inconsistent feature dims");
    total_frames += f.num_frames();
  }
  PK_CHECK(total_frames >= 10LL * num_components, "insufficient-data",
           total_frames << " frames for " << num_components
                        << " components (need >= 10x)");

  // Global Gaussian.
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(F);
  Eigen::RowVectorXd sum2 = Eigen::RowVectorXd::Zero(F);
  for (const auto& f : features) {
    sum += f.data.colwise().sum();
    sum2 += f.data.array().square().matrix().colwise().sum();
  }
  const Eigen::RowVectorXd global_mean = sum / total_frames;
  Eigen::RowVectorXd global_var =
      sum2 / total_frames - global_mean.array().square().matrix();
  const Eigen::RowVectorXd var_floor =
      (kVarianceFloorScale * global_var.array()).max(kVarianceFloorAbs).matrix();
  global_var = global_var.cwiseMax(var_floor);

  DiagonalGmm gmm;
  gmm.weights = Eigen::VectorXd::Ones(1);
  gmm.means = global_mean;
  gmm.variances = global_var;

  const int split_em_iters = 3;
  while (gmm.num_components() < num_components) {
    const int want = std::min(gmm.num_components(), num_components - gmm.num_components());
    // Split the `want` heaviest components.
    std::vector<int> order(gmm.num_components());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return gmm.weights[a] > gmm.weights[b];
    });
    for (int i = 0; i < want; ++i) split_component(&gmm, order[i]);
    for (int i = 0; i < split_em_iters; ++i) em_iteration(&gmm, features, var_floor);
  }

  if (ll_history) ll_history->clear();
  for (int i = 0; i < em_iters; ++i) {
    const double ll = em_iteration(&gmm, features, var_floor);
    if (ll_history) ll_history->push_back(ll);
  }
  return gmm;
}

DiagonalGmm map_adapt_means(const DiagonalGmm& ubm, const FeatureMatrix& features,
                            double relevance_factor) {
  PK_CHECK(relevance_factor >= 0.0, "bad-config", "relevance factor must be >= 0");
  const Responsibilities gamma = frame_posteriors(ubm, features);
  const Eigen::VectorXd n = gamma.colwise().sum();
  const Eigen::MatrixXd gx = gamma.transpose() * features.data;  // C x F

  DiagonalGmm adapted = ubm;
  for (int c = 0; c < ubm.num_components(); ++c) {
    const double denom = n[c] + relevance_factor;
    if (denom <= 0.0) continue;  // r = 0 and no occupancy: stay at the UBM mean
    adapted.means.row(c) =
        (gx.row(c) + relevance_factor * ubm.means.row(c)) / denom;
  }
  return adapted;
}

static const char kGmmMagic[4] = {'P', 'K', 'G', 'M'};
static const std::uint32_t kGmmVersion = 1;

void write_gmm(const std::string& path, const DiagonalGmm& gmm) {
  PK_CHECK(gmm.num_components() >= 1, "bad-shape", "empty model");
  BinaryWriter w(path);
  w.write_magic(kGmmMagic);
  w.write_u32(kGmmVersion);
  w.write_u32(static_cast<std::uint32_t>(gmm.num_components()));
  w.write_u32(static_cast<std::uint32_t>(gmm.dim()));
  w.write_f64_array(gmm.weights.data(), gmm.weights.size());
  // Eigen default storage is column-major; write explicit row-major.
  for (int c = 0; c < gmm.num_components(); ++c)
    for (int f = 0; f < gmm.dim(); ++f) w.write_f64(gmm.means(c, f));
  for (int c = 0; c < gmm.num_components(); ++c)
    for (int f = 0; f < gmm.dim(); ++f) w.write_f64(gmm.variances(c, f));
  w.close();
}

DiagonalGmm read_gmm(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic(kGmmMagic);
  r.expect_version(kGmmVersion);
  const std::uint32_t C = r.read_u32();
  const std::uint32_t F = r.read_u32();
  PK_CHECK(C >= 1 && F >= 1, "bad-shape", path << ": empty model");
  DiagonalGmm gmm;
  gmm.weights.resize(C);
  gmm.means.resize(C, F);
  gmm.variances.resize(C, F);
  r.read_f64_array(gmm.weights.data(), C);
  for (std::uint32_t c = 0; c < C; ++c)
    for (std::uint32_t f = 0; f < F; ++f) gmm.means(c, f) = r.read_f64();
  for (std::uint32_t c = 0; c < C; ++c)
    for (std::uint32_t f = 0; f < F; ++f) gmm.variances(c, f) = r.read_f64();
  PK_CHECK(std::abs(gmm.weights.sum() - 1.0) < 1e-6, "bad-format",
           path << ": weights do not sum to 1");
  PK_CHECK((gmm.variances.array() > 0).all(), "bad-format",
           path << ": non-positive variance");
  return gmm;
}

}  // namespace pk

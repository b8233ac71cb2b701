// phrasekit/tests/oracles.cpp

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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pk_test {

std::vector<double> naive_power_spectrum(const std::vector<double>& frame, int nfft) {
  const int num_bins = nfft / 2 + 1;
  std::vector<double> power(num_bins, 0.0);
  for (int k = 0; k < num_bins; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < frame.size(); ++n) {
      const double ang = -2.0 * M_PI * k * static_cast<double>(n) / nfft;
      re += frame[n] * std::cos(ang);
      im += frame[n] * std::sin(ang);
    }
    power[k] = re * re + im * im;
  }
  return power;
}

namespace {

void dtw_walk(const Eigen::MatrixXd& d, int i, int j, double cost, double* best) {
  cost += d(i, j);
  if (cost >= *best) return;  // paths only add cost
  if (i == d.rows() - 1 && j == d.cols() - 1) {
    *best = cost;
    return;
  }
  if (i + 1 < d.rows()) dtw_walk(d, i + 1, j, cost, best);
  if (j + 1 < d.cols()) dtw_walk(d, i, j + 1, cost, best);
  if (i + 1 < d.rows() && j + 1 < d.cols()) dtw_walk(d, i + 1, j + 1, cost, best);
}

}  // namespace

double dtw_brute_force(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.rows(); ++j) d(i, j) = (a.row(i) - b.row(j)).norm();
  double best = std::numeric_limits<double>::infinity();
  dtw_walk(d, 0, 0, 0.0, &best);
  return best;
}

namespace {

void viterbi_walk(const Eigen::MatrixXd& emissions, const std::vector<double>& log_self,
                  const std::vector<double>& log_fwd, int t, int s, double ll,
                  std::vector<int>* path, double* best_ll, std::vector<int>* best_path) {
  ll += emissions(t, s);
  (*path)[t] = s;
  const int T = static_cast<int>(emissions.rows());
  const int S = static_cast<int>(emissions.cols());
  if (t == T - 1) {
    if (s == S - 1 && ll > *best_ll) {
      *best_ll = ll;
      if (best_path) *best_path = *path;
    }
    return;
  }
  viterbi_walk(emissions, log_self, log_fwd, t + 1, s, ll + log_self[s], path, best_ll,
               best_path);
  if (s + 1 < S)
    viterbi_walk(emissions, log_self, log_fwd, t + 1, s + 1, ll + log_fwd[s], path,
                 best_ll, best_path);
}

}  // namespace

double viterbi_brute_force(const Eigen::MatrixXd& emissions,
                           const std::vector<double>& self_loop,
                           std::vector<int>* best_path) {
  const int T = static_cast<int>(emissions.rows());
  std::vector<double> log_self(self_loop.size()), log_fwd(self_loop.size());
  for (std::size_t s = 0; s < self_loop.size(); ++s) {
    log_self[s] = std::log(self_loop[s]);
    log_fwd[s] = std::log(1.0 - self_loop[s]);
  }
  std::vector<int> path(T);
  double best_ll = -std::numeric_limits<double>::infinity();
  viterbi_walk(emissions, log_self, log_fwd, 0, 0, 0.0, &path, &best_ll, best_path);
  return best_ll;
}

double eer_sweep_oracle(const std::vector<double>& target_scores,
                        const std::vector<double>& nontarget_scores) {
  std::vector<double> thresholds;
  thresholds.insert(thresholds.end(), target_scores.begin(), target_scores.end());
  thresholds.insert(thresholds.end(), nontarget_scores.begin(), nontarget_scores.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  double prev_far = 1.0, prev_miss = 0.0;
  auto cross = [&](double far0, double miss0, double far1, double miss1) {
    const double d0 = far0 - miss0;
    const double d1 = far1 - miss1;
    if (d0 <= 0.0) return 0.5 * (far0 + miss0);
    const double t = d0 / (d0 - d1);
    return far0 + t * (far1 - far0);
  };
  for (double th : thresholds) {
    int misses = 0, fas = 0;
    for (double s : target_scores)
      if (s < th) ++misses;
    for (double s : nontarget_scores)
      if (s >= th) ++fas;
    const double miss = static_cast<double>(misses) / target_scores.size();
    const double far = static_cast<double>(fas) / nontarget_scores.size();
    if (miss >= far) return cross(prev_far, prev_miss, far, miss);
    prev_far = far;
    prev_miss = miss;
  }
  return cross(prev_far, prev_miss, 0.0, 1.0);
}

double dense_gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                             const Eigen::MatrixXd& cov) {
  const int d = static_cast<int>(x.size());
  const Eigen::MatrixXd inv = cov.inverse();
  const double det = cov.determinant();
  const Eigen::VectorXd diff = x - mean;
  return -0.5 * (d * std::log(2.0 * M_PI) + std::log(det) + diff.dot(inv * diff));
}

Eigen::VectorXd nelder_mead_maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x0, double step,
                                     int iters) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> simplex(n + 1, x0);
  for (int i = 0; i < n; ++i) simplex[i + 1][i] += step;
  std::vector<double> value(n + 1);
  for (int i = 0; i <= n; ++i) value[i] = f(simplex[i]);

  for (int it = 0; it < iters; ++it) {
    // sort descending by value (maximization)
    std::vector<int> order(n + 1);
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return value[a] > value[b]; });
    std::vector<Eigen::VectorXd> sx(n + 1);
    std::vector<double> sv(n + 1);
    for (int i = 0; i <= n; ++i) {
      sx[i] = simplex[order[i]];
      sv[i] = value[order[i]];
    }
    simplex = sx;
    value = sv;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= n;

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[n]);
    const double fr = f(reflected);
    if (fr > value[0]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[n]);
      const double fe = f(expanded);
      if (fe > fr) {
        simplex[n] = expanded;
        value[n] = fe;
      } else {
        simplex[n] = reflected;
        value[n] = fr;
      }
    } else if (fr > value[n - 1]) {
      simplex[n] = reflected;
      value[n] = fr;
    } else {
      const Eigen::VectorXd contracted = centroid + 0.5 * (simplex[n] - centroid);
      const double fc = f(contracted);
      if (fc > value[n]) {
        simplex[n] = contracted;
        value[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          value[i] = f(simplex[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (value[i] > value[best]) best = i;
  return simplex[best];
}

}  // namespace pk_test

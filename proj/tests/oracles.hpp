// phrasekit/tests/oracles.hpp

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

// Test-only reference implementations, kept deliberately independent of the
// library's computation paths: plain loops, exhaustive enumeration, explicit
// inverses and derivative-free search.  They are the expected-value source
// for the DERIVED examples and the acceptance suite.

#ifndef PHRASEKIT_TESTS_ORACLES_HPP
#define PHRASEKIT_TESTS_ORACLES_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace pk_test {

// O(N^2) DFT power spectrum of a (zero-padded) real frame.
std::vector<double> naive_power_spectrum(const std::vector<double>& frame, int nfft);

// Exhaustive enumeration of every boundary-anchored monotone DTW path with
// steps {(1,0),(0,1),(1,1)}; returns the minimum summed node cost.
double dtw_brute_force(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Exhaustive enumeration of every monotone unit-step state path from state 0
// (frame 0) to the last state (last frame).  emissions is T x S;
// self_loop[s] is the stay probability of state s.  Returns the best path
// log-likelihood and (through best_path, when non-null) the argmax path.
double viterbi_brute_force(const Eigen::MatrixXd& emissions,
                           const std::vector<double>& self_loop,
                           std::vector<int>* best_path = nullptr);

// O(n^2) threshold sweep with direct counting at every candidate threshold;
// rates interpolated linearly at the miss/false-accept crossing.
double eer_sweep_oracle(const std::vector<double>& target_scores,
                        const std::vector<double>& nontarget_scores);

// Dense multivariate Gaussian log-density via explicit inverse/determinant.
double dense_gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                             const Eigen::MatrixXd& cov);

// Derivative-free Nelder-Mead maximization.
Eigen::VectorXd nelder_mead_maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x0, double step,
                                     int iters);

}  // namespace pk_test

#endif  // PHRASEKIT_TESTS_ORACLES_HPP

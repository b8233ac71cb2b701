// phrasekit/tests/test_ivector.cpp

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

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "phrasekit/common.hpp"
#include "phrasekit/io_util.hpp"
#include "phrasekit/ivector.hpp"
#include "test_util.hpp"

using namespace pk;

namespace {

DiagonalGmm random_ubm(pk::Rng& rng, int C, int F) {
  DiagonalGmm g;
  g.weights.resize(C);
  for (int c = 0; c < C; ++c) g.weights[c] = 0.3 + rng.uniform();
  g.weights /= g.weights.sum();
  g.means = pk_test::random_matrix(rng, C, F, 2.0);
  g.variances.resize(C, F);
  for (int c = 0; c < C; ++c)
    for (int f = 0; f < F; ++f) g.variances(c, f) = 0.4 + rng.uniform();
  return g;
}

SufficientStats random_stats(pk::Rng& rng, int C, int F, double frames = 40.0) {
  SufficientStats s;
  s.zeroth.resize(C);
  for (int c = 0; c < C; ++c) s.zeroth[c] = frames * (0.1 + rng.uniform());
  s.first = pk_test::random_matrix(rng, C, F, 3.0);
  return s;
}

TotalVariabilityModel random_tv(pk::Rng& rng, int C, int F, int R) {
  TotalVariabilityModel tv;
  tv.sigma.resize(C, F);
  for (int c = 0; c < C; ++c)
    for (int f = 0; f < F; ++f) tv.sigma(c, f) = 0.4 + rng.uniform();
  tv.T = pk_test::random_matrix(rng, C * F, R, 0.5);
  return tv;
}

}  // namespace

TEST_CASE("collect_stats_gmm") {
  pk::Rng rng(81);

  SUBCASE("single component: N is the frame count and F is the centered sum") {
    const DiagonalGmm g = random_ubm(rng, 1, 3);
    const FeatureMatrix f = pk_test::random_features(rng, 25, 3);
    const SufficientStats s = collect_stats_gmm(g, f);
    CHECK(s.zeroth[0] == doctest::Approx(25.0).epsilon(1e-12));
    const Eigen::RowVectorXd expected =
        f.data.colwise().sum() - 25.0 * g.means.row(0);
    CHECK((s.first.row(0) - expected).lpNorm<Eigen::Infinity>() < 1e-9);
  }

  SUBCASE("frames exactly at far-separated component means center to ~zero") {
    DiagonalGmm g;
    g.weights = Eigen::VectorXd::Constant(2, 0.5);
    g.means.resize(2, 2);
    g.means << -20, -20, 20, 20;
    g.variances = Eigen::MatrixXd::Ones(2, 2);
    FeatureMatrix f;
    f.data.resize(4, 2);
    f.data << -20, -20, -20, -20, 20, 20, 20, 20;
    const SufficientStats s = collect_stats_gmm(g, f);
    CHECK(s.first.lpNorm<Eigen::Infinity>() < 1e-8);
  }

  SUBCASE("matches the direct double-loop oracle") {
    const DiagonalGmm g = random_ubm(rng, 3, 2);
    const FeatureMatrix f = pk_test::random_features(rng, 12, 2);
    const SufficientStats s = collect_stats_gmm(g, f);
    const Responsibilities gamma = frame_posteriors(g, f);
    for (int c = 0; c < 3; ++c) {
      double n = 0.0;
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(2);
      for (int t = 0; t < f.num_frames(); ++t) {
        n += gamma(t, c);
        acc += gamma(t, c) * (f.data.row(t) - g.means.row(c));
      }
      CHECK(s.zeroth[c] == doctest::Approx(n).epsilon(1e-10));
      CHECK((s.first.row(c) - acc).lpNorm<Eigen::Infinity>() < 1e-10);
    }
    CHECK(s.zeroth.sum() == doctest::Approx(f.num_frames()).epsilon(1e-6));
  }
}

TEST_CASE("collect_stats_hmm") {
  pk::Rng rng(83);

  SUBCASE("single-state single-component HMM equals C=1 GMM stats") {
    DiagonalGmm g = random_ubm(rng, 1, 2);
    g.weights[0] = 1.0;
    MonophoneSet mono;
    mono.inventory.means = g.means;
    mono.inventory.variances = g.variances;
    Monophone ph;
    ph.name = "a";
    HmmState st;
    st.self_loop = 0.5;
    st.gmm.component_ids = {0};
    st.gmm.weights = Eigen::VectorXd::Ones(1);
    ph.states.push_back(st);
    mono.phones.push_back(ph);

    const FeatureMatrix f = pk_test::random_features(rng, 15, 2);
    const SufficientStats a = collect_stats_hmm(mono, compose_phrase_hmm(mono, {"a"}), f);
    const SufficientStats b = collect_stats_gmm(g, f);
    CHECK((a.zeroth - b.zeroth).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((a.first - b.first).lpNorm<Eigen::Infinity>() < 1e-10);
  }

  SUBCASE("staircase-forcing emissions put counts in the aligned states") {
    MonophoneSet mono;
    mono.inventory.means.resize(2, 1);
    mono.inventory.means << -5.0, 5.0;
    mono.inventory.variances = Eigen::MatrixXd::Ones(2, 1);
    Monophone ph;
    ph.name = "p";
    for (int s = 0; s < 2; ++s) {
      HmmState st;
      st.self_loop = 0.5;
      st.gmm.component_ids = {s};
      st.gmm.weights = Eigen::VectorXd::Ones(1);
      ph.states.push_back(st);
    }
    mono.phones.push_back(ph);

    FeatureMatrix f;
    f.data.resize(10, 1);
    for (int t = 0; t < 6; ++t) f.data(t, 0) = -5.0;
    for (int t = 6; t < 10; ++t) f.data(t, 0) = 5.0;
    const SufficientStats s = collect_stats_hmm(mono, compose_phrase_hmm(mono, {"p"}), f);
    CHECK(s.zeroth[0] == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(s.zeroth[1] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(s.zeroth.sum() == doctest::Approx(10.0).epsilon(1e-6));
  }
}

TEST_CASE("extract_ivector") {
  pk::Rng rng(87);

  SUBCASE("empty stats give exactly the zero vector (prior mean)") {
    const TotalVariabilityModel tv = random_tv(rng, 3, 2, 4);
    SufficientStats s;
    s.zeroth = Eigen::VectorXd::Zero(3);
    s.first = Eigen::MatrixXd::Zero(3, 2);
    const IVector w = extract_ivector(tv, s);
    CHECK(w.w.lpNorm<Eigen::Infinity>() == 0.0);
  }

  SUBCASE("a zero T matrix gives exactly the zero vector") {
    TotalVariabilityModel tv = random_tv(rng, 3, 2, 4);
    tv.T.setZero();
    const SufficientStats s = random_stats(rng, 3, 2);
    const IVector w = extract_ivector(tv, s);
    CHECK(w.w.lpNorm<Eigen::Infinity>() == 0.0);
  }

  SUBCASE("matches derivative-free maximization of the exact posterior") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      pk::Rng r2(900 + seed);
      const int C = 4, F = 3, R = 2;
      const TotalVariabilityModel tv = random_tv(r2, C, F, R);
      const SufficientStats s = random_stats(r2, C, F);

      // independent construction of the posterior log-density over w
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(R, R);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(R);
      for (int c = 0; c < C; ++c)
        for (int f = 0; f < F; ++f) {
          const Eigen::RowVectorXd trow = tv.T.row(c * F + f);
          M += s.zeroth[c] * trow.transpose() * trow / tv.sigma(c, f);
          b += trow.transpose() * s.first(c, f) / tv.sigma(c, f);
        }
      auto posterior = [&](const Eigen::VectorXd& w) {
        return -0.5 * w.dot(w) + b.dot(w) - 0.5 * w.dot(M * w);
      };
      const Eigen::VectorXd argmax = pk_test::nelder_mead_maximize(
          posterior, Eigen::VectorXd::Zero(R), 0.5, 400);

      const IVector got = extract_ivector(tv, s);
      for (int r = 0; r < R; ++r) CHECK(std::abs(got.w[r] - argmax[r]) < 1e-4);
    }
  }

  SUBCASE("layout mismatch is an error") {
    const TotalVariabilityModel tv = random_tv(rng, 3, 2, 4);
    const SufficientStats s = random_stats(rng, 4, 2);
    CHECK_THROWS_WITH_AS(extract_ivector(tv, s), doctest::Contains("layout-mismatch"),
                         Error);
  }
}

TEST_CASE("extraction is linear in the first-order stats for fixed N") {
  pk::Rng rng(91);
  const TotalVariabilityModel tv = random_tv(rng, 3, 2, 3);
  SufficientStats s1 = random_stats(rng, 3, 2);
  SufficientStats s2 = s1;
  s2.first = pk_test::random_matrix(rng, 3, 2, 2.0);
  SufficientStats sum = s1;
  sum.first = s1.first + s2.first;
  const Eigen::VectorXd w = extract_ivector(tv, sum).w;
  const Eigen::VectorXd w1 = extract_ivector(tv, s1).w;
  const Eigen::VectorXd w2 = extract_ivector(tv, s2).w;
  CHECK((w - (w1 + w2)).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("posterior precision tightens as counts grow") {
  pk::Rng rng(93);
  const TotalVariabilityModel tv = random_tv(rng, 4, 3, 3);
  SufficientStats s = random_stats(rng, 4, 3);
  const Eigen::MatrixXd L1 = posterior_precision(tv, s);
  s.zeroth *= 2.0;
  const Eigen::MatrixXd L2 = posterior_precision(tv, s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(L1), e2(L2);
  CHECK(e2.eigenvalues().minCoeff() >= e1.eigenvalues().minCoeff() - 1e-12);
  CHECK(e2.eigenvalues().minCoeff() >= 1.0 - 1e-12);  // never below the prior
}

TEST_CASE("train_tv") {
  SUBCASE("recovers a one-factor loading up to sign within 10%") {
    // moderate per-utterance evidence: plain EM (no minimum-divergence step)
    // converges slowly when N t^2 / sigma^2 is very large
    pk::Rng rng(95);
    const double t_true = 1.5, sigma2 = 4.0;
    const int num_utts = 500, frames = 4;
    std::vector<SufficientStats> stats;
    for (int u = 0; u < num_utts; ++u) {
      const double w = rng.normal();
      double sum = 0.0;
      for (int i = 0; i < frames; ++i)
        sum += t_true * w + std::sqrt(sigma2) * rng.normal();
      SufficientStats s;
      s.zeroth = Eigen::VectorXd::Constant(1, frames);
      s.first = Eigen::MatrixXd::Constant(1, 1, sum);
      stats.push_back(std::move(s));
    }
    const Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(1, 1, sigma2);
    const TotalVariabilityModel tv = train_tv(stats, sigma, 1, 100, 4);
    CHECK(std::abs(tv.T(0, 0)) == doctest::Approx(t_true).epsilon(0.10));
  }

  SUBCASE("EM objective is non-decreasing on random stats") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      pk::Rng rng(970 + seed);
      const int C = 3, F = 2, R = 2;
      Eigen::MatrixXd sigma(C, F);
      for (int c = 0; c < C; ++c)
        for (int f = 0; f < F; ++f) sigma(c, f) = 0.4 + rng.uniform();
      std::vector<SufficientStats> stats;
      for (int u = 0; u < 12; ++u) stats.push_back(random_stats(rng, C, F));
      std::vector<double> objective;
      train_tv(stats, sigma, R, 8, seed, &objective);
      REQUIRE(objective.size() == 8);
      for (std::size_t i = 1; i < objective.size(); ++i)
        CHECK(objective[i] >= objective[i - 1] - 1e-6 * std::abs(objective[i - 1]));
    }
  }

  SUBCASE("all-zero stats leave T at its initialization") {
    pk::Rng rng(99);
    const int C = 2, F = 2, R = 2;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Ones(C, F);
    std::vector<SufficientStats> stats(4);
    for (auto& s : stats) {
      s.zeroth = Eigen::VectorXd::Zero(C);
      s.first = Eigen::MatrixXd::Zero(C, F);
    }
    const TotalVariabilityModel a = train_tv(stats, sigma, R, 5, 42);
    const TotalVariabilityModel b = train_tv(stats, sigma, R, 1, 42);
    CHECK((a.T - b.T).lpNorm<Eigen::Infinity>() == 0.0);
    // and the posterior under such stats is the prior
    CHECK(extract_ivector(a, stats[0]).w.lpNorm<Eigen::Infinity>() == 0.0);
  }

  SUBCASE("needs at least rank utterances") {
    pk::Rng rng(101);
    std::vector<SufficientStats> stats{random_stats(rng, 2, 2)};
    const Eigen::MatrixXd sigma = Eigen::MatrixXd::Ones(2, 2);
    CHECK_THROWS_WITH_AS(train_tv(stats, sigma, 2, 3, 0),
                         doctest::Contains("insufficient-data"), Error);
  }
}

TEST_CASE("stats, TV and archive files round-trip bit-exactly") {
  pk_test::TempDir tmp("ivio");
  pk::Rng rng(103);

  const SufficientStats s = random_stats(rng, 3, 2);
  write_stats(tmp.str() + "/s.pkst", s);
  const SufficientStats s2 = read_stats(tmp.str() + "/s.pkst");
  CHECK((s.zeroth - s2.zeroth).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((s.first - s2.first).lpNorm<Eigen::Infinity>() == 0.0);
  write_stats(tmp.str() + "/s2.pkst", s2);
  CHECK(pk::read_text_file(tmp.str() + "/s.pkst") ==
        pk::read_text_file(tmp.str() + "/s2.pkst"));

  const TotalVariabilityModel tv = random_tv(rng, 3, 2, 4);
  write_tv(tmp.str() + "/t.pktv", tv);
  const TotalVariabilityModel tv2 = read_tv(tmp.str() + "/t.pktv", tv.sigma);
  CHECK((tv.T - tv2.T).lpNorm<Eigen::Infinity>() == 0.0);

  IvectorArchive archive;
  archive.rank = 3;
  archive.entries = {{"utt1", Eigen::VectorXd::Constant(3, 1.25)},
                     {"utt2", Eigen::VectorXd::Constant(3, -0.5)}};
  write_ivector_archive(tmp.str() + "/a.pkiv", archive);
  const IvectorArchive back = read_ivector_archive(tmp.str() + "/a.pkiv");
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[0].first == "utt1");
  CHECK((back.entries[1].second - archive.entries[1].second).lpNorm<Eigen::Infinity>() ==
        0.0);
  CHECK(back.find("utt2") != nullptr);
  CHECK(back.find("nope") == nullptr);

  pk::write_text_file(tmp.str() + "/bad", "AAAAbbbbccccddddeeee");
  CHECK_THROWS_WITH_AS(read_stats(tmp.str() + "/bad"), doctest::Contains("bad-magic"),
                       Error);
  CHECK_THROWS_WITH_AS(read_ivector_archive(tmp.str() + "/bad"),
                       doctest::Contains("bad-magic"), Error);
}

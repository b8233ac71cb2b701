// phrasekit/tests/test_eval.cpp

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
#include "phrasekit/eval.hpp"
#include "test_util.hpp"

using namespace pk;

TEST_CASE("make_trials") {
  SUBCASE("one target plus K-1 nontargets per utterance") {
    std::vector<std::string> phrases;
    for (int k = 0; k < 10; ++k) phrases.push_back("p" + std::to_string(k));
    std::vector<std::pair<std::string, std::string>> utts;
    for (int u = 0; u < 100; ++u)
      utts.emplace_back("u" + std::to_string(u), phrases[u % 10]);

    const std::vector<Trial> trials = make_trials(utts, phrases);
    CHECK(trials.size() == 1000);  // |utterances| x K
    int targets = 0, nontargets = 0;
    for (const auto& t : trials) (t.target ? targets : nontargets)++;
    CHECK(targets == 100);
    CHECK(nontargets == 900);
  }

  SUBCASE("K = 30 gives 29 nontargets per utterance") {
    std::vector<std::string> phrases;
    for (int k = 0; k < 30; ++k) phrases.push_back("p" + std::to_string(k));
    const std::vector<Trial> trials = make_trials({{"u0", "p7"}}, phrases);
    CHECK(trials.size() == 30);
    int nontargets = 0;
    for (const auto& t : trials)
      if (!t.target) ++nontargets;
    CHECK(nontargets == 29);
  }

  SUBCASE("K = 1 gives a single target and no nontargets") {
    const std::vector<Trial> trials = make_trials({{"u0", "p0"}}, {"p0"});
    CHECK(trials.size() == 1);
    CHECK(trials[0].target);
  }

  SUBCASE("an unenrolled true phrase is an error") {
    CHECK_THROWS_WITH_AS(make_trials({{"u0", "other"}}, {"p0"}),
                         doctest::Contains("unenrolled-phrase"), Error);
  }
}

TEST_CASE("compute_eer") {
  SUBCASE("perfect separation gives zero") {
    CHECK(compute_eer_from_scores({0.9, 0.8}, {0.2, 0.1}) == doctest::Approx(0.0));
  }

  SUBCASE("identical score multisets give one half") {
    const std::vector<double> s{0.1, 0.4, 0.7, 0.9};
    CHECK(compute_eer_from_scores(s, s) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(pk_test::eer_sweep_oracle(s, s) == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("seven-trial fixture matches the sweep oracle") {
    const std::vector<double> tar{0.9, 0.8, 0.3};
    const std::vector<double> non{0.7, 0.4, 0.2, 0.1};
    const double oracle = pk_test::eer_sweep_oracle(tar, non);
    CHECK(compute_eer_from_scores(tar, non) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(oracle == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  }

  SUBCASE("agrees with the O(n^2) sweep oracle on random score sets") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      pk::Rng rng(2000 + seed);
      const int nt = 2 + static_cast<int>(rng.uniform_int(40));
      const int nn = 2 + static_cast<int>(rng.uniform_int(40));
      std::vector<double> tar(nt), non(nn);
      for (auto& s : tar) s = rng.normal() + 0.5;
      for (auto& s : non) s = rng.normal() - 0.5;
      const double got = compute_eer_from_scores(tar, non);
      const double oracle = pk_test::eer_sweep_oracle(tar, non);
      CHECK(got == doctest::Approx(oracle).epsilon(1e-9));
      CHECK(got >= 0.0);
      CHECK(got <= 1.0);
    }
  }

  SUBCASE("invariant under strictly increasing transforms") {
    pk::Rng rng(157);
    std::vector<double> tar(20), non(30);
    for (auto& s : tar) s = rng.normal() + 1.0;
    for (auto& s : non) s = rng.normal();
    const double base = compute_eer_from_scores(tar, non);
    auto warp = [](double x) { return std::exp(0.7 * x) + 2.0 * x; };
    std::vector<double> tw, nw;
    for (double s : tar) tw.push_back(warp(s));
    for (double s : non) nw.push_back(warp(s));
    CHECK(compute_eer_from_scores(tw, nw) == doctest::Approx(base).epsilon(1e-12));
  }

  SUBCASE("negating scores and swapping labels preserves the EER") {
    pk::Rng rng(163);
    std::vector<double> tar(25), non(35);
    for (auto& s : tar) s = rng.normal() + 0.8;
    for (auto& s : non) s = rng.normal();
    std::vector<double> neg_tar, neg_non;
    for (double s : non) neg_tar.push_back(-s);
    for (double s : tar) neg_non.push_back(-s);
    CHECK(compute_eer_from_scores(tar, non) ==
          doctest::Approx(compute_eer_from_scores(neg_tar, neg_non)).epsilon(1e-12));
  }

  SUBCASE("rejection sentinels (-inf) count as misses") {
    // one of two targets always rejected: the crossing sits at far = miss = 0.5
    const std::vector<double> tar{0.9, -std::numeric_limits<double>::infinity()};
    const std::vector<double> non{0.1, 0.2};
    const double eer = compute_eer_from_scores(tar, non);
    CHECK(eer == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(eer == doctest::Approx(pk_test::eer_sweep_oracle(tar, non)).epsilon(1e-9));
  }

  SUBCASE("a missing trial class is an error") {
    CHECK_THROWS_WITH_AS(compute_eer_from_scores({}, {0.1}), doctest::Contains("bad-input"),
                         Error);
  }
}

TEST_CASE("classification_error") {
  CHECK(classification_error({{"a", "a"}, {"b", "b"}}) == 0.0);
  CHECK(classification_error({{"a", "b"}, {"b", "a"}}) == 1.0);
  std::vector<std::pair<std::string, std::string>> preds(400, {"x", "x"});
  preds[7] = {"x", "y"};
  CHECK(classification_error(preds) == doctest::Approx(0.0025).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(classification_error({}), doctest::Contains("bad-input"), Error);
}

TEST_CASE("score files round-trip including the sentinel and the norm tag") {
  pk_test::TempDir tmp("scores");
  std::vector<TrialScore> scores;
  scores.push_back({{"u1", "p1", true}, 0.125}
  );
  scores.push_back({{"u1", "p2", false}, -std::numeric_limits<double>::infinity()});
  scores.push_back({{"u2", "p2", true}, 1.0 / 3.0});

  const std::string path = tmp.str() + "/s.txt";
  write_score_file(path, scores, ScoreNorm::kMaxNorm);
  const ScoreFile sf = read_score_file(path);
  CHECK(sf.norm == ScoreNorm::kMaxNorm);
  REQUIRE(sf.scores.size() == 3);
  CHECK(sf.scores[0].trial.utt_id == "u1");
  CHECK(sf.scores[0].trial.target);
  CHECK(sf.scores[0].score == 0.125);
  CHECK(std::isinf(sf.scores[1].score));
  CHECK(sf.scores[2].score == 1.0 / 3.0);  // 17 significant digits survive

  pk::write_text_file(tmp.str() + "/bad.txt", "u1\tp1\ttarget\n");
  CHECK_THROWS_WITH_AS(read_score_file(tmp.str() + "/bad.txt"),
                       doctest::Contains("bad-format"), Error);
  pk::write_text_file(tmp.str() + "/bad2.txt", "u1\tp1\tneither\t0.5\n");
  CHECK_THROWS_WITH_AS(read_score_file(tmp.str() + "/bad2.txt"),
                       doctest::Contains("bad-format"), Error);
}

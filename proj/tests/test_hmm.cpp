// phrasekit/tests/test_hmm.cpp

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
#include <set>

#include "oracles.hpp"
#include "phrasekit/common.hpp"
#include "phrasekit/io_util.hpp"
#include "phrasekit/hmm.hpp"
#include "test_util.hpp"

using namespace pk;

namespace {

MonophoneSet random_mono(pk::Rng& rng, const std::vector<std::string>& names,
                         int states, int comps, int dim) {
  MonophoneSet mono;
  const int G = static_cast<int>(names.size()) * states * comps;
  mono.inventory.means = pk_test::random_matrix(rng, G, dim, 2.0);
  mono.inventory.variances.resize(G, dim);
  for (int g = 0; g < G; ++g)
    for (int f = 0; f < dim; ++f) mono.inventory.variances(g, f) = 0.4 + rng.uniform();
  int next = 0;
  for (const auto& name : names) {
    Monophone ph;
    ph.name = name;
    for (int s = 0; s < states; ++s) {
      HmmState st;
      st.self_loop = rng.uniform(0.3, 0.7);
      Eigen::VectorXd w(comps);
      for (int m = 0; m < comps; ++m) {
        st.gmm.component_ids.push_back(next++);
        w[m] = 0.2 + rng.uniform();
      }
      st.gmm.weights = w / w.sum();
      ph.states.push_back(std::move(st));
    }
    mono.phones.push_back(std::move(ph));
  }
  return mono;
}

}  // namespace

TEST_CASE("compose_phrase_hmm") {
  pk::Rng rng(41);
  const MonophoneSet mono = random_mono(rng, {"a", "b", "c"}, 3, 2, 2);

  SUBCASE("two phones of three states give six states") {
    const PhraseHmm h = compose_phrase_hmm(mono, {"a", "b"});
    CHECK(h.num_states() == 6);
  }

  SUBCASE("a single phone composes to itself") {
    const PhraseHmm h = compose_phrase_hmm(mono, {"b"});
    REQUIRE(h.num_states() == 3);
    for (int s = 0; s < 3; ++s) {
      CHECK(h.states[s].gmm.component_ids == mono.phones[1].states[s].gmm.component_ids);
      CHECK(h.states[s].self_loop == mono.phones[1].states[s].self_loop);
    }
  }

  SUBCASE("composed component ids are the union of the phones' ids") {
    const PhraseHmm h = compose_phrase_hmm(mono, {"a", "c", "b"});
    std::set<int> got;
    for (const auto& st : h.states)
      got.insert(st.gmm.component_ids.begin(), st.gmm.component_ids.end());
    std::set<int> expected;
    for (const auto& ph : mono.phones)
      for (const auto& st : ph.states)
        expected.insert(st.gmm.component_ids.begin(), st.gmm.component_ids.end());
    CHECK(got == expected);
  }

  SUBCASE("unknown phone is an error") {
    CHECK_THROWS_WITH_AS(compose_phrase_hmm(mono, {"a", "zz"}),
                         doctest::Contains("unknown-phone"), Error);
  }
}

TEST_CASE("viterbi_align") {
  pk::Rng rng(43);

  SUBCASE("one state puts every frame in state 0") {
    const MonophoneSet mono = random_mono(rng, {"a"}, 1, 1, 2);
    const PhraseHmm h = compose_phrase_hmm(mono, {"a"});
    const FeatureMatrix f = pk_test::random_features(rng, 9, 2);
    const AlignmentPath p = viterbi_align(mono.inventory, h, f);
    for (int s : p.states) CHECK(s == 0);
  }

  SUBCASE("frame count equal to state count forces the staircase") {
    const MonophoneSet mono = random_mono(rng, {"a"}, 4, 1, 2);
    const PhraseHmm h = compose_phrase_hmm(mono, {"a"});
    const FeatureMatrix f = pk_test::random_features(rng, 4, 2);
    const AlignmentPath p = viterbi_align(mono.inventory, h, f);
    CHECK(p.states == std::vector<int>{0, 1, 2, 3});
  }

  SUBCASE("too few frames is an alignment error") {
    const MonophoneSet mono = random_mono(rng, {"a"}, 4, 1, 2);
    const PhraseHmm h = compose_phrase_hmm(mono, {"a"});
    const FeatureMatrix f = pk_test::random_features(rng, 3, 2);
    CHECK_THROWS_WITH_AS(viterbi_align(mono.inventory, h, f),
                         doctest::Contains("align-infeasible"), Error);
  }

  SUBCASE("matches brute-force path enumeration and path invariants hold") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      pk::Rng r2(1000 + seed);
      const int S = 2 + static_cast<int>(r2.uniform_int(2));  // 2..3
      const int T = S + static_cast<int>(r2.uniform_int(static_cast<std::uint64_t>(6 - S)));
      const MonophoneSet mono = random_mono(r2, {"a"}, S, 2, 2);
      const PhraseHmm h = compose_phrase_hmm(mono, {"a"});
      const FeatureMatrix f = pk_test::random_features(r2, T, 2, 1.5);

      const AlignmentPath got = viterbi_align(mono.inventory, h, f);

      const Eigen::MatrixXd emis = state_log_likelihoods(mono.inventory, h.states, f);
      std::vector<double> self(S);
      for (int s = 0; s < S; ++s) self[s] = h.states[s].self_loop;
      std::vector<int> best_path;
      const double best_ll = pk_test::viterbi_brute_force(emis, self, &best_path);

      CHECK(got.log_likelihood == doctest::Approx(best_ll).epsilon(1e-10));
      CHECK(got.states == best_path);

      // invariants: monotone unit steps, full span, score recomputation
      CHECK(got.states.front() == 0);
      CHECK(got.states.back() == S - 1);
      for (std::size_t t = 1; t < got.states.size(); ++t) {
        CHECK(got.states[t] >= got.states[t - 1]);
        CHECK(got.states[t] - got.states[t - 1] <= 1);
      }
      CHECK(path_log_likelihood(mono.inventory, h, f, got.states) ==
            doctest::Approx(got.log_likelihood).epsilon(1e-10));

      // responsibilities of the aligned state sum to one per frame
      for (const auto& resp : got.responsibilities) {
        double sum = 0.0;
        for (const auto& [id, r3] : resp) sum += r3;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("train_monophones") {
  SUBCASE("one phone, one state, one component learns the corpus mean") {
    pk::Rng rng(51);
    std::vector<FeatureMatrix> data{pk_test::random_features(rng, 40, 2),
                                    pk_test::random_features(rng, 30, 2),
                                    pk_test::random_features(rng, 25, 2)};
    std::vector<std::vector<std::string>> tr{{"a"}, {"a"}, {"a"}};
    const MonophoneSet mono = train_monophones(data, tr, 1, 1, 3);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(2);
    int n = 0;
    for (const auto& f : data) {
      mean += f.data.colwise().sum();
      n += f.num_frames();
    }
    mean /= n;
    CHECK((mono.inventory.means.row(0) - mean).lpNorm<Eigen::Infinity>() < 1e-9);
  }

  SUBCASE("Viterbi-path likelihood is non-decreasing per iteration") {
    pk::Rng rng(53);
    std::vector<FeatureMatrix> data;
    std::vector<std::vector<std::string>> tr;
    for (int u = 0; u < 6; ++u) {
      FeatureMatrix f = pk_test::random_features(rng, 30, 2);
      f.data.topRows(15).array() -= 2.0;
      f.data.bottomRows(15).array() += 2.0;
      data.push_back(std::move(f));
      tr.push_back({"lo", "hi"});
    }
    std::vector<double> ll;
    train_monophones(data, tr, 2, 2, 5, &ll);
    REQUIRE(ll.size() == 5);
    for (std::size_t i = 1; i < ll.size(); ++i)
      CHECK(ll[i] >= ll[i - 1] - 1e-6 * std::abs(ll[i - 1]));
  }

  SUBCASE("recovers segment boundaries on a synthetic two-phone corpus") {
    pk::Rng rng(57);
    std::vector<FeatureMatrix> data;
    std::vector<std::vector<std::string>> tr;
    std::vector<int> true_boundary;
    for (int u = 0; u < 8; ++u) {
      const int n_a = 20 + static_cast<int>(rng.uniform_int(10));
      const int n_b = 20 + static_cast<int>(rng.uniform_int(10));
      FeatureMatrix f;
      f.data.resize(n_a + n_b, 1);
      for (int t = 0; t < n_a; ++t) f.data(t, 0) = -3.0 + rng.normal();
      for (int t = 0; t < n_b; ++t) f.data(n_a + t, 0) = 3.0 + rng.normal();
      data.push_back(std::move(f));
      tr.push_back({"A", "B"});
      true_boundary.push_back(n_a);
    }
    const MonophoneSet mono = train_monophones(data, tr, 1, 1, 4);
    for (std::size_t u = 0; u < data.size(); ++u) {
      const PhraseHmm h = compose_phrase_hmm(mono, tr[u]);
      const AlignmentPath p = viterbi_align(mono.inventory, h, data[u]);
      int boundary = 0;
      while (boundary < data[u].num_frames() && p.states[boundary] == 0) ++boundary;
      CHECK(std::abs(boundary - true_boundary[u]) <= 2);
    }
  }

  SUBCASE("a phone seen fewer than three times is rejected") {
    pk::Rng rng(61);
    std::vector<FeatureMatrix> data{pk_test::random_features(rng, 20, 2),
                                    pk_test::random_features(rng, 20, 2)};
    std::vector<std::vector<std::string>> tr{{"a"}, {"a", "rare"}};
    CHECK_THROWS_WITH_AS(train_monophones(data, tr, 1, 1, 2),
                         doctest::Contains("insufficient-data"), Error);
  }

  SUBCASE("utterance shorter than its composed state chain is rejected") {
    pk::Rng rng(63);
    std::vector<FeatureMatrix> data{pk_test::random_features(rng, 40, 2),
                                    pk_test::random_features(rng, 40, 2),
                                    pk_test::random_features(rng, 5, 2)};
    std::vector<std::vector<std::string>> tr{{"a", "b"}, {"a", "b"}, {"a", "b"}};
    CHECK_THROWS_WITH_AS(train_monophones(data, tr, 3, 1, 2),
                         doctest::Contains("align-infeasible"), Error);
  }
}

TEST_CASE("train_uv2_model") {
  pk::Rng rng(67);
  DiagonalGmm ubm;
  ubm.weights = Eigen::VectorXd::Constant(2, 0.5);
  ubm.means.resize(2, 1);
  ubm.means << -1.0, 1.0;
  ubm.variances = Eigen::MatrixXd::Ones(2, 1);

  SUBCASE("one state and one utterance reduce to plain MAP adaptation") {
    const FeatureMatrix f = pk_test::random_features(rng, 25, 1);
    const MonophoneSet uv2 = train_uv2_model(ubm, {f}, 1, 4.0, 3, "ph");
    const DiagonalGmm adapted = map_adapt_means(ubm, f, 4.0);
    CHECK((uv2.inventory.means - adapted.means).lpNorm<Eigen::Infinity>() < 1e-10);
  }

  SUBCASE("infinite relevance leaves every state at the UBM") {
    const FeatureMatrix f = pk_test::random_features(rng, 30, 1);
    const MonophoneSet uv2 = train_uv2_model(ubm, {f}, 3, 1e12, 3, "ph");
    for (int s = 0; s < 3; ++s)
      CHECK((uv2.inventory.means.middleRows(s * 2, 2) - ubm.means)
                .lpNorm<Eigen::Infinity>() < 1e-6);
  }

  SUBCASE("recovers the state means of a two-state staircase") {
    DiagonalGmm broad;
    broad.weights = Eigen::VectorXd::Ones(1);
    broad.means = Eigen::MatrixXd::Zero(1, 1);
    broad.variances = Eigen::MatrixXd::Constant(1, 1, 4.0);
    std::vector<FeatureMatrix> data;
    for (int u = 0; u < 6; ++u) {
      FeatureMatrix f;
      f.data.resize(40, 1);
      for (int t = 0; t < 20; ++t) f.data(t, 0) = -3.0 + 0.3 * rng.normal();
      for (int t = 20; t < 40; ++t) f.data(t, 0) = 3.0 + 0.3 * rng.normal();
      data.push_back(std::move(f));
    }
    const MonophoneSet uv2 = train_uv2_model(broad, data, 2, 1.0, 5, "ph");
    CHECK(uv2.inventory.means(0, 0) == doctest::Approx(-3.0).epsilon(0.2 / 3.0));
    CHECK(uv2.inventory.means(1, 0) == doctest::Approx(3.0).epsilon(0.2 / 3.0));
  }

  SUBCASE("utterance shorter than the state count is rejected") {
    const FeatureMatrix f = pk_test::random_features(rng, 3, 1);
    CHECK_THROWS_WITH_AS(train_uv2_model(ubm, {f}, 5, 4.0, 2, "ph"),
                         doctest::Contains("align-infeasible"), Error);
  }
}

TEST_CASE("PKHM files round-trip bit-exactly") {
  pk_test::TempDir tmp("pkhm");
  pk::Rng rng(71);
  const MonophoneSet mono = random_mono(rng, {"x", "y"}, 3, 2, 4);
  const std::string path = tmp.str() + "/m.pkhm";
  write_monophone_set(path, mono);
  const MonophoneSet back = read_monophone_set(path);
  CHECK((mono.inventory.means - back.inventory.means).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((mono.inventory.variances - back.inventory.variances).lpNorm<Eigen::Infinity>() ==
        0.0);
  REQUIRE(back.phones.size() == 2);
  CHECK(back.phones[0].name == "x");
  CHECK(back.phones[1].states[2].gmm.component_ids ==
        mono.phones[1].states[2].gmm.component_ids);
  CHECK(back.phones[1].states[2].self_loop == mono.phones[1].states[2].self_loop);

  const std::string path2 = tmp.str() + "/m2.pkhm";
  write_monophone_set(path2, back);
  CHECK(pk::read_text_file(path) == pk::read_text_file(path2));
}

TEST_CASE("alignment dump is frame/state text") {
  pk_test::TempDir tmp("ali");
  AlignmentPath p;
  p.states = {0, 0, 1, 2};
  p.responsibilities.resize(4);
  const std::string path = tmp.str() + "/a.ali";
  write_alignment(path, p);
  CHECK(pk::read_text_file(path) == "0 0\n1 0\n2 1\n3 2\n");
}

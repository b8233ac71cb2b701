// phrasekit/hmm.cpp

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

#include "phrasekit/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "phrasekit/common.hpp"
#include "phrasekit/io_util.hpp"
#include "phrasekit/parallel.hpp"

namespace pk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTransitionFloor = 1e-3;
constexpr double kWeightFloor = 1e-6;
constexpr double kVarianceFloorScale = 1e-4;
constexpr double kVarianceFloorAbs = 1e-10;
constexpr double kEmptyComponentCount = 1e-3;

double clamp_transition(double p) {
  return std::clamp(p, kTransitionFloor, 1.0 - kTransitionFloor);
}

// Densities of the union of components referenced by `states`, plus per-state
// index lists into the density matrix columns.
struct EmissionWorkspace {
  std::vector<int> unique_ids;                 // global ids, sorted
  std::vector<std::vector<int>> state_cols;    // per state: columns into dens
  Eigen::MatrixXd dens;                        // T x U
};

EmissionWorkspace build_emissions(const GaussianInventory& inventory,
                                  const std::vector<HmmState>& states,
                                  const FeatureMatrix& features) {
  EmissionWorkspace ws;
  std::set<int> ids;
  for (const auto& st : states)
    ids.insert(st.gmm.component_ids.begin(), st.gmm.component_ids.end());
  ws.unique_ids.assign(ids.begin(), ids.end());
  std::map<int, int> col_of;
  for (std::size_t i = 0; i < ws.unique_ids.size(); ++i) {
    const int id = ws.unique_ids[i];
    PK_CHECK(id >= 0 && id < inventory.size(), "bad-shape",
             "component id " << id << " outside inventory of size " << inventory.size());
    col_of[id] = static_cast<int>(i);
  }

  const int U = static_cast<int>(ws.unique_ids.size());
  Eigen::MatrixXd means(U, inventory.dim()), vars(U, inventory.dim());
  for (int i = 0; i < U; ++i) {
    means.row(i) = inventory.means.row(ws.unique_ids[i]);
    vars.row(i) = inventory.variances.row(ws.unique_ids[i]);
  }
  ws.dens = gaussian_log_densities(means, vars, features.data);

  ws.state_cols.resize(states.size());
  for (std::size_t s = 0; s < states.size(); ++s)
    for (int id : states[s].gmm.component_ids)
      ws.state_cols[s].push_back(col_of.at(id));
  return ws;
}

Eigen::MatrixXd emissions_from_workspace(const std::vector<HmmState>& states,
                                         const EmissionWorkspace& ws) {
  const int T = static_cast<int>(ws.dens.rows());
  const int S = static_cast<int>(states.size());
  Eigen::MatrixXd emis(T, S);
  for (int s = 0; s < S; ++s) {
    const auto& cols = ws.state_cols[s];
    Eigen::VectorXd logw(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i)
      logw[static_cast<int>(i)] = std::log(std::max(states[s].gmm.weights[static_cast<int>(i)], 1e-300));
    for (int t = 0; t < T; ++t) {
      Eigen::VectorXd v(cols.size());
      for (std::size_t i = 0; i < cols.size(); ++i)
        v[static_cast<int>(i)] = logw[static_cast<int>(i)] + ws.dens(t, cols[i]);
      emis(t, s) = logsumexp(v);
    }
  }
  return emis;
}

}  // namespace

int MonophoneSet::find_phone(const std::string& name) const {
  for (std::size_t i = 0; i < phones.size(); ++i)
    if (phones[i].name == name) return static_cast<int>(i);
  return -1;
}

Eigen::MatrixXd state_log_likelihoods(const GaussianInventory& inventory,
                                      const std::vector<HmmState>& states,
                                      const FeatureMatrix& features) {
  const EmissionWorkspace ws = build_emissions(inventory, states, features);
  return emissions_from_workspace(states, ws);
}

PhraseHmm compose_phrase_hmm(const MonophoneSet& mono,
                             const std::vector<std::string>& phone_sequence) {
  PK_CHECK(!phone_sequence.empty(), "bad-config", "empty phone sequence");
  PhraseHmm hmm;
  for (const auto& name : phone_sequence) {
    const int p = mono.find_phone(name);
    PK_CHECK(p >= 0, "unknown-phone", "phone '" << name << "' not in model");
    for (const auto& st : mono.phones[p].states) hmm.states.push_back(st);
  }
  return hmm;
}

AlignmentPath viterbi_align(const GaussianInventory& inventory,
                            const PhraseHmm& hmm, const FeatureMatrix& features) {
  const int T = features.num_frames();
  const int S = hmm.num_states();
  PK_CHECK(S >= 1, "bad-config", "empty HMM");
  PK_CHECK(T >= S, "align-infeasible",
           T << " frames cannot traverse " << S << " states left-to-right");

  const EmissionWorkspace ws = build_emissions(inventory, hmm.states, features);
  const Eigen::MatrixXd emis = emissions_from_workspace(hmm.states, ws);

  std::vector<double> log_self(S), log_fwd(S);
  for (int s = 0; s < S; ++s) {
    const double a = clamp_transition(hmm.states[s].self_loop);
    log_self[s] = std::log(a);
    log_fwd[s] = std::log(1.0 - a);
  }

  Eigen::MatrixXd delta = Eigen::MatrixXd::Constant(T, S, kNegInf);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> stay(T, S);
  delta(0, 0) = emis(0, 0);
  for (int t = 1; t < T; ++t) {
    const int lo = std::max(0, S - 1 - (T - 1 - t));
    const int hi = std::min(t, S - 1);
    for (int s = lo; s <= hi; ++s) {
      const double via_stay = delta(t - 1, s) + log_self[s];
      const double via_enter = s > 0 ? delta(t - 1, s - 1) + log_fwd[s - 1] : kNegInf;
      if (via_stay >= via_enter) {
        delta(t, s) = emis(t, s) + via_stay;
        stay(t, s) = 1;
      } else {
        delta(t, s) = emis(t, s) + via_enter;
        stay(t, s) = 0;
      }
    }
  }

  AlignmentPath out;
  out.states.resize(T);
  out.log_likelihood = delta(T - 1, S - 1);
  int s = S - 1;
  for (int t = T - 1; t >= 0; --t) {
    out.states[t] = s;
    if (t > 0 && !stay(t, s)) --s;
  }

  // Within-state responsibilities of the aligned state's components.
  out.responsibilities.resize(T);
  for (int t = 0; t < T; ++t) {
    const int st = out.states[t];
    const auto& cols = ws.state_cols[st];
    const auto& ids = hmm.states[st].gmm.component_ids;
    Eigen::VectorXd v(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i)
      v[static_cast<int>(i)] =
          std::log(std::max(hmm.states[st].gmm.weights[static_cast<int>(i)], 1e-300)) +
          ws.dens(t, cols[i]);
    const Eigen::VectorXd post = softmax_from_log(v);
    auto& resp = out.responsibilities[t];
    resp.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
      resp.emplace_back(ids[i], post[static_cast<int>(i)]);
  }
  return out;
}

double path_log_likelihood(const GaussianInventory& inventory, const PhraseHmm& hmm,
                           const FeatureMatrix& features,
                           const std::vector<int>& path) {
  const int T = features.num_frames();
  PK_CHECK(static_cast<int>(path.size()) == T, "bad-shape", "path/frames mismatch");
  const Eigen::MatrixXd emis = state_log_likelihoods(inventory, hmm.states, features);
  double ll = 0.0;
  for (int t = 0; t < T; ++t) ll += emis(t, path[t]);
  for (int t = 0; t + 1 < T; ++t) {
    const double a = clamp_transition(hmm.states[path[t]].self_loop);
    ll += path[t + 1] == path[t] ? std::log(a) : std::log(1.0 - a);
  }
  return ll;
}

namespace {

// Uniform left-to-right segmentation: frame t -> state floor(t*S/T).
std::vector<int> uniform_segmentation(int num_frames, int num_states) {
  std::vector<int> seg(num_frames);
  for (int t = 0; t < num_frames; ++t)
    seg[t] = std::min(num_states - 1,
                      static_cast<int>(static_cast<std::int64_t>(t) * num_states / num_frames));
  return seg;
}

// Small EM fit used for flat-start state GMMs; tolerates tiny buckets where
// train_ubm's data precondition would not hold.
DiagonalGmm fit_state_gmm(const Eigen::MatrixXd& frames, int num_comps,
                          const Eigen::RowVectorXd& var_floor) {
  const int T = static_cast<int>(frames.rows());
  const int F = static_cast<int>(frames.cols());
  DiagonalGmm gmm;
  gmm.weights = Eigen::VectorXd::Ones(1);
  gmm.means = frames.colwise().mean();
  Eigen::RowVectorXd var =
      frames.array().square().matrix().colwise().mean() -
      gmm.means.array().square().matrix();
  gmm.variances = var.cwiseMax(var_floor);

  FeatureMatrix fm;
  fm.data = frames;
  while (gmm.num_components() < num_comps) {
    // split heaviest
    int h;
    gmm.weights.maxCoeff(&h);
    const int C = gmm.num_components();
    DiagonalGmm next;
    next.weights.resize(C + 1);
    next.means.resize(C + 1, F);
    next.variances.resize(C + 1, F);
    next.weights.head(C) = gmm.weights;
    next.means.topRows(C) = gmm.means;
    next.variances.topRows(C) = gmm.variances;
    const Eigen::RowVectorXd sigma = gmm.variances.row(h).array().sqrt();
    next.means.row(h) = gmm.means.row(h) + 0.1 * sigma;
    next.means.row(C) = gmm.means.row(h) - 0.1 * sigma;
    next.variances.row(C) = gmm.variances.row(h);
    next.weights[h] /= 2.0;
    next.weights[C] = next.weights[h];
    gmm = std::move(next);

    for (int iter = 0; iter < 2 && T > 1; ++iter) {
      const GmmAccumulator acc = accumulate_gmm_stats(gmm, fm);
      for (int c = 0; c < gmm.num_components(); ++c) {
        if (acc.gamma[c] < kEmptyComponentCount) continue;
        const Eigen::RowVectorXd mean = acc.x.row(c) / acc.gamma[c];
        Eigen::RowVectorXd v = acc.x2.row(c) / acc.gamma[c] -
                               mean.array().square().matrix();
        gmm.means.row(c) = mean;
        gmm.variances.row(c) = v.cwiseMax(var_floor);
        gmm.weights[c] = acc.gamma[c];
      }
      gmm.weights = gmm.weights.cwiseMax(kWeightFloor);
      gmm.weights /= gmm.weights.sum();
    }
  }
  return gmm;
}

struct TransitionCounts {
  double stay = 0.0;
  double advance = 0.0;

  double smoothed_self() const {
    // add-one smoothing, floored
    return clamp_transition((stay + 1.0) / (stay + advance + 2.0));
  }
};

}  // namespace

MonophoneSet train_monophones(const std::vector<FeatureMatrix>& features,
                              const std::vector<std::vector<std::string>>& transcripts,
                              int num_states, int comps_per_state, int iters,
                              std::vector<double>* ll_history) {
  PK_CHECK(features.size() == transcripts.size(), "bad-config",
           "features/transcripts count mismatch");
  PK_CHECK(!features.empty(), "insufficient-data", "no training utterances");
  PK_CHECK(num_states >= 1 && comps_per_state >= 1 && iters >= 1, "bad-config",
           "num_states, comps_per_state and iters must be positive");

  // Phone inventory (sorted for determinism) + occurrence precondition.
  std::map<std::string, int> occurrences;
  for (const auto& tr : transcripts) {
    PK_CHECK(!tr.empty(), "bad-config", "empty transcript");
    for (const auto& ph : tr) ++occurrences[ph];
  }
  std::vector<std::string> phone_names;
  for (const auto& [name, count] : occurrences) {
    PK_CHECK(count >= 3, "insufficient-data",
             "phone '" << name << "' occurs only " << count << " times (need >= 3)");
    phone_names.push_back(name);
  }
  std::map<std::string, int> phone_index;
  for (std::size_t i = 0; i < phone_names.size(); ++i)
    phone_index[phone_names[i]] = static_cast<int>(i);

  const int F = features[0].dim();
  const int P = static_cast<int>(phone_names.size());
  const int S = num_states, M = comps_per_state;
  const int G = P * S * M;

  // Global variance floor.
  std::int64_t total_frames = 0;
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(F);
  Eigen::RowVectorXd sum2 = Eigen::RowVectorXd::Zero(F);
  for (const auto& f : features) {
    PK_CHECK(f.dim() == F, "dim-mismatch", "inconsistent feature dims");
    total_frames += f.num_frames();
    sum += f.data.colwise().sum();
    sum2 += f.data.array().square().matrix().colwise().sum();
  }
  const Eigen::RowVectorXd gmean = sum / total_frames;
  const Eigen::RowVectorXd gvar =
      sum2 / total_frames - gmean.array().square().matrix();
  const Eigen::RowVectorXd var_floor =
      (kVarianceFloorScale * gvar.array()).max(kVarianceFloorAbs).matrix();

  // Flat start: uniform segmentation across the composed state chain.
  std::vector<std::vector<Eigen::RowVectorXd>> buckets(P * S);
  for (std::size_t u = 0; u < features.size(); ++u) {
    const int T = features[u].num_frames();
    const int NS = static_cast<int>(transcripts[u].size()) * S;
    PK_CHECK(T >= NS, "align-infeasible",
             "utterance " << u << " has " << T << " frames for " << NS << " states");
    const std::vector<int> seg = uniform_segmentation(T, NS);
    for (int t = 0; t < T; ++t) {
      const int p = phone_index.at(transcripts[u][seg[t] / S]);
      buckets[p * S + seg[t] % S].push_back(features[u].data.row(t));
    }
  }

  MonophoneSet mono;
  mono.inventory.means.resize(G, F);
  mono.inventory.variances.resize(G, F);
  mono.phones.resize(P);
  for (int p = 0; p < P; ++p) {
    mono.phones[p].name = phone_names[p];
    mono.phones[p].states.resize(S);
    for (int s = 0; s < S; ++s) {
      const auto& bucket = buckets[p * S + s];
      PK_CHECK(!bucket.empty(), "insufficient-data",
               "no frames for phone '" << phone_names[p] << "' state " << s);
      Eigen::MatrixXd fr(bucket.size(), F);
      for (std::size_t i = 0; i < bucket.size(); ++i)
        fr.row(static_cast<int>(i)) = bucket[i];
      const DiagonalGmm g = fit_state_gmm(fr, M, var_floor);
      const int base = (p * S + s) * M;
      HmmState& st = mono.phones[p].states[s];
      st.self_loop = 0.5;
      st.gmm.weights = g.weights;
      for (int m = 0; m < M; ++m) {
        mono.inventory.means.row(base + m) = g.means.row(m);
        mono.inventory.variances.row(base + m) = g.variances.row(m);
        st.gmm.component_ids.push_back(base + m);
      }
    }
  }
  buckets.clear();

  // Viterbi training: align with current models, then hard-assignment
  // re-estimation of emissions and transitions.
  if (ll_history) ll_history->clear();
  for (int it = 0; it < iters; ++it) {
    // compositions are cached per distinct transcript
    std::map<std::string, PhraseHmm> hmm_cache;
    std::vector<const PhraseHmm*> utt_hmm(features.size());
    std::vector<std::string> utt_key(features.size());
    for (std::size_t u = 0; u < features.size(); ++u) {
      std::string key;
      for (const auto& ph : transcripts[u]) {
        key += ph;
        key += '\x1f';
      }
      utt_key[u] = key;
      if (!hmm_cache.count(key)) hmm_cache[key] = compose_phrase_hmm(mono, transcripts[u]);
    }
    for (std::size_t u = 0; u < features.size(); ++u)
      utt_hmm[u] = &hmm_cache.at(utt_key[u]);

    std::vector<AlignmentPath> paths(features.size());
    parallel_for(features.size(), [&](std::size_t u) {
      paths[u] = viterbi_align(mono.inventory, *utt_hmm[u], features[u]);
    });

    double total_ll = 0.0;
    Eigen::VectorXd N = Eigen::VectorXd::Zero(G);
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(G, F);
    Eigen::MatrixXd X2 = Eigen::MatrixXd::Zero(G, F);
    std::vector<TransitionCounts> trans(P * S);
    for (std::size_t u = 0; u < features.size(); ++u) {
      const AlignmentPath& path = paths[u];
      total_ll += path.log_likelihood;
      const auto& tr = transcripts[u];
      for (int t = 0; t < features[u].num_frames(); ++t) {
        for (const auto& [g, r] : path.responsibilities[t]) {
          N[g] += r;
          X.row(g) += r * features[u].data.row(t);
          X2.row(g) += r * features[u].data.row(t).array().square().matrix();
        }
        if (t + 1 < features[u].num_frames()) {
          const int composed = path.states[t];
          const int p = phone_index.at(tr[composed / S]);
          TransitionCounts& tc = trans[p * S + composed % S];
          if (path.states[t + 1] == path.states[t])
            tc.stay += 1.0;
          else
            tc.advance += 1.0;
        }
      }
    }
    if (ll_history) ll_history->push_back(total_ll);

    for (int g = 0; g < G; ++g) {
      if (N[g] < kEmptyComponentCount) continue;  // keep previous parameters
      const Eigen::RowVectorXd mean = X.row(g) / N[g];
      Eigen::RowVectorXd v = X2.row(g) / N[g] - mean.array().square().matrix();
      mono.inventory.means.row(g) = mean;
      mono.inventory.variances.row(g) = v.cwiseMax(var_floor);
    }
    for (int p = 0; p < P; ++p) {
      for (int s = 0; s < S; ++s) {
        HmmState& st = mono.phones[p].states[s];
        Eigen::VectorXd w(M);
        for (int m = 0; m < M; ++m) w[m] = N[st.gmm.component_ids[m]];
        if (w.sum() > 0) {
          w = w.cwiseMax(kWeightFloor);
          st.gmm.weights = w / w.sum();
        }
        st.self_loop = trans[p * S + s].smoothed_self();
      }
    }
  }
  return mono;
}

MonophoneSet train_uv2_model(const DiagonalGmm& ubm,
                             const std::vector<FeatureMatrix>& features,
                             int num_states, double relevance_factor, int iters,
                             const std::string& phrase_name,
                             std::vector<double>* ll_history) {
  PK_CHECK(!features.empty(), "insufficient-data", "no training utterances");
  PK_CHECK(num_states >= 1 && iters >= 1, "bad-config", "bad num_states/iters");
  const int C = ubm.num_components(), F = ubm.dim();
  const int S = num_states;

  std::vector<std::vector<int>> seg(features.size());
  for (std::size_t u = 0; u < features.size(); ++u) {
    PK_CHECK(features[u].dim() == F, "dim-mismatch", "feature dim mismatch");
    PK_CHECK(features[u].num_frames() >= S, "align-infeasible",
             "utterance " << u << " shorter than " << S << " states");
    seg[u] = uniform_segmentation(features[u].num_frames(), S);
  }

  MonophoneSet model;
  model.inventory.means.resize(S * C, F);
  model.inventory.variances.resize(S * C, F);
  model.phones.resize(1);
  model.phones[0].name = phrase_name;
  model.phones[0].states.resize(S);
  for (int s = 0; s < S; ++s) {
    HmmState& st = model.phones[0].states[s];
    st.self_loop = 0.5;
    st.gmm.weights = ubm.weights;
    for (int c = 0; c < C; ++c) {
      st.gmm.component_ids.push_back(s * C + c);
      model.inventory.means.row(s * C + c) = ubm.means.row(c);
      model.inventory.variances.row(s * C + c) = ubm.variances.row(c);
    }
  }

  if (ll_history) ll_history->clear();
  for (int it = 0; it < iters; ++it) {
    // Per-state relevance-MAP mean adaptation from the shared UBM.
    for (int s = 0; s < S; ++s) {
      std::vector<Eigen::RowVectorXd> rows;
      for (std::size_t u = 0; u < features.size(); ++u)
        for (int t = 0; t < features[u].num_frames(); ++t)
          if (seg[u][t] == s) rows.push_back(features[u].data.row(t));
      if (rows.empty()) {
        model.inventory.means.middleRows(s * C, C) = ubm.means;
        continue;
      }
      FeatureMatrix fm;
      fm.data.resize(rows.size(), F);
      for (std::size_t i = 0; i < rows.size(); ++i)
        fm.data.row(static_cast<int>(i)) = rows[i];
      const DiagonalGmm adapted = map_adapt_means(ubm, fm, relevance_factor);
      model.inventory.means.middleRows(s * C, C) = adapted.means;
    }

    // Transitions from current segmentation (add-one smoothing).
    std::vector<TransitionCounts> trans(S);
    for (const auto& sg : seg)
      for (std::size_t t = 0; t + 1 < sg.size(); ++t)
        (sg[t + 1] == sg[t] ? trans[sg[t]].stay : trans[sg[t]].advance) += 1.0;
    for (int s = 0; s < S; ++s)
      model.phones[0].states[s].self_loop = trans[s].smoothed_self();

    // Re-align.
    const PhraseHmm hmm = compose_phrase_hmm(model, {phrase_name});
    std::vector<AlignmentPath> paths(features.size());
    parallel_for(features.size(), [&](std::size_t u) {
      paths[u] = viterbi_align(model.inventory, hmm, features[u]);
    });
    double total_ll = 0.0;
    for (std::size_t u = 0; u < features.size(); ++u) {
      total_ll += paths[u].log_likelihood;
      seg[u] = paths[u].states;
    }
    if (ll_history) ll_history->push_back(total_ll);
  }
  return model;
}

static const char kHmmMagic[4] = {'P', 'K', 'H', 'M'};
static const std::uint32_t kHmmVersion = 1;

void write_monophone_set(const std::string& path, const MonophoneSet& mono) {
  PK_CHECK(!mono.phones.empty() && mono.inventory.size() > 0, "bad-shape",
           "refusing to write empty model");
  BinaryWriter w(path);
  w.write_magic(kHmmMagic);
  w.write_u32(kHmmVersion);
  w.write_u32(static_cast<std::uint32_t>(mono.inventory.dim()));
  w.write_u32(static_cast<std::uint32_t>(mono.inventory.size()));
  for (int g = 0; g < mono.inventory.size(); ++g)
    for (int f = 0; f < mono.inventory.dim(); ++f) w.write_f64(mono.inventory.means(g, f));
  for (int g = 0; g < mono.inventory.size(); ++g)
    for (int f = 0; f < mono.inventory.dim(); ++f) w.write_f64(mono.inventory.variances(g, f));
  w.write_u32(static_cast<std::uint32_t>(mono.phones.size()));
  for (const auto& ph : mono.phones) {
    w.write_string(ph.name);
    w.write_u32(static_cast<std::uint32_t>(ph.states.size()));
    for (const auto& st : ph.states) {
      w.write_f64(st.self_loop);
      w.write_u32(static_cast<std::uint32_t>(st.gmm.component_ids.size()));
      for (std::size_t i = 0; i < st.gmm.component_ids.size(); ++i) {
        w.write_u32(static_cast<std::uint32_t>(st.gmm.component_ids[i]));
        w.write_f64(st.gmm.weights[static_cast<int>(i)]);
      }
    }
  }
  w.close();
}

MonophoneSet read_monophone_set(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic(kHmmMagic);
  r.expect_version(kHmmVersion);
  const std::uint32_t F = r.read_u32();
  const std::uint32_t G = r.read_u32();
  PK_CHECK(F >= 1 && G >= 1, "bad-shape", path << ": empty inventory");
  MonophoneSet mono;
  mono.inventory.means.resize(G, F);
  mono.inventory.variances.resize(G, F);
  for (std::uint32_t g = 0; g < G; ++g)
    for (std::uint32_t f = 0; f < F; ++f) mono.inventory.means(g, f) = r.read_f64();
  for (std::uint32_t g = 0; g < G; ++g)
    for (std::uint32_t f = 0; f < F; ++f) mono.inventory.variances(g, f) = r.read_f64();
  const std::uint32_t P = r.read_u32();
  mono.phones.resize(P);
  for (std::uint32_t p = 0; p < P; ++p) {
    mono.phones[p].name = r.read_string();
    const std::uint32_t S = r.read_u32();
    mono.phones[p].states.resize(S);
    for (std::uint32_t s = 0; s < S; ++s) {
      HmmState& st = mono.phones[p].states[s];
      st.self_loop = r.read_f64();
      const std::uint32_t n = r.read_u32();
      st.gmm.weights.resize(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t id = r.read_u32();
        PK_CHECK(id < G, "bad-format", path << ": component id out of range");
        st.gmm.component_ids.push_back(static_cast<int>(id));
        st.gmm.weights[static_cast<int>(i)] = r.read_f64();
      }
    }
  }
  return mono;
}

void write_alignment(const std::string& path, const AlignmentPath& alignment) {
  std::ostringstream ss;
  for (std::size_t t = 0; t < alignment.states.size(); ++t)
    ss << t << ' ' << alignment.states[t] << '\n';
  write_text_file(path, ss.str());
}

}  // namespace pk

// phrasekit/ivector.cpp

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

#include "phrasekit/ivector.hpp"

#include <cmath>

#include "phrasekit/common.hpp"
#include "phrasekit/io_util.hpp"
#include "phrasekit/parallel.hpp"
#include "phrasekit/rng.hpp"

namespace pk {

namespace {

constexpr double kRidge = 1e-8;
constexpr double kEmptyOccupancy = 1e-8;

void check_layout(const TotalVariabilityModel& tv, const SufficientStats& stats) {
  PK_CHECK(tv.num_components() == stats.num_components() && tv.dim() == stats.dim(),
           "layout-mismatch",
           "TV model is C=" << tv.num_components() << " F=" << tv.dim()
                            << ", stats are C=" << stats.num_components()
                            << " F=" << stats.dim());
}

// b = sum_c T_c' Sigma_c^-1 F_c
Eigen::VectorXd information_vector(const TotalVariabilityModel& tv,
                                   const SufficientStats& stats) {
  const int C = tv.num_components(), F = tv.dim(), R = tv.rank();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(R);
  for (int c = 0; c < C; ++c) {
    const Eigen::VectorXd scaled =
        (stats.first.row(c).array() / tv.sigma.row(c).array()).transpose();
    b.noalias() += tv.T.middleRows(c * F, F).transpose() * scaled;
  }
  return b;
}

}  // namespace

SufficientStats collect_stats_gmm(const DiagonalGmm& ubm,
                                  const FeatureMatrix& features) {
  const Responsibilities gamma = frame_posteriors(ubm, features);
  SufficientStats stats;
  stats.zeroth = gamma.colwise().sum();
  stats.first = gamma.transpose() * features.data;  // C x F
  stats.first -= stats.zeroth.asDiagonal() * ubm.means;
  return stats;
}

SufficientStats collect_stats_hmm(const MonophoneSet& mono, const PhraseHmm& phrase_hmm,
                                  const FeatureMatrix& features) {
  const AlignmentPath path = viterbi_align(mono.inventory, phrase_hmm, features);
  SufficientStats stats;
  stats.zeroth = Eigen::VectorXd::Zero(mono.inventory.size());
  stats.first = Eigen::MatrixXd::Zero(mono.inventory.size(), mono.inventory.dim());
  for (int t = 0; t < features.num_frames(); ++t) {
    for (const auto& [g, r] : path.responsibilities[t]) {
      stats.zeroth[g] += r;
      stats.first.row(g) += r * (features.data.row(t) - mono.inventory.means.row(g));
    }
  }
  return stats;
}

Eigen::MatrixXd posterior_precision(const TotalVariabilityModel& tv,
                                    const SufficientStats& stats) {
  check_layout(tv, stats);
  const int C = tv.num_components(), F = tv.dim(), R = tv.rank();
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(R, R);
  for (int c = 0; c < C; ++c) {
    if (stats.zeroth[c] <= 0.0) continue;
    const auto Tc = tv.T.middleRows(c * F, F);
    const Eigen::MatrixXd scaled =
        tv.sigma.row(c).array().inverse().matrix().asDiagonal() * Tc;
    L.noalias() += stats.zeroth[c] * (Tc.transpose() * scaled);
  }
  return L;
}

IVector extract_ivector(const TotalVariabilityModel& tv, const SufficientStats& stats,
                        AlignmentSource alignment, const std::string& feature_tag) {
  check_layout(tv, stats);
  const Eigen::MatrixXd L = posterior_precision(tv, stats);
  const Eigen::VectorXd b = information_vector(tv, stats);
  IVector iv;
  iv.alignment = alignment;
  iv.feature_tag = feature_tag;
  iv.w = Eigen::LLT<Eigen::MatrixXd>(L).solve(b);
  PK_CHECK(iv.w.allFinite(), "numerical", "non-finite i-vector");
  return iv;
}

TotalVariabilityModel train_tv(const std::vector<SufficientStats>& stats,
                               const Eigen::MatrixXd& sigma, int rank, int iters,
                               std::uint64_t seed,
                               std::vector<double>* objective_history) {
  PK_CHECK(rank >= 1, "bad-config", "rank must be >= 1");
  PK_CHECK(static_cast<int>(stats.size()) >= rank, "insufficient-data",
           stats.size() << " utterances for rank " << rank);
  const int C = static_cast<int>(sigma.rows());
  const int F = static_cast<int>(sigma.cols());
  const int R = rank;
  for (const auto& s : stats)
    PK_CHECK(s.num_components() == C && s.dim() == F, "layout-mismatch",
             "stats layout differs across utterances");

  TotalVariabilityModel tv;
  tv.sigma = sigma;
  tv.T.resize(C * F, R);
  {
    Rng rng(seed);
    const double scale = 0.1 * std::sqrt(sigma.mean());
    for (int i = 0; i < C * F; ++i)
      for (int r = 0; r < R; ++r) tv.T(i, r) = scale * rng.normal();
  }

  if (objective_history) objective_history->clear();
  const std::size_t U = stats.size();

  for (int it = 0; it < iters; ++it) {
    // Per-component T_c' Sigma_c^-1 T_c, reused for every utterance.
    std::vector<Eigen::MatrixXd> K(C);
    std::vector<Eigen::MatrixXd> TSinv(C);  // Sigma_c^-1-scaled T_c, F x R
    for (int c = 0; c < C; ++c) {
      const auto Tc = tv.T.middleRows(c * F, F);
      TSinv[c] = sigma.row(c).array().inverse().matrix().asDiagonal() * Tc;
      K[c] = Tc.transpose() * TSinv[c];
    }

    struct Accum {
      std::vector<Eigen::MatrixXd> A;  // per component R x R
      std::vector<Eigen::MatrixXd> B;  // per component F x R
      double objective = 0.0;

      void init(int C_, int F_, int R_) {
        A.assign(C_, Eigen::MatrixXd::Zero(R_, R_));
        B.assign(C_, Eigen::MatrixXd::Zero(F_, R_));
      }
      void add(const Accum& o) {
        for (std::size_t c = 0; c < A.size(); ++c) {
          A[c] += o.A[c];
          B[c] += o.B[c];
        }
        objective += o.objective;
      }
    };

    // Fixed-size chunks keep the reduction order independent of thread count.
    const std::size_t chunk = 16;
    const std::size_t num_chunks = (U + chunk - 1) / chunk;
    std::vector<Accum> partial(num_chunks);
    parallel_for(num_chunks, [&](std::size_t ci) {
      Accum& acc = partial[ci];
      acc.init(C, F, R);
      const std::size_t lo = ci * chunk, hi = std::min(U, lo + chunk);
      for (std::size_t u = lo; u < hi; ++u) {
        Eigen::MatrixXd L = Eigen::MatrixXd::Identity(R, R);
        for (int c = 0; c < C; ++c)
          if (stats[u].zeroth[c] > 0.0) L.noalias() += stats[u].zeroth[c] * K[c];
        Eigen::VectorXd b = Eigen::VectorXd::Zero(R);
        for (int c = 0; c < C; ++c)
          b.noalias() += TSinv[c].transpose() * stats[u].first.row(c).transpose();

        const Eigen::LLT<Eigen::MatrixXd> llt(L);
        const Eigen::VectorXd w = llt.solve(b);
        const Eigen::MatrixXd Linv =
            llt.solve(Eigen::MatrixXd::Identity(R, R));
        double logdet = 0.0;
        for (int r = 0; r < R; ++r) logdet += 2.0 * std::log(llt.matrixL()(r, r));
        acc.objective += 0.5 * (b.dot(w) - logdet);

        const Eigen::MatrixXd second_moment = w * w.transpose() + Linv;
        for (int c = 0; c < C; ++c) {
          if (stats[u].zeroth[c] > 0.0) acc.A[c] += stats[u].zeroth[c] * second_moment;
          acc.B[c].noalias() += stats[u].first.row(c).transpose() * w.transpose();
        }
      }
    });

    Accum total;
    total.init(C, F, R);
    for (const auto& p : partial) total.add(p);
    if (objective_history) objective_history->push_back(total.objective);

    for (int c = 0; c < C; ++c) {
      if (total.A[c].norm() < kEmptyOccupancy) continue;  // no evidence: keep rows
      Eigen::LLT<Eigen::MatrixXd> llt(total.A[c]);
      if (llt.info() != Eigen::Success) {
        PK_LOG("TV M-step: singular normal equations for component " << c
               << ", applying 1e-8 ridge");
        llt.compute(total.A[c] + kRidge * Eigen::MatrixXd::Identity(R, R));
        PK_CHECK(llt.info() == Eigen::Success, "numerical",
                 "normal equations unsolvable even with ridge");
      }
      // T_c' solves A_c T_c' = B_c'  (A is symmetric)
      tv.T.middleRows(c * F, F) = llt.solve(total.B[c].transpose()).transpose();
    }
  }
  return tv;
}

static const char kStatsMagic[4] = {'P', 'K', 'S', 'T'};
static const char kTvMagic[4] = {'P', 'K', 'T', 'V'};
static const char kIvMagic[4] = {'P', 'K', 'I', 'V'};
static const std::uint32_t kVersion = 1;

void write_stats(const std::string& path, const SufficientStats& stats) {
  BinaryWriter w(path);
  w.write_magic(kStatsMagic);
  w.write_u32(kVersion);
  w.write_u32(static_cast<std::uint32_t>(stats.num_components()));
  w.write_u32(static_cast<std::uint32_t>(stats.dim()));
  w.write_f64_array(stats.zeroth.data(), stats.zeroth.size());
  for (int c = 0; c < stats.num_components(); ++c)
    for (int f = 0; f < stats.dim(); ++f) w.write_f64(stats.first(c, f));
  w.close();
}

SufficientStats read_stats(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic(kStatsMagic);
  r.expect_version(kVersion);
  const std::uint32_t C = r.read_u32();
  const std::uint32_t F = r.read_u32();
  SufficientStats stats;
  stats.zeroth.resize(C);
  stats.first.resize(C, F);
  r.read_f64_array(stats.zeroth.data(), C);
  for (std::uint32_t c = 0; c < C; ++c)
    for (std::uint32_t f = 0; f < F; ++f) stats.first(c, f) = r.read_f64();
  return stats;
}

void write_tv(const std::string& path, const TotalVariabilityModel& tv) {
  BinaryWriter w(path);
  w.write_magic(kTvMagic);
  w.write_u32(kVersion);
  w.write_u32(static_cast<std::uint32_t>(tv.num_components()));
  w.write_u32(static_cast<std::uint32_t>(tv.dim()));
  w.write_u32(static_cast<std::uint32_t>(tv.rank()));
  for (int i = 0; i < tv.T.rows(); ++i)
    for (int r = 0; r < tv.T.cols(); ++r) w.write_f64(tv.T(i, r));
  w.close();
}

TotalVariabilityModel read_tv(const std::string& path, const Eigen::MatrixXd& sigma) {
  BinaryReader r(path);
  r.expect_magic(kTvMagic);
  r.expect_version(kVersion);
  const std::uint32_t C = r.read_u32();
  const std::uint32_t F = r.read_u32();
  const std::uint32_t R = r.read_u32();
  PK_CHECK(static_cast<int>(C) == sigma.rows() && static_cast<int>(F) == sigma.cols(),
           "layout-mismatch",
           path << ": stored layout C=" << C << " F=" << F
                << " does not match the alignment model");
  TotalVariabilityModel tv;
  tv.sigma = sigma;
  tv.T.resize(C * F, R);
  for (std::uint32_t i = 0; i < C * F; ++i)
    for (std::uint32_t c = 0; c < R; ++c) tv.T(i, c) = r.read_f64();
  return tv;
}

const Eigen::VectorXd* IvectorArchive::find(const std::string& utt_id) const {
  for (const auto& [id, w] : entries)
    if (id == utt_id) return &w;
  return nullptr;
}

void write_ivector_archive(const std::string& path, const IvectorArchive& archive) {
  BinaryWriter w(path);
  w.write_magic(kIvMagic);
  w.write_u32(kVersion);
  w.write_u32(static_cast<std::uint32_t>(archive.rank));
  w.write_u32(static_cast<std::uint32_t>(archive.entries.size()));
  for (const auto& [id, vec] : archive.entries) {
    PK_CHECK(vec.size() == archive.rank, "bad-shape",
             "i-vector for '" << id << "' has wrong dimension");
    w.write_string(id);
    w.write_f64_array(vec.data(), vec.size());
  }
  w.close();
}

IvectorArchive read_ivector_archive(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic(kIvMagic);
  r.expect_version(kVersion);
  IvectorArchive archive;
  archive.rank = static_cast<int>(r.read_u32());
  const std::uint32_t count = r.read_u32();
  archive.entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string id = r.read_string();
    Eigen::VectorXd vec(archive.rank);
    r.read_f64_array(vec.data(), archive.rank);
    archive.entries.emplace_back(std::move(id), std::move(vec));
  }
  return archive;
}

}  // namespace pk

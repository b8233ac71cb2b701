// phrasekit/experiment.hpp

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

#ifndef PHRASEKIT_EXPERIMENT_HPP
#define PHRASEKIT_EXPERIMENT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phrasekit/config.hpp"
#include "phrasekit/eval.hpp"
#include "phrasekit/ivector.hpp"
#include "phrasekit/manifest.hpp"
#include "phrasekit/mfcc.hpp"

namespace pk {

struct ExperimentConfig {
  std::string manifest_path;
  std::string workdir;
  MfccConfig mfcc;
  std::string alignment = "gmm";       // gmm | hmm
  std::string backend = "cosine";      // lgc | cosine
  std::string normalization = "none";  // none | max-norm (cosine only)
  int ubm_components = 64;
  int ubm_iters = 10;
  int mono_states = 3;
  int mono_comps = 8;
  int mono_iters = 5;
  int uv2_states = 5;
  int tv_rank = 50;
  int tv_iters = 10;
  double relevance_factor = 16.0;
  double shrinkage = 0.0;
  std::string lgc_cov_file;  // external within-class covariance (PKLG); empty = same-manifest
  int enroll_speakers = 0;   // restrict enrollment to the first n speakers (0 = all)
  int enroll_reps = 0;       // restrict to the first m reps per (phrase, speaker) (0 = all)
  std::uint64_t seed = 1;
  int threads = 0;

  static ExperimentConfig from_config(const Config& c);
  void validate() const;
  std::map<std::string, std::string> echo() const;  // resolved values, for reports
};

// Everything from audio to i-vectors, in memory.  Exactly one of ubm/mono is
// meaningful depending on use_hmm.
struct Pipeline {
  std::map<std::string, FeatureMatrix> features;  // by utterance id
  bool use_hmm = false;
  DiagonalGmm ubm;
  MonophoneSet mono;
  TotalVariabilityModel tv;
  IvectorArchive ivectors;
};

// Feature extraction for every manifest row.  Audio rows (.wav) run the MFCC
// chain and are quantized through float32; anything else is read as a PKFT
// feature file (the external-feature ingestion path).
std::map<std::string, FeatureMatrix> compute_all_features(const Manifest& manifest,
                                                          const MfccConfig& mfcc);

// Stages: alignment-model training (train split), stats, TV training (train
// split), i-vector extraction (all rows).
Pipeline build_pipeline(const ExperimentConfig& cfg, const Manifest& manifest);

// Stats + i-vectors for another manifest under an existing pipeline's models
// (e.g. estimating a phrase-independent covariance on a disjoint corpus).
IvectorArchive extract_with_models(const Pipeline& pipeline, const Manifest& other,
                                   const MfccConfig& mfcc);

struct TrialOutcome {
  std::vector<TrialScore> scores;
  ScoreNorm norm = ScoreNorm::kNone;
  std::vector<std::pair<std::string, std::string>> predictions;  // (predicted, truth)
  std::vector<std::string> enrolled_phrases;
};

// Exactly one member is engaged, matching cfg.backend.
struct BackendModels {
  std::optional<LgcModel> lgc;
  std::optional<CosineModel> cosine;

  const std::vector<std::string>& labels() const {
    return lgc ? lgc->labels() : cosine->labels();
  }
};

// Enrollment rows are the enroll split when present, else the train split,
// restricted to the first cfg.enroll_speakers speakers (sorted) and the
// first cfg.enroll_reps rows per (phrase, speaker) in manifest order.
std::vector<const ManifestRow*> select_enrollment_rows(const Manifest& manifest,
                                                       const ExperimentConfig& cfg);

// Fits the configured backend on the enrollment rows' i-vectors.
// external_cov overrides cfg.lgc_cov_file when non-null.
BackendModels enroll_backend(const Manifest& manifest, const IvectorArchive& ivectors,
                             const ExperimentConfig& cfg,
                             const Eigen::MatrixXd* external_cov = nullptr);

// Scores every eval trial under a fitted backend.  LGC scores are class
// posteriors; cosine scores optionally get Max-Norm.
TrialOutcome score_with_backend(const Manifest& manifest, const IvectorArchive& ivectors,
                                const ExperimentConfig& cfg, const BackendModels& models);

// enroll_backend + score_with_backend.
TrialOutcome score_trials(const Manifest& manifest, const IvectorArchive& ivectors,
                          const ExperimentConfig& cfg,
                          const Eigen::MatrixXd* external_cov = nullptr);

struct MetricsReport {
  double eer = 0.0;
  double classification_error = 0.0;
  std::map<std::string, double> per_phrase_eer;
  std::vector<std::string> warnings;
  int num_target_trials = 0;
  int num_nontarget_trials = 0;
};

MetricsReport compute_metrics(const TrialOutcome& outcome);

// Serializes a metrics report (plus config echo and artifact hashes) as the
// deterministic JSON summary.
std::string metrics_to_json(const MetricsReport& metrics,
                            const std::map<std::string, std::string>& config_echo,
                            const std::map<std::string, std::string>& artifact_hashes);

struct RunResult {
  MetricsReport metrics;
  std::map<std::string, double> stage_seconds;
  std::map<std::string, std::string> artifact_hashes;
};

// The full experiment: features -> alignment model -> stats -> TV ->
// i-vectors -> enrollment -> trial scoring -> metrics.  Artifacts are written
// under cfg.workdir with SHA-256 content hashes recorded in metrics.json;
// per-stage timings go to run_log.txt (kept out of metrics.json so reruns are
// bit-identical).  Stage failures abort with a stage-tagged error.
RunResult run_experiment(const ExperimentConfig& cfg);

// CSV export of raw i-vectors: header, then one row per utterance with id,
// phrase, speaker and the R coordinates at 17 significant digits.
void export_ivectors_csv(const IvectorArchive& archive, const Manifest& manifest,
                         const std::string& out_path);

}  // namespace pk

#endif  // PHRASEKIT_EXPERIMENT_HPP

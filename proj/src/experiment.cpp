// phrasekit/experiment.cpp

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

#include "phrasekit/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "phrasekit/common.hpp"
#include "phrasekit/io_util.hpp"
#include "phrasekit/parallel.hpp"
#include "phrasekit/wav.hpp"

namespace fs = std::filesystem;

namespace pk {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const Config& c) {
  ExperimentConfig e;
  e.manifest_path = c.get_string("manifest", "");
  e.workdir = c.get_string("workdir", "");
  e.mfcc.window_length = c.get_double("mfcc.window_length", e.mfcc.window_length);
  e.mfcc.frame_shift = c.get_double("mfcc.frame_shift", e.mfcc.frame_shift);
  e.mfcc.num_mel_filters =
      static_cast<int>(c.get_int("mfcc.num_mel_filters", e.mfcc.num_mel_filters));
  e.mfcc.num_cepstra = static_cast<int>(c.get_int("mfcc.num_cepstra", e.mfcc.num_cepstra));
  e.mfcc.preemphasis = c.get_double("mfcc.preemphasis", e.mfcc.preemphasis);
  e.mfcc.delta_window = static_cast<int>(c.get_int("mfcc.delta_window", e.mfcc.delta_window));
  e.mfcc.apply_cmvn = c.get_bool("mfcc.cmvn", e.mfcc.apply_cmvn);
  e.mfcc.vad = c.get_bool("mfcc.vad", e.mfcc.vad);
  e.mfcc.vad_threshold_db = c.get_double("mfcc.vad_threshold_db", e.mfcc.vad_threshold_db);
  e.alignment = c.get_string("alignment", e.alignment);
  e.backend = c.get_string("backend", e.backend);
  e.normalization = c.get_string("normalization", e.normalization);
  e.ubm_components = static_cast<int>(c.get_int("ubm.components", e.ubm_components));
  e.ubm_iters = static_cast<int>(c.get_int("ubm.iters", e.ubm_iters));
  e.mono_states = static_cast<int>(c.get_int("mono.states", e.mono_states));
  e.mono_comps = static_cast<int>(c.get_int("mono.comps_per_state", e.mono_comps));
  e.mono_iters = static_cast<int>(c.get_int("mono.iters", e.mono_iters));
  e.uv2_states = static_cast<int>(c.get_int("uv2.states", e.uv2_states));
  e.tv_rank = static_cast<int>(c.get_int("tv.rank", e.tv_rank));
  e.tv_iters = static_cast<int>(c.get_int("tv.iters", e.tv_iters));
  e.relevance_factor = c.get_double("relevance_factor", e.relevance_factor);
  e.shrinkage = c.get_double("lgc.shrinkage", e.shrinkage);
  e.lgc_cov_file = c.get_string("lgc.cov_file", e.lgc_cov_file);
  e.enroll_speakers = static_cast<int>(c.get_int("enroll.speakers", e.enroll_speakers));
  e.enroll_reps = static_cast<int>(c.get_int("enroll.reps", e.enroll_reps));
  e.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<std::int64_t>(e.seed)));
  e.threads = static_cast<int>(c.get_int("threads", e.threads));
  return e;
}

void ExperimentConfig::validate() const {
  PK_CHECK(alignment == "gmm" || alignment == "hmm", "bad-config",
           "alignment must be gmm or hmm, got '" << alignment << "'");
  PK_CHECK(backend == "lgc" || backend == "cosine", "bad-config",
           "backend must be lgc or cosine, got '" << backend << "'");
  PK_CHECK(normalization == "none" || normalization == "max-norm", "bad-config",
           "normalization must be none or max-norm, got '" << normalization << "'");
  PK_CHECK(!(backend == "lgc" && normalization == "max-norm"), "bad-config",
           "max-norm applies to cosine scores; LGC scores are posteriors");
  PK_CHECK(ubm_components >= 1 && ubm_iters >= 1 && tv_rank >= 1 && tv_iters >= 1 &&
               mono_states >= 1 && mono_comps >= 1 && mono_iters >= 1 && uv2_states >= 1,
           "bad-config", "model sizes and iteration counts must be positive");
  PK_CHECK(relevance_factor >= 0.0, "bad-config", "relevance factor must be >= 0");
  PK_CHECK(shrinkage >= 0.0 && shrinkage <= 1.0, "bad-config", "shrinkage in [0,1]");
  PK_CHECK(enroll_speakers >= 0 && enroll_reps >= 0, "bad-config",
           "enrollment restrictions must be >= 0");
  if (!lgc_cov_file.empty())
    PK_CHECK(fs::exists(lgc_cov_file), "bad-config",
             "lgc.cov_file does not exist: " << lgc_cov_file);
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  std::map<std::string, std::string> m;
  m["manifest"] = manifest_path;
  m["workdir"] = workdir;
  m["mfcc.window_length"] = fmt_double(mfcc.window_length);
  m["mfcc.frame_shift"] = fmt_double(mfcc.frame_shift);
  m["mfcc.num_mel_filters"] = std::to_string(mfcc.num_mel_filters);
  m["mfcc.num_cepstra"] = std::to_string(mfcc.num_cepstra);
  m["mfcc.preemphasis"] = fmt_double(mfcc.preemphasis);
  m["mfcc.delta_window"] = std::to_string(mfcc.delta_window);
  m["mfcc.cmvn"] = mfcc.apply_cmvn ? "true" : "false";
  m["mfcc.vad"] = mfcc.vad ? "true" : "false";
  m["mfcc.vad_threshold_db"] = fmt_double(mfcc.vad_threshold_db);
  m["alignment"] = alignment;
  m["backend"] = backend;
  m["normalization"] = normalization;
  m["ubm.components"] = std::to_string(ubm_components);
  m["ubm.iters"] = std::to_string(ubm_iters);
  m["mono.states"] = std::to_string(mono_states);
  m["mono.comps_per_state"] = std::to_string(mono_comps);
  m["mono.iters"] = std::to_string(mono_iters);
  m["uv2.states"] = std::to_string(uv2_states);
  m["tv.rank"] = std::to_string(tv_rank);
  m["tv.iters"] = std::to_string(tv_iters);
  m["relevance_factor"] = fmt_double(relevance_factor);
  m["lgc.shrinkage"] = fmt_double(shrinkage);
  m["lgc.cov_file"] = lgc_cov_file;
  m["enroll.speakers"] = std::to_string(enroll_speakers);
  m["enroll.reps"] = std::to_string(enroll_reps);
  m["seed"] = std::to_string(seed);
  return m;
}

std::map<std::string, FeatureMatrix> compute_all_features(const Manifest& manifest,
                                                          const MfccConfig& mfcc) {
  std::vector<FeatureMatrix> slots(manifest.rows.size());
  parallel_for(manifest.rows.size(), [&](std::size_t i) {
    const ManifestRow& row = manifest.rows[i];
    const std::string path = manifest.resolve_path(row);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".wav") {
      const AudioBuffer audio = read_wav(path);
      slots[i] = quantize_to_f32(extract_features(audio, mfcc));
    } else {
      slots[i] = read_features(path);  // external feature ingestion (PKFT)
    }
  });
  std::map<std::string, FeatureMatrix> out;
  const int dim0 = slots.empty() ? 0 : slots[0].dim();
  for (std::size_t i = 0; i < manifest.rows.size(); ++i) {
    PK_CHECK(slots[i].dim() == dim0, "dim-mismatch",
             "utterance '" << manifest.rows[i].utt_id << "' has dim " << slots[i].dim()
                           << ", expected " << dim0);
    out.emplace(manifest.rows[i].utt_id, std::move(slots[i]));
  }
  return out;
}

namespace {

std::vector<FeatureMatrix> gather_features(
    const Manifest& manifest, const std::map<std::string, FeatureMatrix>& features,
    Split split) {
  std::vector<FeatureMatrix> out;
  for (const auto* row : manifest.rows_in(split)) out.push_back(features.at(row->utt_id));
  return out;
}

std::string transcript_key(const std::vector<std::string>& transcript) {
  std::string key;
  for (const auto& ph : transcript) {
    key += ph;
    key += '\x1f';
  }
  return key;
}

// Stats for every manifest row under the pipeline's alignment model,
// in manifest order.
std::vector<SufficientStats> compute_stats(const Pipeline& p, const Manifest& manifest,
                                           const std::map<std::string, FeatureMatrix>& features) {
  std::vector<SufficientStats> stats(manifest.rows.size());
  if (!p.use_hmm) {
    parallel_for(manifest.rows.size(), [&](std::size_t i) {
      stats[i] = collect_stats_gmm(p.ubm, features.at(manifest.rows[i].utt_id));
    });
    return stats;
  }
  std::map<std::string, PhraseHmm> cache;
  for (const auto& row : manifest.rows) {
    PK_CHECK(!row.transcript.empty(), "bad-config",
             "HMM alignment needs a transcript for utterance '" << row.utt_id << "'");
    const std::string key = transcript_key(row.transcript);
    if (!cache.count(key)) cache[key] = compose_phrase_hmm(p.mono, row.transcript);
  }
  parallel_for(manifest.rows.size(), [&](std::size_t i) {
    const auto& row = manifest.rows[i];
    stats[i] = collect_stats_hmm(p.mono, cache.at(transcript_key(row.transcript)),
                                 features.at(row.utt_id));
  });
  return stats;
}

const Eigen::MatrixXd& alignment_sigma(const Pipeline& p) {
  return p.use_hmm ? p.mono.inventory.variances : p.ubm.variances;
}

IvectorArchive extract_archive(const Pipeline& p, const Manifest& manifest,
                               const std::vector<SufficientStats>& stats) {
  IvectorArchive archive;
  archive.rank = p.tv.rank();
  archive.entries.resize(manifest.rows.size());
  const AlignmentSource src = p.use_hmm ? AlignmentSource::kHmm : AlignmentSource::kGmm;
  std::vector<Eigen::VectorXd> slots(manifest.rows.size());
  parallel_for(manifest.rows.size(), [&](std::size_t i) {
    slots[i] = extract_ivector(p.tv, stats[i], src).w;
  });
  for (std::size_t i = 0; i < manifest.rows.size(); ++i)
    archive.entries[i] = {manifest.rows[i].utt_id, std::move(slots[i])};
  return archive;
}

}  // namespace

Pipeline build_pipeline(const ExperimentConfig& cfg, const Manifest& manifest) {
  cfg.validate();
  Pipeline p;
  p.use_hmm = cfg.alignment == "hmm";
  p.features = compute_all_features(manifest, cfg.mfcc);

  const auto train_rows = manifest.rows_in(Split::kTrain);
  PK_CHECK(!train_rows.empty(), "bad-config", "manifest has no train rows");
  const std::vector<FeatureMatrix> train_features =
      gather_features(manifest, p.features, Split::kTrain);

  if (p.use_hmm) {
    std::vector<std::vector<std::string>> transcripts;
    for (const auto* row : train_rows) {
      PK_CHECK(!row->transcript.empty(), "bad-config",
               "HMM alignment needs transcripts; missing for '" << row->utt_id << "'");
      transcripts.push_back(row->transcript);
    }
    p.mono = train_monophones(train_features, transcripts, cfg.mono_states,
                              cfg.mono_comps, cfg.mono_iters);
  } else {
    p.ubm = train_ubm(train_features, cfg.ubm_components, cfg.ubm_iters, cfg.seed);
  }

  const std::vector<SufficientStats> stats = compute_stats(p, manifest, p.features);
  std::vector<SufficientStats> train_stats;
  for (std::size_t i = 0; i < manifest.rows.size(); ++i)
    if (manifest.rows[i].split == Split::kTrain) train_stats.push_back(stats[i]);

  p.tv = train_tv(train_stats, alignment_sigma(p), cfg.tv_rank, cfg.tv_iters, cfg.seed);
  p.ivectors = extract_archive(p, manifest, stats);
  return p;
}

IvectorArchive extract_with_models(const Pipeline& pipeline, const Manifest& other,
                                   const MfccConfig& mfcc) {
  Pipeline scratch;
  scratch.use_hmm = pipeline.use_hmm;
  scratch.ubm = pipeline.ubm;
  scratch.mono = pipeline.mono;
  scratch.tv = pipeline.tv;
  const auto features = compute_all_features(other, mfcc);
  const auto stats = compute_stats(scratch, other, features);
  return extract_archive(scratch, other, stats);
}

std::vector<const ManifestRow*> select_enrollment_rows(const Manifest& manifest,
                                                       const ExperimentConfig& cfg) {
  std::vector<const ManifestRow*> rows = manifest.rows_in(Split::kEnroll);
  if (rows.empty()) rows = manifest.rows_in(Split::kTrain);
  PK_CHECK(!rows.empty(), "bad-config", "no enrollment rows (enroll or train split)");

  if (cfg.enroll_speakers > 0) {
    std::set<std::string> speakers;
    for (const auto* r : rows) speakers.insert(r->speaker);
    std::set<std::string> kept;
    for (const auto& s : speakers) {
      if (static_cast<int>(kept.size()) >= cfg.enroll_speakers) break;
      kept.insert(s);
    }
    std::vector<const ManifestRow*> filtered;
    for (const auto* r : rows)
      if (kept.count(r->speaker)) filtered.push_back(r);
    rows = std::move(filtered);
  }
  if (cfg.enroll_reps > 0) {
    std::map<std::pair<std::string, std::string>, int> count;
    std::vector<const ManifestRow*> filtered;
    for (const auto* r : rows)
      if (count[{r->phrase, r->speaker}]++ < cfg.enroll_reps) filtered.push_back(r);
    rows = std::move(filtered);
  }
  PK_CHECK(!rows.empty(), "bad-config", "enrollment restrictions left no rows");
  return rows;
}

BackendModels enroll_backend(const Manifest& manifest, const IvectorArchive& ivectors,
                             const ExperimentConfig& cfg,
                             const Eigen::MatrixXd* external_cov) {
  std::vector<std::pair<std::string, Eigen::VectorXd>> labeled;
  for (const auto* row : select_enrollment_rows(manifest, cfg)) {
    const Eigen::VectorXd* w = ivectors.find(row->utt_id);
    PK_CHECK(w != nullptr, "id-mismatch",
             "no i-vector for enrollment utterance '" << row->utt_id << "'");
    labeled.emplace_back(row->phrase, *w);
  }

  BackendModels models;
  if (cfg.backend == "lgc") {
    if (external_cov != nullptr)
      models.lgc = LgcModel::fit_with_covariance(labeled, *external_cov);
    else if (!cfg.lgc_cov_file.empty())
      models.lgc = LgcModel::fit_with_covariance(labeled,
                                                 LgcModel::load(cfg.lgc_cov_file).covariance());
    else
      models.lgc = LgcModel::fit(labeled, cfg.shrinkage);
  } else {
    models.cosine = CosineModel::fit(labeled);
  }
  return models;
}

TrialOutcome score_with_backend(const Manifest& manifest, const IvectorArchive& ivectors,
                                const ExperimentConfig& cfg, const BackendModels& models) {
  const auto eval_rows = manifest.rows_in(Split::kEval);
  PK_CHECK(!eval_rows.empty(), "bad-config", "manifest has no eval rows");

  const std::vector<std::string>& labels = models.labels();
  std::map<std::string, int> label_index;
  for (std::size_t i = 0; i < labels.size(); ++i)
    label_index[labels[i]] = static_cast<int>(i);

  TrialOutcome outcome;
  outcome.enrolled_phrases = labels;
  outcome.norm = cfg.backend == "lgc"
                     ? ScoreNorm::kPosterior
                     : (cfg.normalization == "max-norm" ? ScoreNorm::kMaxNorm
                                                        : ScoreNorm::kNone);

  std::vector<std::pair<std::string, std::string>> eval_utts;
  for (const auto* row : eval_rows) eval_utts.emplace_back(row->utt_id, row->phrase);
  const std::vector<Trial> trials = make_trials(eval_utts, labels);

  std::map<std::string, Eigen::VectorXd> scores_by_utt;
  for (const auto* row : eval_rows) {
    const Eigen::VectorXd* w = ivectors.find(row->utt_id);
    PK_CHECK(w != nullptr, "id-mismatch",
             "no i-vector for eval utterance '" << row->utt_id << "'");
    ScoreVector sv = models.lgc ? models.lgc->posteriors(*w) : models.cosine->scores(*w);
    if (outcome.norm == ScoreNorm::kMaxNorm) sv = max_norm(sv);
    scores_by_utt[row->utt_id] = sv.scores;
    outcome.predictions.emplace_back(labels[classify(sv)], row->phrase);
  }

  outcome.scores.reserve(trials.size());
  for (const auto& trial : trials) {
    TrialScore ts;
    ts.trial = trial;
    ts.score = scores_by_utt.at(trial.utt_id)[label_index.at(trial.claimed_phrase)];
    outcome.scores.push_back(std::move(ts));
  }
  return outcome;
}

TrialOutcome score_trials(const Manifest& manifest, const IvectorArchive& ivectors,
                          const ExperimentConfig& cfg,
                          const Eigen::MatrixXd* external_cov) {
  return score_with_backend(manifest, ivectors, cfg,
                            enroll_backend(manifest, ivectors, cfg, external_cov));
}

MetricsReport compute_metrics(const TrialOutcome& outcome) {
  MetricsReport report;
  report.eer = compute_eer(outcome.scores);
  report.classification_error = classification_error(outcome.predictions);
  for (const auto& ts : outcome.scores)
    (ts.trial.target ? report.num_target_trials : report.num_nontarget_trials) += 1;

  for (const auto& phrase : outcome.enrolled_phrases) {
    std::vector<double> tar, non;
    for (const auto& ts : outcome.scores) {
      if (ts.trial.claimed_phrase != phrase) continue;
      (ts.trial.target ? tar : non).push_back(ts.score);
    }
    if (!tar.empty() && !non.empty())
      report.per_phrase_eer[phrase] = compute_eer_from_scores(tar, non);
  }

  if (outcome.norm != ScoreNorm::kNone)
    report.warnings.push_back(
        "pooled-eer-on-close-set-scores: scores were normalized across enrolled "
        "phrases (max-norm or posterior); pooled EER is not an open-set measure");
  return report;
}

std::string metrics_to_json(const MetricsReport& metrics,
                            const std::map<std::string, std::string>& config_echo,
                            const std::map<std::string, std::string>& artifact_hashes) {
  nlohmann::json j;
  j["metrics"]["eer"] = metrics.eer;
  j["metrics"]["classification_error"] = metrics.classification_error;
  j["metrics"]["num_target_trials"] = metrics.num_target_trials;
  j["metrics"]["num_nontarget_trials"] = metrics.num_nontarget_trials;
  for (const auto& [phrase, eer] : metrics.per_phrase_eer)
    j["metrics"]["per_phrase_eer"][phrase] = eer;
  j["warnings"] = metrics.warnings;
  j["config"] = config_echo;
  j["artifacts"] = artifact_hashes;
  return j.dump(2) + "\n";
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  PK_CHECK(!cfg.manifest_path.empty(), "bad-config", "manifest path required");
  PK_CHECK(!cfg.workdir.empty(), "bad-config", "workdir required");
  set_num_threads(cfg.threads);
  fs::create_directories(cfg.workdir);
  fs::create_directories(fs::path(cfg.workdir) / "features");
  fs::create_directories(fs::path(cfg.workdir) / "stats");

  RunResult result;
  auto timed = [&](const std::string& name, const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const Error& e) {
      PK_ERR("stage-" + name, e.what());
    } catch (const std::exception& e) {
      PK_ERR("stage-" + name, e.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    result.stage_seconds[name] = std::chrono::duration<double>(t1 - t0).count();
  };

  auto hash_artifact = [&](const std::string& rel) {
    result.artifact_hashes[rel] = sha256_file_hex((fs::path(cfg.workdir) / rel).string());
  };
  // Directories of many small files get one aggregate hash over the sorted
  // per-file digests.
  auto hash_directory = [&](const std::string& rel) {
    std::vector<std::string> lines;
    for (const auto& entry : fs::directory_iterator(fs::path(cfg.workdir) / rel))
      lines.push_back(entry.path().filename().string() + ":" +
                      sha256_file_hex(entry.path().string()));
    std::sort(lines.begin(), lines.end());
    std::string joined;
    for (const auto& l : lines) joined += l + "\n";
    result.artifact_hashes[rel + "/"] = sha256_string_hex(joined);
  };

  Manifest manifest;
  timed("load-manifest", [&] { manifest = load_manifest(cfg.manifest_path); });

  Pipeline p;
  p.use_hmm = cfg.alignment == "hmm";
  timed("features", [&] {
    p.features = compute_all_features(manifest, cfg.mfcc);
    for (const auto& row : manifest.rows)
      write_features((fs::path(cfg.workdir) / "features" / (row.utt_id + ".pkft")).string(),
                     p.features.at(row.utt_id));
    hash_directory("features");
  });

  timed("alignment-model", [&] {
    const auto train_rows = manifest.rows_in(Split::kTrain);
    PK_CHECK(!train_rows.empty(), "bad-config", "manifest has no train rows");
    const std::vector<FeatureMatrix> train_features =
        gather_features(manifest, p.features, Split::kTrain);
    if (p.use_hmm) {
      std::vector<std::vector<std::string>> transcripts;
      for (const auto* row : train_rows) transcripts.push_back(row->transcript);
      p.mono = train_monophones(train_features, transcripts, cfg.mono_states,
                                cfg.mono_comps, cfg.mono_iters);
      write_monophone_set((fs::path(cfg.workdir) / "mono.pkhm").string(), p.mono);
      hash_artifact("mono.pkhm");
    } else {
      p.ubm = train_ubm(train_features, cfg.ubm_components, cfg.ubm_iters, cfg.seed);
      write_gmm((fs::path(cfg.workdir) / "ubm.pkgm").string(), p.ubm);
      hash_artifact("ubm.pkgm");
    }
  });

  std::vector<SufficientStats> stats;
  timed("stats", [&] {
    stats = compute_stats(p, manifest, p.features);
    for (std::size_t i = 0; i < manifest.rows.size(); ++i)
      write_stats(
          (fs::path(cfg.workdir) / "stats" / (manifest.rows[i].utt_id + ".pkst")).string(),
          stats[i]);
    hash_directory("stats");
  });

  timed("train-tv", [&] {
    std::vector<SufficientStats> train_stats;
    for (std::size_t i = 0; i < manifest.rows.size(); ++i)
      if (manifest.rows[i].split == Split::kTrain) train_stats.push_back(stats[i]);
    p.tv = train_tv(train_stats, alignment_sigma(p), cfg.tv_rank, cfg.tv_iters, cfg.seed);
    write_tv((fs::path(cfg.workdir) / "tv.pktv").string(), p.tv);
    hash_artifact("tv.pktv");
  });

  timed("extract", [&] {
    p.ivectors = extract_archive(p, manifest, stats);
    write_ivector_archive((fs::path(cfg.workdir) / "ivectors.pkiv").string(), p.ivectors);
    hash_artifact("ivectors.pkiv");
  });

  TrialOutcome outcome;
  timed("enroll-score", [&] {
    const BackendModels models = enroll_backend(manifest, p.ivectors, cfg, nullptr);
    if (models.lgc) {
      models.lgc->save((fs::path(cfg.workdir) / "backend.pklg").string());
      hash_artifact("backend.pklg");
    } else {
      models.cosine->save((fs::path(cfg.workdir) / "backend.pkcs").string());
      hash_artifact("backend.pkcs");
    }
    outcome = score_with_backend(manifest, p.ivectors, cfg, models);
    write_score_file((fs::path(cfg.workdir) / "scores.txt").string(), outcome.scores,
                     outcome.norm);
    hash_artifact("scores.txt");
  });

  timed("evaluate", [&] { result.metrics = compute_metrics(outcome); });

  write_text_file((fs::path(cfg.workdir) / "metrics.json").string(),
                  metrics_to_json(result.metrics, cfg.echo(), result.artifact_hashes));

  std::ostringstream log;
  log << "stage timings (seconds)\n";
  for (const auto& [stage, secs] : result.stage_seconds)
    log << "  " << stage << ": " << secs << "\n";
  write_text_file((fs::path(cfg.workdir) / "run_log.txt").string(), log.str());
  return result;
}

void export_ivectors_csv(const IvectorArchive& archive, const Manifest& manifest,
                         const std::string& out_path) {
  std::map<std::string, const ManifestRow*> by_id;
  for (const auto& row : manifest.rows) by_id[row.utt_id] = &row;

  std::ostringstream ss;
  ss << "utt_id,phrase,speaker";
  for (int r = 0; r < archive.rank; ++r) ss << ",w" << r;
  ss << "\n";
  for (const auto& [id, w] : archive.entries) {
    const auto it = by_id.find(id);
    PK_CHECK(it != by_id.end(), "id-mismatch",
             "archive utterance '" << id << "' not in manifest");
    ss << id << ',' << it->second->phrase << ',' << it->second->speaker;
    char buf[64];
    for (int r = 0; r < archive.rank; ++r) {
      std::snprintf(buf, sizeof(buf), "%.17g", w[r]);
      ss << ',' << buf;
    }
    ss << "\n";
  }
  write_text_file(out_path, ss.str());
}

}  // namespace pk

// phrasekit/tools/main.cpp

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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include <CLI11.hpp>

#include "phrasekit/baselines.hpp"
#include "phrasekit/common.hpp"
#include "phrasekit/config.hpp"
#include "phrasekit/eval.hpp"
#include "phrasekit/experiment.hpp"
#include "phrasekit/io_util.hpp"
#include "phrasekit/manifest.hpp"
#include "phrasekit/parallel.hpp"
#include "phrasekit/synth.hpp"

namespace fs = std::filesystem;

namespace {

// Every subcommand accepts --config <file>; config keys fill in options the
// user did not pass on the command line.
class Bind {
 public:
  explicit Bind(CLI::App* sub) {
    sub_ = sub;
    sub->add_option("--config", config_path_,
                    "flat key = value config file providing option defaults");
  }

  template <class T>
  CLI::Option* opt(const std::string& flag, const std::string& key, T& var,
                   const std::string& desc) {
    CLI::Option* o = sub_->add_option(flag, var, desc);
    appliers_.push_back([o, key, &var](const pk::Config& c) {
      if (o->count() == 0 && c.has(key)) assign(c, key, var);
    });
    return o;
  }

  CLI::Option* flag(const std::string& flag_name, const std::string& key, bool& var,
                    const std::string& desc) {
    CLI::Option* o = sub_->add_flag(flag_name, var, desc);
    appliers_.push_back([o, key, &var](const pk::Config& c) {
      if (o->count() == 0 && c.has(key)) var = c.get_bool(key, var);
    });
    return o;
  }

  // Call at the top of the subcommand handler.
  pk::Config finalize() {
    pk::Config c;
    if (!config_path_.empty()) c = pk::Config::load(config_path_);
    for (const auto& apply : appliers_) apply(c);
    return c;
  }

 private:
  static void assign(const pk::Config& c, const std::string& key, std::string& var) {
    var = c.get_string(key, var);
  }
  static void assign(const pk::Config& c, const std::string& key, int& var) {
    var = static_cast<int>(c.get_int(key, var));
  }
  static void assign(const pk::Config& c, const std::string& key, std::uint64_t& var) {
    var = static_cast<std::uint64_t>(c.get_int(key, static_cast<std::int64_t>(var)));
  }
  static void assign(const pk::Config& c, const std::string& key, double& var) {
    var = c.get_double(key, var);
  }

  CLI::App* sub_;
  std::string config_path_;
  std::vector<std::function<void(const pk::Config&)>> appliers_;
};

struct MfccOpts {
  pk::MfccConfig cfg;
  bool cmvn = true;
  bool vad = false;

  void add(Bind& b) {
    b.opt("--window-length", "mfcc.window_length", cfg.window_length, "analysis window (s)");
    b.opt("--frame-shift", "mfcc.frame_shift", cfg.frame_shift, "frame shift (s)");
    b.opt("--mel-filters", "mfcc.num_mel_filters", cfg.num_mel_filters, "mel filter count");
    b.opt("--cepstra", "mfcc.num_cepstra", cfg.num_cepstra, "cepstra incl. c0");
    b.opt("--preemphasis", "mfcc.preemphasis", cfg.preemphasis, "pre-emphasis coefficient");
    b.opt("--delta-window", "mfcc.delta_window", cfg.delta_window, "delta regression window");
    b.flag("--cmvn,!--no-cmvn", "mfcc.cmvn", cmvn, "per-utterance mean/variance normalization");
    b.flag("--vad,!--no-vad", "mfcc.vad", vad, "energy-based frame dropping (default off)");
    b.opt("--vad-threshold-db", "mfcc.vad_threshold_db", cfg.vad_threshold_db,
          "VAD energy threshold below utterance max");
  }

  pk::MfccConfig build() const {
    pk::MfccConfig c = cfg;
    c.apply_cmvn = cmvn;
    c.vad = vad;
    return c;
  }
};

std::vector<pk::FeatureMatrix> features_of_split(
    const pk::Manifest& manifest, const std::map<std::string, pk::FeatureMatrix>& feats,
    pk::Split split) {
  std::vector<pk::FeatureMatrix> out;
  for (const auto* row : manifest.rows_in(split)) out.push_back(feats.at(row->utt_id));
  return out;
}

pk::Split parse_split(const std::string& s) { return pk::split_from_name(s); }

// Appends one phrase's UV2 model, offsetting its component ids into the
// merged inventory.
void merge_monophone_set(pk::MonophoneSet* merged, const pk::MonophoneSet& part) {
  const int base = merged->phones.empty() ? 0 : merged->inventory.size();
  if (merged->phones.empty()) {
    merged->inventory = part.inventory;
  } else {
    pk::GaussianInventory inv;
    inv.means.resize(base + part.inventory.size(), part.inventory.dim());
    inv.variances.resize(base + part.inventory.size(), part.inventory.dim());
    inv.means.topRows(base) = merged->inventory.means;
    inv.variances.topRows(base) = merged->inventory.variances;
    inv.means.bottomRows(part.inventory.size()) = part.inventory.means;
    inv.variances.bottomRows(part.inventory.size()) = part.inventory.variances;
    merged->inventory = std::move(inv);
  }
  for (const auto& phone : part.phones) {
    pk::Monophone copy = phone;
    for (auto& st : copy.states)
      for (auto& id : st.gmm.component_ids) id += base;
    merged->phones.push_back(std::move(copy));
  }
}

void print_metrics_block(const pk::MetricsReport& m) {
  std::printf("eer: %.6f\n", m.eer);
  std::printf("classification_error: %.6f\n", m.classification_error);
  std::printf("num_target_trials: %d\n", m.num_target_trials);
  std::printf("num_nontarget_trials: %d\n", m.num_nontarget_trials);
  for (const auto& [phrase, eer] : m.per_phrase_eer)
    std::printf("per_phrase_eer.%s: %.6f\n", phrase.c_str(), eer);
  for (const auto& w : m.warnings) std::printf("warning: %s\n", w.c_str());
}

std::string detect_magic(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  PK_CHECK(is.good(), "io", "cannot open " << path);
  char magic[4] = {0, 0, 0, 0};
  is.read(magic, 4);
  return std::string(magic, 4);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phrasekit: spoken pass-phrase classification and verification"};
  app.require_subcommand(1);

  // ---------------------------------------------------------------- synth
  struct SynthOpts {
    std::string out;
    std::uint64_t seed = 1;
    int num_phrases = 10;
    int train_speakers = 20, train_reps = 3;
    int eval_speakers = 0, eval_reps = 2;
    int sample_rate = 16000, alphabet = 16;
    double snr_db = 20.0;
    double speaker_formant_sigma = 0.04, speaker_duration_sigma = 0.08;
    std::unique_ptr<Bind> bind;
  };
  auto synth_opts = std::make_shared<SynthOpts>();
  {
    auto* sub = app.add_subcommand("synth", "generate a synthetic pass-phrase corpus");
    synth_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *synth_opts->bind;
    b.opt("--out", "synth.out", synth_opts->out, "output directory")->required();
    b.opt("--seed", "seed", synth_opts->seed, "corpus seed");
    b.opt("--num-phrases", "synth.num_phrases", synth_opts->num_phrases, "pass-phrase count");
    b.opt("--train-speakers", "synth.train_speakers", synth_opts->train_speakers,
          "speakers in the train split");
    b.opt("--train-reps", "synth.train_reps", synth_opts->train_reps,
          "repetitions per train speaker/phrase");
    b.opt("--eval-speakers", "synth.eval_speakers", synth_opts->eval_speakers,
          "disjoint speakers in the eval split (0 = none)");
    b.opt("--eval-reps", "synth.eval_reps", synth_opts->eval_reps,
          "repetitions per eval speaker/phrase");
    b.opt("--snr-db", "synth.snr_db", synth_opts->snr_db, "additive noise SNR");
    b.opt("--sample-rate", "synth.sample_rate", synth_opts->sample_rate, "Hz");
    b.opt("--alphabet", "synth.alphabet", synth_opts->alphabet, "segment label count");
    b.opt("--speaker-formant-sigma", "synth.speaker_formant_sigma",
          synth_opts->speaker_formant_sigma, "speaker envelope spread (log scale)");
    b.opt("--speaker-duration-sigma", "synth.speaker_duration_sigma",
          synth_opts->speaker_duration_sigma, "speaker tempo spread (log scale)");
    sub->callback([synth_opts] {
      synth_opts->bind->finalize();
      pk::SynthConfig cfg;
      cfg.seed = synth_opts->seed;
      cfg.num_phrases = synth_opts->num_phrases;
      cfg.sample_rate = synth_opts->sample_rate;
      cfg.snr_db = synth_opts->snr_db;
      cfg.alphabet_size = synth_opts->alphabet;
      cfg.speaker_formant_sigma = synth_opts->speaker_formant_sigma;
      cfg.speaker_duration_sigma = synth_opts->speaker_duration_sigma;
      cfg.groups.push_back(
          {synth_opts->train_speakers, synth_opts->train_reps, pk::Split::kTrain});
      if (synth_opts->eval_speakers > 0)
        cfg.groups.push_back(
            {synth_opts->eval_speakers, synth_opts->eval_reps, pk::Split::kEval});
      const pk::Manifest m = pk::generate_synthetic_corpus_ex(cfg, synth_opts->out);
      std::printf("wrote %zu utterances under %s\n", m.rows.size(),
                  synth_opts->out.c_str());
    });
  }

  // ------------------------------------------------------------- features
  struct FeaturesOpts {
    std::string manifest, out_dir;
    int threads = 0;
    MfccOpts mfcc;
    std::unique_ptr<Bind> bind;
  };
  auto feat_opts = std::make_shared<FeaturesOpts>();
  {
    auto* sub = app.add_subcommand("features", "extract MFCC features to PKFT files");
    feat_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *feat_opts->bind;
    b.opt("--manifest", "manifest", feat_opts->manifest, "input manifest")->required();
    b.opt("--out-dir", "features.out_dir", feat_opts->out_dir, "output directory")->required();
    b.opt("--threads", "threads", feat_opts->threads, "worker threads (0 = cores)");
    feat_opts->mfcc.add(b);
    sub->callback([feat_opts] {
      feat_opts->bind->finalize();
      pk::set_num_threads(feat_opts->threads);
      const pk::Manifest manifest = pk::load_manifest(feat_opts->manifest);
      const auto feats = pk::compute_all_features(manifest, feat_opts->mfcc.build());
      fs::create_directories(feat_opts->out_dir);
      pk::Manifest out = manifest;
      out.base_dir = feat_opts->out_dir;
      for (auto& row : out.rows) {
        const std::string rel = row.utt_id + ".pkft";
        pk::write_features((fs::path(feat_opts->out_dir) / rel).string(),
                           feats.at(row.utt_id));
        row.path = rel;
      }
      pk::save_manifest((fs::path(feat_opts->out_dir) / "manifest.tsv").string(), out);
      std::printf("wrote %zu feature files under %s\n", out.rows.size(),
                  feat_opts->out_dir.c_str());
    });
  }

  // ------------------------------------------------------------- train-ubm
  struct TrainUbmOpts {
    std::string manifest, out, split = "train";
    int components = 64, iters = 10, threads = 0;
    std::uint64_t seed = 1;
    MfccOpts mfcc;
    std::unique_ptr<Bind> bind;
  };
  auto ubm_opts = std::make_shared<TrainUbmOpts>();
  {
    auto* sub = app.add_subcommand("train-ubm", "EM-train the diagonal GMM UBM");
    ubm_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *ubm_opts->bind;
    b.opt("--manifest", "manifest", ubm_opts->manifest, "manifest")->required();
    b.opt("--out", "ubm.out", ubm_opts->out, "output PKGM path")->required();
    b.opt("--components", "ubm.components", ubm_opts->components, "Gaussian count");
    b.opt("--iters", "ubm.iters", ubm_opts->iters, "final EM iterations");
    b.opt("--seed", "seed", ubm_opts->seed, "seed");
    b.opt("--split", "ubm.split", ubm_opts->split, "split to train on");
    b.opt("--threads", "threads", ubm_opts->threads, "worker threads");
    ubm_opts->mfcc.add(b);
    sub->callback([ubm_opts] {
      ubm_opts->bind->finalize();
      pk::set_num_threads(ubm_opts->threads);
      const pk::Manifest manifest = pk::load_manifest(ubm_opts->manifest);
      const auto feats = pk::compute_all_features(manifest, ubm_opts->mfcc.build());
      std::vector<double> ll;
      const pk::DiagonalGmm ubm =
          pk::train_ubm(features_of_split(manifest, feats, parse_split(ubm_opts->split)),
                        ubm_opts->components, ubm_opts->iters, ubm_opts->seed, &ll);
      pk::write_gmm(ubm_opts->out, ubm);
      std::printf("trained C=%d UBM; final total log-likelihood %.6f\n",
                  ubm.num_components(), ll.empty() ? 0.0 : ll.back());
    });
  }

  // ------------------------------------------------------------ train-mono
  struct TrainMonoOpts {
    std::string manifest, out, split = "train";
    int states = 3, comps = 8, iters = 5, threads = 0;
    MfccOpts mfcc;
    std::unique_ptr<Bind> bind;
  };
  auto mono_opts = std::make_shared<TrainMonoOpts>();
  {
    auto* sub = app.add_subcommand("train-mono",
                                   "flat-start Viterbi training of monophone HMMs");
    mono_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *mono_opts->bind;
    b.opt("--manifest", "manifest", mono_opts->manifest, "manifest with transcripts")
        ->required();
    b.opt("--out", "mono.out", mono_opts->out, "output PKHM path")->required();
    b.opt("--states", "mono.states", mono_opts->states, "states per phone");
    b.opt("--comps-per-state", "mono.comps_per_state", mono_opts->comps, "Gaussians per state");
    b.opt("--iters", "mono.iters", mono_opts->iters, "Viterbi training iterations");
    b.opt("--split", "mono.split", mono_opts->split, "split to train on");
    b.opt("--threads", "threads", mono_opts->threads, "worker threads");
    mono_opts->mfcc.add(b);
    sub->callback([mono_opts] {
      mono_opts->bind->finalize();
      pk::set_num_threads(mono_opts->threads);
      const pk::Manifest manifest = pk::load_manifest(mono_opts->manifest);
      const auto feats = pk::compute_all_features(manifest, mono_opts->mfcc.build());
      const auto rows = manifest.rows_in(parse_split(mono_opts->split));
      std::vector<pk::FeatureMatrix> features;
      std::vector<std::vector<std::string>> transcripts;
      for (const auto* row : rows) {
        features.push_back(feats.at(row->utt_id));
        transcripts.push_back(row->transcript);
      }
      std::vector<double> ll;
      const pk::MonophoneSet mono = pk::train_monophones(
          features, transcripts, mono_opts->states, mono_opts->comps, mono_opts->iters, &ll);
      pk::write_monophone_set(mono_opts->out, mono);
      std::printf("trained %zu phones, %d Gaussians; final Viterbi log-likelihood %.6f\n",
                  mono.phones.size(), mono.inventory.size(),
                  ll.empty() ? 0.0 : ll.back());
    });
  }

  // ------------------------------------------------------------- train-uv2
  struct TrainUv2Opts {
    std::string manifest, ubm, out, split = "train";
    int states = 5, iters = 5;
    double relevance = 16.0;
    MfccOpts mfcc;
    std::unique_ptr<Bind> bind;
  };
  auto uv2_opts = std::make_shared<TrainUv2Opts>();
  {
    auto* sub = app.add_subcommand(
        "train-uv2", "train left-to-right MAP-adapted phrase HMMs (baseline UV2)");
    uv2_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *uv2_opts->bind;
    b.opt("--manifest", "manifest", uv2_opts->manifest, "manifest")->required();
    b.opt("--ubm", "uv2.ubm", uv2_opts->ubm, "UBM PKGM path")->required();
    b.opt("--out", "uv2.out", uv2_opts->out, "output PKHM path")->required();
    b.opt("--states", "uv2.states", uv2_opts->states, "HMM states");
    b.opt("--iters", "uv2.iters", uv2_opts->iters, "training iterations");
    b.opt("--relevance", "relevance_factor", uv2_opts->relevance, "MAP relevance factor");
    b.opt("--split", "uv2.split", uv2_opts->split, "split providing phrase training data");
    uv2_opts->mfcc.add(b);
    sub->callback([uv2_opts] {
      uv2_opts->bind->finalize();
      const pk::Manifest manifest = pk::load_manifest(uv2_opts->manifest);
      const auto feats = pk::compute_all_features(manifest, uv2_opts->mfcc.build());
      const pk::DiagonalGmm ubm = pk::read_gmm(uv2_opts->ubm);
      const pk::Split split = parse_split(uv2_opts->split);

      std::map<std::string, std::vector<pk::FeatureMatrix>> by_phrase;
      for (const auto* row : manifest.rows_in(split))
        by_phrase[row->phrase].push_back(feats.at(row->utt_id));
      pk::MonophoneSet merged;
      for (const auto& [phrase, features] : by_phrase) {
        const pk::MonophoneSet one = pk::train_uv2_model(
            ubm, features, uv2_opts->states, uv2_opts->relevance, uv2_opts->iters, phrase);
        merge_monophone_set(&merged, one);
      }
      pk::write_monophone_set(uv2_opts->out, merged);
      std::printf("trained UV2 models for %zu phrases\n", merged.phones.size());
    });
  }

  // ------------------------------------------------------------------ stats
  struct StatsOpts {
    std::string manifest, align = "gmm", ubm, mono, out_dir, dump_alignment;
    int threads = 0;
    MfccOpts mfcc;
    std::unique_ptr<Bind> bind;
  };
  auto stats_opts = std::make_shared<StatsOpts>();
  {
    auto* sub = app.add_subcommand("stats", "collect zeroth/first-order statistics");
    stats_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *stats_opts->bind;
    b.opt("--manifest", "manifest", stats_opts->manifest, "manifest")->required();
    b.opt("--align", "alignment", stats_opts->align, "gmm or hmm");
    b.opt("--ubm", "ubm.path", stats_opts->ubm, "UBM PKGM (gmm alignment)");
    b.opt("--mono", "mono.path", stats_opts->mono, "monophone PKHM (hmm alignment)");
    b.opt("--out-dir", "stats.out_dir", stats_opts->out_dir, "output directory")->required();
    b.opt("--dump-alignment", "stats.dump_alignment", stats_opts->dump_alignment,
          "directory for per-utterance alignment dumps (hmm only)");
    b.opt("--threads", "threads", stats_opts->threads, "worker threads");
    stats_opts->mfcc.add(b);
    sub->callback([stats_opts] {
      stats_opts->bind->finalize();
      pk::set_num_threads(stats_opts->threads);
      const pk::Manifest manifest = pk::load_manifest(stats_opts->manifest);
      const auto feats = pk::compute_all_features(manifest, stats_opts->mfcc.build());
      fs::create_directories(stats_opts->out_dir);
      if (stats_opts->align == "gmm") {
        const pk::DiagonalGmm ubm = pk::read_gmm(stats_opts->ubm);
        for (const auto& row : manifest.rows) {
          const pk::SufficientStats st = pk::collect_stats_gmm(ubm, feats.at(row.utt_id));
          pk::write_stats((fs::path(stats_opts->out_dir) / (row.utt_id + ".pkst")).string(),
                          st);
        }
      } else {
        PK_CHECK(stats_opts->align == "hmm", "bad-config", "--align must be gmm or hmm");
        const pk::MonophoneSet mono = pk::read_monophone_set(stats_opts->mono);
        if (!stats_opts->dump_alignment.empty())
          fs::create_directories(stats_opts->dump_alignment);
        for (const auto& row : manifest.rows) {
          const pk::PhraseHmm hmm = pk::compose_phrase_hmm(mono, row.transcript);
          const pk::SufficientStats st =
              pk::collect_stats_hmm(mono, hmm, feats.at(row.utt_id));
          pk::write_stats((fs::path(stats_opts->out_dir) / (row.utt_id + ".pkst")).string(),
                          st);
          if (!stats_opts->dump_alignment.empty()) {
            const pk::AlignmentPath path =
                pk::viterbi_align(mono.inventory, hmm, feats.at(row.utt_id));
            pk::write_alignment(
                (fs::path(stats_opts->dump_alignment) / (row.utt_id + ".ali")).string(),
                path);
          }
        }
      }
      std::printf("wrote %zu stats files under %s\n", manifest.rows.size(),
                  stats_opts->out_dir.c_str());
    });
  }

  // --------------------------------------------------------------- train-tv
  struct TrainTvOpts {
    std::string manifest, stats_dir, align = "gmm", ubm, mono, out, split = "train";
    int rank = 50, iters = 10, threads = 0;
    std::uint64_t seed = 1;
    std::unique_ptr<Bind> bind;
  };
  auto tv_opts = std::make_shared<TrainTvOpts>();
  {
    auto* sub = app.add_subcommand("train-tv", "EM-train the total-variability matrix");
    tv_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *tv_opts->bind;
    b.opt("--manifest", "manifest", tv_opts->manifest, "manifest")->required();
    b.opt("--stats-dir", "stats.out_dir", tv_opts->stats_dir, "per-utterance PKST dir")
        ->required();
    b.opt("--align", "alignment", tv_opts->align, "gmm or hmm (source of Sigma)");
    b.opt("--ubm", "ubm.path", tv_opts->ubm, "UBM PKGM");
    b.opt("--mono", "mono.path", tv_opts->mono, "monophone PKHM");
    b.opt("--out", "tv.out", tv_opts->out, "output PKTV path")->required();
    b.opt("--rank", "tv.rank", tv_opts->rank, "i-vector dimension");
    b.opt("--iters", "tv.iters", tv_opts->iters, "EM iterations");
    b.opt("--seed", "seed", tv_opts->seed, "seed");
    b.opt("--split", "tv.split", tv_opts->split, "split to train on");
    b.opt("--threads", "threads", tv_opts->threads, "worker threads");
    sub->callback([tv_opts] {
      tv_opts->bind->finalize();
      pk::set_num_threads(tv_opts->threads);
      const pk::Manifest manifest = pk::load_manifest(tv_opts->manifest);
      const Eigen::MatrixXd sigma =
          tv_opts->align == "gmm"
              ? pk::read_gmm(tv_opts->ubm).variances
              : pk::read_monophone_set(tv_opts->mono).inventory.variances;
      std::vector<pk::SufficientStats> stats;
      for (const auto* row : manifest.rows_in(parse_split(tv_opts->split)))
        stats.push_back(pk::read_stats(
            (fs::path(tv_opts->stats_dir) / (row->utt_id + ".pkst")).string()));
      std::vector<double> objective;
      const pk::TotalVariabilityModel tv = pk::train_tv(
          stats, sigma, tv_opts->rank, tv_opts->iters, tv_opts->seed, &objective);
      pk::write_tv(tv_opts->out, tv);
      std::printf("trained rank-%d TV model; final EM objective %.6f\n", tv.rank(),
                  objective.empty() ? 0.0 : objective.back());
    });
  }

  // ----------------------------------------------------------------- extract
  struct ExtractOpts {
    std::string manifest, stats_dir, align = "gmm", ubm, mono, tv, out;
    int threads = 0;
    std::unique_ptr<Bind> bind;
  };
  auto ext_opts = std::make_shared<ExtractOpts>();
  {
    auto* sub = app.add_subcommand("extract", "extract i-vectors into a PKIV archive");
    ext_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *ext_opts->bind;
    b.opt("--manifest", "manifest", ext_opts->manifest, "manifest")->required();
    b.opt("--stats-dir", "stats.out_dir", ext_opts->stats_dir, "per-utterance PKST dir")
        ->required();
    b.opt("--align", "alignment", ext_opts->align, "gmm or hmm (source of Sigma)");
    b.opt("--ubm", "ubm.path", ext_opts->ubm, "UBM PKGM");
    b.opt("--mono", "mono.path", ext_opts->mono, "monophone PKHM");
    b.opt("--tv", "tv.path", ext_opts->tv, "TV model PKTV")->required();
    b.opt("--out", "extract.out", ext_opts->out, "output PKIV path")->required();
    b.opt("--threads", "threads", ext_opts->threads, "worker threads");
    sub->callback([ext_opts] {
      ext_opts->bind->finalize();
      pk::set_num_threads(ext_opts->threads);
      const pk::Manifest manifest = pk::load_manifest(ext_opts->manifest);
      const Eigen::MatrixXd sigma =
          ext_opts->align == "gmm"
              ? pk::read_gmm(ext_opts->ubm).variances
              : pk::read_monophone_set(ext_opts->mono).inventory.variances;
      const pk::TotalVariabilityModel tv = pk::read_tv(ext_opts->tv, sigma);
      const pk::AlignmentSource src = ext_opts->align == "gmm"
                                          ? pk::AlignmentSource::kGmm
                                          : pk::AlignmentSource::kHmm;
      pk::IvectorArchive archive;
      archive.rank = tv.rank();
      for (const auto& row : manifest.rows) {
        const pk::SufficientStats st = pk::read_stats(
            (fs::path(ext_opts->stats_dir) / (row.utt_id + ".pkst")).string());
        archive.entries.emplace_back(row.utt_id, pk::extract_ivector(tv, st, src).w);
      }
      pk::write_ivector_archive(ext_opts->out, archive);
      std::printf("extracted %zu i-vectors\n", archive.entries.size());
    });
  }

  // ------------------------------------------------------------------ enroll
  struct EnrollOpts {
    std::string manifest, ivectors, backend = "cosine", out, cov_from;
    double shrinkage = 0.0;
    int speakers = 0, reps = 0;
    std::unique_ptr<Bind> bind;
  };
  auto enroll_opts = std::make_shared<EnrollOpts>();
  {
    auto* sub = app.add_subcommand("enroll", "fit a phrase backend (LGC or cosine)");
    enroll_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *enroll_opts->bind;
    b.opt("--manifest", "manifest", enroll_opts->manifest, "manifest")->required();
    b.opt("--ivectors", "ivectors.path", enroll_opts->ivectors, "PKIV archive")->required();
    b.opt("--backend", "backend", enroll_opts->backend, "lgc or cosine");
    b.opt("--out", "enroll.out", enroll_opts->out, "output model path")->required();
    b.opt("--shrinkage", "lgc.shrinkage", enroll_opts->shrinkage, "LGC covariance shrinkage");
    b.opt("--cov-from", "lgc.cov_file", enroll_opts->cov_from,
          "take the within-class covariance from this PKLG file");
    b.opt("--speakers", "enroll.speakers", enroll_opts->speakers,
          "restrict enrollment to the first n speakers (0 = all)");
    b.opt("--reps", "enroll.reps", enroll_opts->reps,
          "restrict to the first m reps per phrase/speaker (0 = all)");
    sub->callback([enroll_opts] {
      enroll_opts->bind->finalize();
      const pk::Manifest manifest = pk::load_manifest(enroll_opts->manifest);
      const pk::IvectorArchive archive = pk::read_ivector_archive(enroll_opts->ivectors);
      pk::ExperimentConfig cfg;
      cfg.backend = enroll_opts->backend;
      cfg.shrinkage = enroll_opts->shrinkage;
      cfg.lgc_cov_file = enroll_opts->cov_from;
      cfg.enroll_speakers = enroll_opts->speakers;
      cfg.enroll_reps = enroll_opts->reps;
      cfg.validate();
      const pk::BackendModels models = pk::enroll_backend(manifest, archive, cfg);
      if (models.lgc)
        models.lgc->save(enroll_opts->out);
      else
        models.cosine->save(enroll_opts->out);
      std::printf("enrolled %zu phrases (%s backend)\n", models.labels().size(),
                  enroll_opts->backend.c_str());
    });
  }

  // ------------------------------------------------------------------- score
  struct ScoreOpts {
    std::string manifest, ivectors, model, normalization = "none", out;
    std::unique_ptr<Bind> bind;
  };
  auto score_opts = std::make_shared<ScoreOpts>();
  {
    auto* sub = app.add_subcommand("score", "score eval trials against a backend model");
    score_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *score_opts->bind;
    b.opt("--manifest", "manifest", score_opts->manifest, "manifest")->required();
    b.opt("--ivectors", "ivectors.path", score_opts->ivectors, "PKIV archive")->required();
    b.opt("--model", "score.model", score_opts->model, "PKLG or PKCS backend model")
        ->required();
    b.opt("--normalization", "normalization", score_opts->normalization,
          "none or max-norm (cosine only)");
    b.opt("--out", "score.out", score_opts->out, "output score file")->required();
    sub->callback([score_opts] {
      score_opts->bind->finalize();
      const pk::Manifest manifest = pk::load_manifest(score_opts->manifest);
      const pk::IvectorArchive archive = pk::read_ivector_archive(score_opts->ivectors);
      pk::BackendModels models;
      const std::string magic = detect_magic(score_opts->model);
      pk::ExperimentConfig cfg;
      cfg.normalization = score_opts->normalization;
      if (magic == "PKLG") {
        models.lgc = pk::LgcModel::load(score_opts->model);
        cfg.backend = "lgc";
      } else if (magic == "PKCS") {
        models.cosine = pk::CosineModel::load(score_opts->model);
        cfg.backend = "cosine";
      } else {
        PK_ERR("bad-magic", score_opts->model << ": not a backend model file");
      }
      cfg.validate();
      const pk::TrialOutcome outcome =
          pk::score_with_backend(manifest, archive, cfg, models);
      pk::write_score_file(score_opts->out, outcome.scores, outcome.norm);
      std::printf("scored %zu trials\n", outcome.scores.size());
    });
  }

  // ----------------------------------------------------------- baseline-score
  struct BaselineOpts {
    std::string manifest, system, ubm, uv2_model, out;
    double relevance = 16.0;
    int speakers = 0, reps = 0, threads = 0;
    MfccOpts mfcc;
    std::unique_ptr<Bind> bind;
  };
  auto base_opts = std::make_shared<BaselineOpts>();
  {
    auto* sub = app.add_subcommand("baseline-score",
                                   "score eval trials with UV1/UV2/UV3 baselines");
    base_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *base_opts->bind;
    b.opt("--manifest", "manifest", base_opts->manifest, "manifest")->required();
    b.opt("--system", "baseline.system", base_opts->system, "uv1, uv2 or uv3")->required();
    b.opt("--ubm", "ubm.path", base_opts->ubm, "UBM PKGM (uv1/uv2)");
    b.opt("--uv2-model", "uv2.path", base_opts->uv2_model, "UV2 PKHM (uv2)");
    b.opt("--out", "baseline.out", base_opts->out, "output score file")->required();
    b.opt("--relevance", "relevance_factor", base_opts->relevance, "MAP relevance (uv1)");
    b.opt("--speakers", "enroll.speakers", base_opts->speakers, "enrollment speaker cap");
    b.opt("--reps", "enroll.reps", base_opts->reps, "enrollment reps cap");
    b.opt("--threads", "threads", base_opts->threads, "worker threads");
    base_opts->mfcc.add(b);
    sub->callback([base_opts] {
      base_opts->bind->finalize();
      pk::set_num_threads(base_opts->threads);
      const pk::Manifest manifest = pk::load_manifest(base_opts->manifest);
      const auto feats = pk::compute_all_features(manifest, base_opts->mfcc.build());

      pk::ExperimentConfig cfg;
      cfg.enroll_speakers = base_opts->speakers;
      cfg.enroll_reps = base_opts->reps;
      const auto enroll_rows = pk::select_enrollment_rows(manifest, cfg);

      std::map<std::string, std::vector<const pk::ManifestRow*>> by_phrase;
      for (const auto* row : enroll_rows) by_phrase[row->phrase].push_back(row);
      std::vector<std::string> phrases;
      for (const auto& [phrase, rows] : by_phrase) phrases.push_back(phrase);

      std::vector<std::pair<std::string, std::string>> eval_utts;
      for (const auto* row : manifest.rows_in(pk::Split::kEval))
        eval_utts.emplace_back(row->utt_id, row->phrase);
      const std::vector<pk::Trial> trials = pk::make_trials(eval_utts, phrases);

      std::map<std::string, double> score_of;
      auto key_of = [](const std::string& utt, const std::string& phrase) {
        return utt + '\x1f' + phrase;
      };

      if (base_opts->system == "uv1") {
        const pk::DiagonalGmm ubm = pk::read_gmm(base_opts->ubm);
        std::map<std::string, pk::DiagonalGmm> model_of;
        for (const auto& [phrase, rows] : by_phrase) {
          int total = 0;
          for (const auto* r : rows) total += feats.at(r->utt_id).num_frames();
          pk::FeatureMatrix pooled;
          pooled.data.resize(total, feats.at(rows[0]->utt_id).dim());
          int at = 0;
          for (const auto* r : rows) {
            const auto& f = feats.at(r->utt_id);
            pooled.data.middleRows(at, f.num_frames()) = f.data;
            at += f.num_frames();
          }
          model_of.emplace(phrase,
                           pk::map_adapt_means(ubm, pooled, base_opts->relevance));
        }
        for (const auto& t : trials)
          score_of[key_of(t.utt_id, t.claimed_phrase)] =
              pk::uv1_score(model_of.at(t.claimed_phrase), ubm, feats.at(t.utt_id));
      } else if (base_opts->system == "uv2") {
        const pk::DiagonalGmm ubm = pk::read_gmm(base_opts->ubm);
        const pk::MonophoneSet uv2 = pk::read_monophone_set(base_opts->uv2_model);
        std::map<std::string, pk::PhraseHmm> hmm_of;
        for (const auto& phrase : phrases)
          hmm_of[phrase] = pk::compose_phrase_hmm(uv2, {phrase});
        for (const auto& t : trials)
          score_of[key_of(t.utt_id, t.claimed_phrase)] = pk::uv2_score(
              uv2.inventory, hmm_of.at(t.claimed_phrase), ubm, feats.at(t.utt_id));
      } else if (base_opts->system == "uv3") {
        std::map<std::string, std::vector<pk::FeatureMatrix>> templates;
        for (const auto& [phrase, rows] : by_phrase)
          for (const auto* r : rows) templates[phrase].push_back(feats.at(r->utt_id));
        std::vector<double> slot(trials.size());
        pk::parallel_for(trials.size(), [&](std::size_t i) {
          slot[i] = pk::uv3_score(templates.at(trials[i].claimed_phrase),
                                  feats.at(trials[i].utt_id));
        });
        for (std::size_t i = 0; i < trials.size(); ++i)
          score_of[key_of(trials[i].utt_id, trials[i].claimed_phrase)] = slot[i];
      } else {
        PK_ERR("bad-config", "--system must be uv1, uv2 or uv3");
      }

      std::vector<pk::TrialScore> out;
      for (const auto& t : trials)
        out.push_back({t, score_of.at(key_of(t.utt_id, t.claimed_phrase))});
      pk::write_score_file(base_opts->out, out, pk::ScoreNorm::kNone);
      std::printf("scored %zu trials with %s\n", out.size(), base_opts->system.c_str());
    });
  }

  // ---------------------------------------------------------------- evaluate
  struct EvaluateOpts {
    std::string scores, out, normalization;
    std::unique_ptr<Bind> bind;
  };
  auto eval_opts = std::make_shared<EvaluateOpts>();
  {
    auto* sub = app.add_subcommand("evaluate", "pooled EER and classification error");
    eval_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *eval_opts->bind;
    b.opt("--scores", "evaluate.scores", eval_opts->scores, "score file")->required();
    b.opt("--out", "evaluate.out", eval_opts->out, "metrics JSON output (optional)");
    b.opt("--normalization", "normalization", eval_opts->normalization,
          "override the score file's normalization tag");
    sub->callback([eval_opts] {
      eval_opts->bind->finalize();
      const pk::ScoreFile sf = pk::read_score_file(eval_opts->scores);
      pk::ScoreNorm norm = sf.norm;
      if (!eval_opts->normalization.empty()) {
        if (eval_opts->normalization == "none")
          norm = pk::ScoreNorm::kNone;
        else if (eval_opts->normalization == "max-norm")
          norm = pk::ScoreNorm::kMaxNorm;
        else if (eval_opts->normalization == "posterior")
          norm = pk::ScoreNorm::kPosterior;
        else
          PK_ERR("bad-config", "unknown normalization override");
      }

      pk::TrialOutcome outcome;
      outcome.scores = sf.scores;
      outcome.norm = norm;
      std::set<std::string> phrase_set;
      for (const auto& ts : sf.scores) phrase_set.insert(ts.trial.claimed_phrase);
      outcome.enrolled_phrases.assign(phrase_set.begin(), phrase_set.end());

      // classification from the score file: best-scoring claim per utterance
      struct Best {
        double score = 0.0;
        std::string claim;
        std::string truth;
        bool has_truth = false;
      };
      std::map<std::string, Best> best;
      for (const auto& ts : sf.scores) {
        Best& u = best[ts.trial.utt_id];
        if (u.claim.empty() || ts.score > u.score) {
          u.score = ts.score;
          u.claim = ts.trial.claimed_phrase;
        }
        if (ts.trial.target) {
          u.truth = ts.trial.claimed_phrase;
          u.has_truth = true;
        }
      }
      for (const auto& [utt, u] : best)
        if (u.has_truth) outcome.predictions.emplace_back(u.claim, u.truth);

      const pk::MetricsReport report = pk::compute_metrics(outcome);
      print_metrics_block(report);
      if (!eval_opts->out.empty())
        pk::write_text_file(eval_opts->out, pk::metrics_to_json(report, {}, {}));
    });
  }

  // --------------------------------------------------------------- export-csv
  struct ExportOpts {
    std::string manifest, ivectors, out;
    std::unique_ptr<Bind> bind;
  };
  auto export_opts = std::make_shared<ExportOpts>();
  {
    auto* sub = app.add_subcommand("export-csv", "dump raw i-vectors as CSV");
    export_opts->bind = std::make_unique<Bind>(sub);
    Bind& b = *export_opts->bind;
    b.opt("--manifest", "manifest", export_opts->manifest, "manifest")->required();
    b.opt("--ivectors", "ivectors.path", export_opts->ivectors, "PKIV archive")->required();
    b.opt("--out", "export.out", export_opts->out, "output CSV path")->required();
    sub->callback([export_opts] {
      export_opts->bind->finalize();
      const pk::Manifest manifest = pk::load_manifest(export_opts->manifest);
      const pk::IvectorArchive archive = pk::read_ivector_archive(export_opts->ivectors);
      pk::export_ivectors_csv(archive, manifest, export_opts->out);
      std::printf("wrote %zu rows to %s\n", archive.entries.size(),
                  export_opts->out.c_str());
    });
  }

  // --------------------------------------------------------------------- run
  struct RunOpts {
    std::string config;
    std::string manifest, workdir, alignment, backend, normalization;
    std::uint64_t seed = 0;
    int threads = -1, enroll_speakers = -1, enroll_reps = -1;
    CLI::Option* seed_opt = nullptr;
  };
  auto run_opts = std::make_shared<RunOpts>();
  {
    auto* sub = app.add_subcommand("run", "full experiment from a config file");
    sub->add_option("--config", run_opts->config, "experiment config")->required();
    sub->add_option("--manifest", run_opts->manifest, "override manifest");
    sub->add_option("--workdir", run_opts->workdir, "override workdir");
    sub->add_option("--alignment", run_opts->alignment, "override alignment (gmm|hmm)");
    sub->add_option("--backend", run_opts->backend, "override backend (lgc|cosine)");
    sub->add_option("--normalization", run_opts->normalization, "override normalization");
    run_opts->seed_opt = sub->add_option("--seed", run_opts->seed, "override seed");
    sub->add_option("--threads", run_opts->threads, "override worker threads");
    sub->add_option("--enroll-speakers", run_opts->enroll_speakers,
                    "override enrollment speaker cap");
    sub->add_option("--enroll-reps", run_opts->enroll_reps, "override enrollment reps cap");
    sub->callback([run_opts] {
      pk::ExperimentConfig cfg =
          pk::ExperimentConfig::from_config(pk::Config::load(run_opts->config));
      if (!run_opts->manifest.empty()) cfg.manifest_path = run_opts->manifest;
      if (!run_opts->workdir.empty()) cfg.workdir = run_opts->workdir;
      if (!run_opts->alignment.empty()) cfg.alignment = run_opts->alignment;
      if (!run_opts->backend.empty()) cfg.backend = run_opts->backend;
      if (!run_opts->normalization.empty()) cfg.normalization = run_opts->normalization;
      if (run_opts->seed_opt->count() > 0) cfg.seed = run_opts->seed;
      if (run_opts->threads >= 0) cfg.threads = run_opts->threads;
      if (run_opts->enroll_speakers >= 0) cfg.enroll_speakers = run_opts->enroll_speakers;
      if (run_opts->enroll_reps >= 0) cfg.enroll_reps = run_opts->enroll_reps;

      const pk::RunResult result = pk::run_experiment(cfg);
      print_metrics_block(result.metrics);
      for (const auto& [stage, secs] : result.stage_seconds)
        std::printf("time.%s: %.3f\n", stage.c_str(), secs);
      std::printf("report: %s\n",
                  (fs::path(cfg.workdir) / "metrics.json").string().c_str());
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const pk::Error& e) {
    std::cerr << "phrasekit error " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "phrasekit error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

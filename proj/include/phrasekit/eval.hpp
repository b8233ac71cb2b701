// phrasekit/eval.hpp

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

#ifndef PHRASEKIT_EVAL_HPP
#define PHRASEKIT_EVAL_HPP

#include <string>
#include <vector>

#include "phrasekit/scoring.hpp"

namespace pk {

struct Trial {
  std::string utt_id;
  std::string claimed_phrase;
  bool target = false;
};

struct TrialScore {
  Trial trial;
  double score = 0.0;  // finite, or -inf as the rejection sentinel
};

// Each evaluation utterance forms one target trial (claimed = true phrase)
// plus one nontarget trial per other enrolled phrase.  An utterance whose
// true phrase is not enrolled is an error.
std::vector<Trial> make_trials(
    const std::vector<std::pair<std::string, std::string>>& eval_utterances,
    const std::vector<std::string>& enrolled_phrases);

// Pooled EER: false-accept and miss rates are traced as step functions over
// the sorted unique scores and the EER is their crossing, linearly
// interpolated between adjacent operating points.  Needs at least one target
// and one nontarget trial.
double compute_eer(const std::vector<TrialScore>& scores);

// Same crossing rule on raw target/nontarget score lists.
double compute_eer_from_scores(const std::vector<double>& target_scores,
                               const std::vector<double>& nontarget_scores);

// Fraction of (predicted, truth) pairs that disagree.
double classification_error(
    const std::vector<std::pair<std::string, std::string>>& predictions);

// Score file: one "trial-id<TAB>claimed-phrase<TAB>label<TAB>score" line per
// trial; label is "target" or "nontarget"; scores use 17 significant digits.
// Optional leading '#' comment lines may carry metadata; the writer records
// "# normalization: <none|max-norm|posterior>".
void write_score_file(const std::string& path, const std::vector<TrialScore>& scores,
                      ScoreNorm norm);

struct ScoreFile {
  std::vector<TrialScore> scores;
  ScoreNorm norm = ScoreNorm::kNone;
};

ScoreFile read_score_file(const std::string& path);

}  // namespace pk

#endif  // PHRASEKIT_EVAL_HPP

// phrasekit/eval.cpp

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

#include "phrasekit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "phrasekit/common.hpp"
#include "phrasekit/io_util.hpp"

namespace pk {

std::vector<Trial> make_trials(
    const std::vector<std::pair<std::string, std::string>>& eval_utterances,
    const std::vector<std::string>& enrolled_phrases) {
  PK_CHECK(!enrolled_phrases.empty(), "bad-config", "no enrolled phrases");
  std::set<std::string> enrolled(enrolled_phrases.begin(), enrolled_phrases.end());
  std::vector<Trial> trials;
  trials.reserve(eval_utterances.size() * enrolled_phrases.size());
  for (const auto& [utt, true_phrase] : eval_utterances) {
    PK_CHECK(enrolled.count(true_phrase), "unenrolled-phrase",
             "utterance '" << utt << "' has unenrolled phrase '" << true_phrase << "'");
    trials.push_back({utt, true_phrase, true});
    for (const auto& phrase : enrolled_phrases)
      if (phrase != true_phrase) trials.push_back({utt, phrase, false});
  }
  return trials;
}

double compute_eer_from_scores(const std::vector<double>& target_scores,
                               const std::vector<double>& nontarget_scores) {
  PK_CHECK(!target_scores.empty() && !nontarget_scores.empty(), "bad-input",
           "EER needs at least one target and one nontarget trial");
  for (double s : target_scores)
    PK_CHECK(!std::isnan(s), "bad-input", "NaN target score");
  for (double s : nontarget_scores)
    PK_CHECK(!std::isnan(s), "bad-input", "NaN nontarget score");

  std::vector<double> tar = target_scores, non = nontarget_scores;
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());
  const double nt = static_cast<double>(tar.size());
  const double nn = static_cast<double>(non.size());

  // Operating points: decision "accept iff score >= threshold", thresholds
  // swept over the sorted unique scores, bracketed by (far,miss) = (1,0)
  // below every score and (0,1) above every score.
  std::vector<double> thresholds(tar);
  thresholds.insert(thresholds.end(), non.begin(), non.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  double prev_far = 1.0, prev_miss = 0.0;
  auto interpolate = [](double far0, double miss0, double far1, double miss1) {
    const double d0 = far0 - miss0;  // >= 0
    const double d1 = far1 - miss1;  // <= 0
    if (d0 <= 0.0) return 0.5 * (far0 + miss0);  // crossing at the first point
    const double t = d0 / (d0 - d1);
    return far0 + t * (far1 - far0);
  };

  for (double th : thresholds) {
    const double miss =
        static_cast<double>(std::lower_bound(tar.begin(), tar.end(), th) - tar.begin()) / nt;
    const double far =
        static_cast<double>(non.end() - std::lower_bound(non.begin(), non.end(), th)) / nn;
    if (miss >= far) return interpolate(prev_far, prev_miss, far, miss);
    prev_far = far;
    prev_miss = miss;
  }
  // Crossing lies between the last threshold and "accept nothing" (0, 1).
  return interpolate(prev_far, prev_miss, 0.0, 1.0);
}

double compute_eer(const std::vector<TrialScore>& scores) {
  std::vector<double> tar, non;
  for (const auto& ts : scores)
    (ts.trial.target ? tar : non).push_back(ts.score);
  return compute_eer_from_scores(tar, non);
}

double classification_error(
    const std::vector<std::pair<std::string, std::string>>& predictions) {
  PK_CHECK(!predictions.empty(), "bad-input", "no predictions");
  std::size_t wrong = 0;
  for (const auto& [predicted, truth] : predictions)
    if (predicted != truth) ++wrong;
  return static_cast<double>(wrong) / predictions.size();
}

namespace {

const char* norm_name(ScoreNorm n) {
  switch (n) {
    case ScoreNorm::kMaxNorm: return "max-norm";
    case ScoreNorm::kPosterior: return "posterior";
    default: return "none";
  }
}

ScoreNorm norm_from_name(const std::string& s) {
  if (s == "max-norm") return ScoreNorm::kMaxNorm;
  if (s == "posterior") return ScoreNorm::kPosterior;
  PK_CHECK(s == "none", "bad-format", "unknown normalization tag '" << s << "'");
  return ScoreNorm::kNone;
}

}  // namespace

void write_score_file(const std::string& path, const std::vector<TrialScore>& scores,
                      ScoreNorm norm) {
  std::ostringstream ss;
  ss << "# normalization: " << norm_name(norm) << "\n";
  char buf[64];
  for (const auto& ts : scores) {
    std::snprintf(buf, sizeof(buf), "%.17g", ts.score);
    ss << ts.trial.utt_id << '\t' << ts.trial.claimed_phrase << '\t'
       << (ts.trial.target ? "target" : "nontarget") << '\t' << buf << '\n';
  }
  write_text_file(path, ss.str());
}

ScoreFile read_score_file(const std::string& path) {
  const std::string content = read_text_file(path);
  std::istringstream is(content);
  ScoreFile out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# normalization:";
      if (line.rfind(key, 0) == 0) {
        std::string v = line.substr(key.size());
        v.erase(0, v.find_first_not_of(" \t"));
        out.norm = norm_from_name(v);
      }
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    PK_CHECK(fields.size() == 4, "bad-format",
             path << ":" << lineno << ": expected 4 tab-separated fields");
    TrialScore ts;
    ts.trial.utt_id = fields[0];
    ts.trial.claimed_phrase = fields[1];
    if (fields[2] == "target")
      ts.trial.target = true;
    else if (fields[2] == "nontarget")
      ts.trial.target = false;
    else
      PK_ERR("bad-format", path << ":" << lineno << ": bad label '" << fields[2] << "'");
    if (fields[3] == "-inf")
      ts.score = -std::numeric_limits<double>::infinity();
    else {
      try {
        ts.score = std::stod(fields[3]);
      } catch (const std::exception&) {
        PK_ERR("bad-format", path << ":" << lineno << ": bad score '" << fields[3] << "'");
      }
    }
    out.scores.push_back(std::move(ts));
  }
  return out;
}

}  // namespace pk

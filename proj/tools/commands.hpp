// Copyright 2026 The pasalign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Subcommand bodies of the pasalign tool, stream based so tests can drive
// them without spawning processes. Errors surface as exceptions; main()
// maps them to exit codes.

#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pasalign/pasalign.hpp"

namespace pasalign::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kMissingPhrases = 3 };

struct DatasetOptions {
  std::string path;
  std::string preset = "paws";
  std::string columns;  // custom preset only
  std::string labels;   // custom preset only
  bool header = false;  // custom preset only
  bool keep_middle_votes = false;

  PairPreset resolve() const {
    if (preset == "custom") return PairPreset::custom(columns, labels, header);
    if (preset == "twitterurl") return PairPreset::twitterurl(keep_middle_votes);
    return PairPreset::named(preset);
  }

  PairFile load() const { return load_pairs(path, resolve()); }
};

struct RunConfig {
  std::vector<std::string> corpora;
  std::optional<std::string> phrase_store;
  DatasetOptions dataset;
  SpanStrategy strategy = SpanStrategy::pas;
  ScoreMode mode = ScoreMode::aligned;
  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 1;

  void validate() const {
    if (corpora.empty()) throw ValidationError("at least one --corpus is required");
    if (mode == ScoreMode::aligned_decontext && !phrase_store) {
      throw ValidationError("aligned-decontext mode requires --phrases");
    }
    if (workers == 0) throw ValidationError("--workers must be at least 1");
  }
};

/// Scoring inputs loaded once per command.
struct LoadedRun {
  EncodedCorpus corpus;
  std::optional<PhraseStore> phrases;
  PairFile pairs;
  ScoringConfig scoring;
};

inline LoadedRun load_run(const RunConfig& config) {
  config.validate();
  LoadedRun run;
  for (const auto& path : config.corpora) {
    auto part = load_encoded_corpus(path);
    for (const auto& s : part.sentences()) run.corpus.add(s, path);
  }
  if (config.phrase_store) run.phrases = load_phrase_store(*config.phrase_store);
  run.pairs = config.dataset.load();
  run.scoring.strategy = config.strategy;
  run.scoring.mode = config.mode;
  run.scoring.seed = config.seed;
  return run;
}

inline std::vector<DatasetPair> pair_list(const PairFile& file) {
  std::vector<DatasetPair> out;
  out.reserve(file.pairs.size());
  for (const auto& p : file.pairs) out.push_back(p.pair);
  return out;
}

inline void cmd_score(const RunConfig& config, std::ostream& out) {
  auto run = load_run(config);
  if (run.phrases) run.scoring.phrases = &*run.phrases;
  write_scores(out, score_dataset(run.corpus, pair_list(run.pairs), run.scoring, config.workers));
}

inline void cmd_explain(const RunConfig& config, const std::string& pair_id, std::ostream& out) {
  if (config.mode == ScoreMode::vanilla) {
    throw ValidationError("explain needs an aligned mode; vanilla scores have no alignment");
  }
  auto run = load_run(config);
  if (run.phrases) run.scoring.phrases = &*run.phrases;
  for (const auto& p : run.pairs.pairs) {
    if (p.pair.pair_id == pair_id) {
      out << explain_table(score_pair(run.corpus, p.pair, run.scoring));
      return;
    }
  }
  throw ValidationError("unknown pair id '" + pair_id + "'");
}

struct CalibrationReports {
  Threshold f1_threshold;
  Threshold accuracy_threshold;
  MetricReport f1_tuned;
  MetricReport accuracy_tuned;
};

inline CalibrationReports calibrate_and_evaluate(const std::vector<LabeledScore>& dev,
                                                 const std::vector<LabeledScore>& test) {
  CalibrationReports r;
  r.f1_threshold = find_optimal_threshold(dev, TargetMetric::f1_pos);
  r.accuracy_threshold = find_optimal_threshold(dev, TargetMetric::accuracy);
  r.f1_tuned = evaluate(test, r.f1_threshold);
  r.accuracy_tuned = evaluate(test, r.accuracy_threshold);
  return r;
}

/// Both reports as text sections; `json_out`, when given, receives the same
/// numbers keyed by tuning target.
inline void cmd_calibrate(const std::string& dev_scores, const DatasetOptions& dev_pairs,
                          const std::string& test_scores, const DatasetOptions& test_pairs,
                          std::ostream& out, std::ostream* json_out = nullptr) {
  const auto dev = attach_labels(load_scores(dev_scores), dev_pairs.load().pairs);
  const auto test = attach_labels(load_scores(test_scores), test_pairs.load().pairs);
  const auto r = calibrate_and_evaluate(dev, test);
  out << "[f1_pos-tuned]\n" << format_report_kv(r.f1_tuned) << "\n[accuracy-tuned]\n"
      << format_report_kv(r.accuracy_tuned);
  if (json_out) {
    nlohmann::ordered_json j;
    j["f1_pos_tuned"] = report_to_json(r.f1_tuned);
    j["accuracy_tuned"] = report_to_json(r.accuracy_tuned);
    *json_out << j.dump(2) << '\n';
  }
}

inline void cmd_evaluate(const std::string& scores, const DatasetOptions& pairs, double threshold,
                         std::ostream& out, std::ostream* json_out = nullptr) {
  const auto labeled = attach_labels(load_scores(scores), pairs.load().pairs);
  const auto report = evaluate(labeled, {threshold, TargetMetric::f1_pos});
  out << format_report_kv(report);
  if (json_out) *json_out << report_to_json(report).dump(2) << '\n';
}

inline void cmd_overlap(const DatasetOptions& dataset, std::ostream& out) {
  const auto file = dataset.load();
  std::vector<TextPair> texts;
  texts.reserve(file.pairs.size());
  for (const auto& p : file.pairs) texts.push_back({p.text_a, p.text_b, p.pair.gold});
  const auto r = overlap_report(texts);
  out << "overall\t" << format_real(r.overall) << '\n'
      << "positive\t" << format_real(r.positive) << '\n'
      << "negative\t" << format_real(r.negative) << '\n'
      << "pairs\t" << texts.size() << '\n';
}

/// Writes the raw rows (with the header, if any) of both halves.
inline void cmd_split(const DatasetOptions& dataset, double fraction, std::uint64_t seed,
                      std::ostream& train_out, std::ostream& dev_out) {
  const auto file = dataset.load();
  const auto [train, dev] = stratified_dev_split(
      file.pairs, fraction, seed, [](const LoadedPair& p) { return p.pair.gold; });
  for (auto* out : {&train_out, &dev_out}) {
    if (file.header) *out << *file.header << '\n';
  }
  for (const auto& p : train) train_out << p.raw_line << '\n';
  for (const auto& p : dev) dev_out << p.raw_line << '\n';
}

}  // namespace pasalign::cli

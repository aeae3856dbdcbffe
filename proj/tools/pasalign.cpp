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

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace pasalign;
using namespace pasalign::cli;

void add_dataset_options(CLI::App* app, DatasetOptions& d, const std::string& prefix = "") {
  app->add_option("--" + prefix + "pairs", d.path, "Tab-separated dataset file")->required();
  app->add_option("--" + prefix + "preset", d.preset, "paws | msrp | twitterurl | custom")
      ->check(CLI::IsMember({"paws", "msrp", "twitterurl", "custom"}));
  app->add_option("--" + prefix + "columns", d.columns,
                  "Custom column roles, e.g. id,s1,s2,label (roles: id id1 id2 s1 s2 label _)");
  app->add_option("--" + prefix + "labels", d.labels, "Custom label map, e.g. 1=pos,0=neg");
  app->add_flag("--" + prefix + "header", d.header, "Custom preset: first line is a header");
  app->add_flag("--" + prefix + "keep-middle-votes", d.keep_middle_votes,
                "twitterurl: keep 3-of-6 pairs as negatives instead of dropping them");
}

void add_run_options(CLI::App* app, RunConfig& c, std::string& strategy, std::string& mode) {
  app->add_option("--corpus", c.corpora, "Encoded corpus file(s)")->required();
  app->add_option("--phrases", c.phrase_store, "Phrase store for aligned-decontext mode");
  add_dataset_options(app, c.dataset);
  app->add_option("--strategy", strategy, "pas | token | random | continuous-random")
      ->check(CLI::IsMember({"pas", "token", "random", "continuous-random"}));
  app->add_option("--mode", mode, "vanilla | aligned | aligned-decontext")
      ->check(CLI::IsMember({"vanilla", "aligned", "aligned-decontext"}));
  app->add_option("--seed", c.seed, "Seed for random span strategies");
  app->add_option("--workers", c.workers, "Scoring threads")->check(CLI::PositiveNumber);
}

// Output target: a file when a path is given, stdout otherwise.
std::ostream& output(const std::string& path, std::unique_ptr<std::ofstream>& holder) {
  if (path.empty() || path == "-") return std::cout;
  holder = std::make_unique<std::ofstream>(path);
  if (!*holder) throw ValidationError("cannot write '" + path + "'");
  return *holder;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predicate-argument span alignment for paraphrase identification"};
  app.require_subcommand(1);

  RunConfig run;
  std::string strategy = "pas", mode = "aligned", out_path, missing_path, pair_id;
  auto* score = app.add_subcommand("score", "Score every dataset pair");
  add_run_options(score, run, strategy, mode);
  score->add_option("--out", out_path, "Score file (default stdout)");
  score->add_option("--missing-out", missing_path,
                    "Where to list phrases missing from the phrase store");

  auto* explain = app.add_subcommand("explain", "Print the alignment table of one pair");
  add_run_options(explain, run, strategy, mode);
  explain->add_option("--pair-id", pair_id, "Pair to explain")->required();
  explain->add_option("--missing-out", missing_path,
                      "Where to list phrases missing from the phrase store");

  DatasetOptions dev_pairs, test_pairs;
  std::string dev_scores, test_scores, json_path;
  auto* calibrate = app.add_subcommand(
      "calibrate", "Tune F1 and accuracy thresholds on dev scores and evaluate on test scores");
  calibrate->add_option("--dev-scores", dev_scores, "Score file of the dev pairs")->required();
  calibrate->add_option("--test-scores", test_scores, "Score file of the test pairs")->required();
  add_dataset_options(calibrate, dev_pairs, "dev-");
  add_dataset_options(calibrate, test_pairs, "test-");
  calibrate->add_option("--json", json_path, "Also write the reports as JSON");

  DatasetOptions eval_pairs;
  double threshold = 0.0;
  std::string eval_scores;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Metrics of a score file at a threshold");
  evaluate_cmd->add_option("--scores", eval_scores, "Score file to evaluate")->required();
  evaluate_cmd->add_option("--threshold", threshold, "Predict positive when score >= threshold")->required();
  add_dataset_options(evaluate_cmd, eval_pairs);
  evaluate_cmd->add_option("--json", json_path, "Also write the report as JSON");

  DatasetOptions overlap_pairs;
  auto* overlap = app.add_subcommand("overlap", "Mean unigram Jaccard overlap per class");
  add_dataset_options(overlap, overlap_pairs);

  DatasetOptions split_pairs;
  double fraction = 0.2;
  std::uint64_t split_seed = kDefaultSeed;
  std::string train_out, dev_out;
  auto* split = app.add_subcommand("split", "Stratified random dev split");
  add_dataset_options(split, split_pairs);
  split->add_option("--fraction", fraction, "Share of each class sent to dev");
  split->add_option("--seed", split_seed, "Shuffle seed");
  split->add_option("--train-out", train_out, "Train rows output file")->required();
  split->add_option("--dev-out", dev_out, "Dev rows output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    run.strategy = *parse_strategy(strategy);
    run.mode = *parse_mode(mode);
    std::unique_ptr<std::ofstream> file, json_file, second_file;
    if (score->parsed()) {
      cmd_score(run, output(out_path, file));
    } else if (explain->parsed()) {
      cmd_explain(run, pair_id, std::cout);
    } else if (calibrate->parsed()) {
      std::ostream* json = json_path.empty() ? nullptr : &output(json_path, json_file);
      cmd_calibrate(dev_scores, dev_pairs, test_scores, test_pairs, std::cout, json);
    } else if (evaluate_cmd->parsed()) {
      std::ostream* json = json_path.empty() ? nullptr : &output(json_path, json_file);
      cmd_evaluate(eval_scores, eval_pairs, threshold, std::cout, json);
    } else if (overlap->parsed()) {
      cmd_overlap(overlap_pairs, std::cout);
    } else if (split->parsed()) {
      cmd_split(split_pairs, fraction, split_seed, output(train_out, file),
                output(dev_out, second_file));
    }
    if (const auto zero = zero_norm_counter().load(); zero > 0) {
      std::cerr << "warning: " << zero << " cosine(s) involved a zero-norm vector and scored 0\n";
    }
  } catch (const MissingPhraseError& e) {
    std::unique_ptr<std::ofstream> missing_file;
    std::ostream& out = missing_path.empty() ? std::cerr : output(missing_path, missing_file);
    for (const auto& p : e.phrases()) out << "missing-phrase\t" << p << '\n';
    std::cerr << "error: " << e.phrases().size() << " aligned phrase(s) are missing from the phrase store\n";
    return kMissingPhrases;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}

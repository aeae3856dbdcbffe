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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "pasalign/data_io.hpp"
#include "pasalign/error.hpp"
#include "pasalign/similarity.hpp"
#include "pasalign/spans.hpp"

namespace pasalign {

inline constexpr std::uint64_t kDefaultSeed = 20220710;

struct ScoringConfig {
  SpanStrategy strategy = SpanStrategy::pas;
  ScoreMode mode = ScoreMode::aligned;
  std::uint64_t seed = kDefaultSeed;
  const PhraseStore* phrases = nullptr;  // required for aligned-decontext
};

struct ScoredPair {
  PairScore score;
  SpanSet spans_a;
  SpanSet spans_b;
};

inline const EncodedSentence& resolve(const EncodedCorpus& corpus, const DatasetPair& pair,
                                      const std::string& id) {
  const auto* s = corpus.find(id);
  if (!s) {
    throw ValidationError("pair '" + pair.pair_id + "': unknown sentence id '" + id + "'");
  }
  return *s;
}

inline ScoredPair score_pair(const EncodedCorpus& corpus, const DatasetPair& pair,
                             const ScoringConfig& config) {
  const auto& a = resolve(corpus, pair, pair.id_a);
  const auto& b = resolve(corpus, pair, pair.id_b);
  ScoredPair out;
  if (config.mode == ScoreMode::vanilla) {
    out.score = vanilla_score(a, b);
    out.score.pair_id = pair.pair_id;
    return out;
  }
  out.spans_a = build_spans(a.record, config.strategy, config.seed);
  out.spans_b = build_spans(b.record, config.strategy, config.seed);
  auto result = align_and_score(out.spans_a, a.tokens, out.spans_b, b.tokens);
  if (config.mode == ScoreMode::aligned_decontext) {
    if (!config.phrases) throw ValidationError("aligned-decontext mode requires a phrase store");
    out.score = rescore_decontextualized(result, out.spans_a, out.spans_b, *config.phrases);
  } else {
    out.score.score = result.score;
    out.score.mode = ScoreMode::aligned;
    out.score.alignment = std::move(result);
  }
  out.score.pair_id = pair.pair_id;
  return out;
}

/// Scores every pair on `workers` threads. Results come back in input
/// order and do not depend on the worker count. Missing phrases are
/// gathered across all pairs into one MissingPhraseError; any other failure
/// rethrows the error of the earliest failing pair.
inline std::vector<ScoreLine> score_dataset(const EncodedCorpus& corpus,
                                            const std::vector<DatasetPair>& pairs,
                                            const ScoringConfig& config, std::size_t workers = 1) {
  std::vector<ScoreLine> results(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < pairs.size();) {
      try {
        const auto scored = score_pair(corpus, pairs[i], config);
        results[i] = {scored.score.pair_id, scored.score.score, scored.score.mode};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(pairs.size(), 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<std::string> missing;
  std::unordered_set<std::string> seen;
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const MissingPhraseError& m) {
      for (const auto& p : m.phrases()) {
        if (seen.insert(p).second) missing.push_back(p);
      }
    }
  }
  if (!missing.empty()) throw MissingPhraseError(std::move(missing));
  return results;
}

namespace detail {
inline std::string cell_text(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '\t' || c == '\n'; }, ' ');
  return s;
}
}  // namespace detail

/// Tab-separated alignment table: a header row of B-span surfaces, one row
/// per A span with every cosine (selected cells suffixed '*'), a blank line,
/// then one "aligned" line per pair and a final "score" line.
inline std::string explain_table(const ScoredPair& scored) {
  if (!scored.score.alignment) {
    throw ValidationError("pair '" + scored.score.pair_id + "' has no alignment to explain");
  }
  const auto& result = *scored.score.alignment;
  const auto& c = result.matrix;
  std::vector<char> selected(c.rows() * c.cols(), 0);
  for (const auto& p : result.aligned) selected[p.span_a * c.cols() + p.span_b] = 1;

  std::ostringstream out;
  for (const auto& span : scored.spans_b.spans) out << '\t' << detail::cell_text(span.surface);
  out << '\n';
  for (std::size_t m = 0; m < c.rows(); ++m) {
    out << detail::cell_text(scored.spans_a.spans[m].surface);
    for (std::size_t n = 0; n < c.cols(); ++n) {
      out << '\t' << format_real(c(m, n)) << (selected[m * c.cols() + n] ? "*" : "");
    }
    out << '\n';
  }
  out << '\n';
  for (const auto& p : result.aligned) {
    out << "aligned\t" << detail::cell_text(scored.spans_a.spans[p.span_a].surface) << '\t'
        << detail::cell_text(scored.spans_b.spans[p.span_b].surface) << '\t'
        << format_real(p.score) << '\n';
  }
  out << "score\t" << format_real(result.score) << '\n';
  return out.str();
}

}  // namespace pasalign

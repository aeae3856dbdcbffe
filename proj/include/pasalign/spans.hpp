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

// Sentence records and the span builders that turn them into alignment
// units: predicate-argument spans from SRL frames, plus token-level and
// random baselines.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pasalign/error.hpp"
#include "pasalign/random.hpp"

namespace pasalign {

/// Half-open subtoken range [begin, end) covered by one word.
struct SubtokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const SubtokenRange&, const SubtokenRange&) = default;
};

struct SRLArgument {
  std::string role;
  std::size_t start_word = 0;
  std::size_t end_word = 0;  // exclusive

  friend bool operator==(const SRLArgument&, const SRLArgument&) = default;
};

struct SRLFrame {
  std::size_t predicate_word = 0;
  std::vector<SRLArgument> arguments;

  friend bool operator==(const SRLFrame&, const SRLFrame&) = default;
};

/// One tokenized sentence with its SRL analysis. Embeddings are carried
/// separately (see TokenEmbeddings).
struct SentenceRecord {
  std::string id;
  std::string text;
  std::vector<std::string> words;
  std::vector<SubtokenRange> word_to_subtokens;
  std::size_t embedding_dim = 0;
  std::size_t token_count = 0;
  std::vector<SRLFrame> srl_frames;
  bool has_sentence_embedding = false;

  friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

/// Checks the record invariants; throws ValidationError mentioning the id.
inline void validate_record(const SentenceRecord& r) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("record '" + r.id + "': " + what);
  };
  if (r.words.empty()) fail("has no words");
  if (r.embedding_dim == 0) fail("embedding_dim must be positive");
  if (r.word_to_subtokens.size() != r.words.size()) {
    fail("word_to_subtokens has " + std::to_string(r.word_to_subtokens.size()) +
         " ranges for " + std::to_string(r.words.size()) + " words");
  }
  std::size_t expected_begin = 0;
  for (std::size_t w = 0; w < r.word_to_subtokens.size(); ++w) {
    const auto& range = r.word_to_subtokens[w];
    if (range.begin != expected_begin || range.end <= range.begin) {
      fail("subtoken range of word " + std::to_string(w) + " is [" +
           std::to_string(range.begin) + ", " + std::to_string(range.end) +
           "), expected a non-empty range starting at " + std::to_string(expected_begin));
    }
    expected_begin = range.end;
  }
  if (expected_begin != r.token_count) {
    fail("subtoken ranges cover [0, " + std::to_string(expected_begin) +
         ") but token_count is " + std::to_string(r.token_count));
  }
  for (std::size_t f = 0; f < r.srl_frames.size(); ++f) {
    const auto& frame = r.srl_frames[f];
    if (frame.predicate_word >= r.words.size()) {
      fail("frame " + std::to_string(f) + " predicate word " +
           std::to_string(frame.predicate_word) + " out of range");
    }
    for (std::size_t a = 0; a < frame.arguments.size(); ++a) {
      const auto& arg = frame.arguments[a];
      if (arg.start_word >= arg.end_word || arg.end_word > r.words.size()) {
        fail("frame " + std::to_string(f) + " argument " + std::to_string(a) + " (" +
             arg.role + ") has invalid word range [" + std::to_string(arg.start_word) +
             ", " + std::to_string(arg.end_word) + ")");
      }
    }
  }
}

enum class SpanKind { pas, whole_sentence, token, random, continuous_random };
enum class SpanStrategy { pas, token, random, continuous_random };

inline std::string_view to_string(SpanStrategy s) {
  switch (s) {
    case SpanStrategy::pas: return "pas";
    case SpanStrategy::token: return "token";
    case SpanStrategy::random: return "random";
    case SpanStrategy::continuous_random: return "continuous-random";
  }
  return "?";
}

inline std::optional<SpanStrategy> parse_strategy(std::string_view s) {
  if (s == "pas") return SpanStrategy::pas;
  if (s == "token") return SpanStrategy::token;
  if (s == "random") return SpanStrategy::random;
  if (s == "continuous-random") return SpanStrategy::continuous_random;
  return std::nullopt;
}

struct PASpan {
  std::vector<std::size_t> word_indices;      // sorted, unique
  std::vector<std::size_t> subtoken_indices;  // sorted, unique
  std::string surface;
  SpanKind kind = SpanKind::pas;

  friend bool operator==(const PASpan&, const PASpan&) = default;
};

struct SpanSet {
  std::string record_id;
  std::vector<PASpan> spans;
  SpanStrategy strategy = SpanStrategy::pas;

  friend bool operator==(const SpanSet&, const SpanSet&) = default;
};

/// Union of the subtoken ranges of the given words, ascending.
inline std::vector<std::size_t> map_words_to_subtokens(const SentenceRecord& r,
                                                       const std::vector<std::size_t>& word_indices) {
  std::vector<std::size_t> out;
  for (std::size_t w : word_indices) {
    if (w >= r.word_to_subtokens.size()) {
      throw ValidationError("record '" + r.id + "': word index " + std::to_string(w) +
                            " out of range (" + std::to_string(r.words.size()) + " words)");
    }
    for (std::size_t t = r.word_to_subtokens[w].begin; t < r.word_to_subtokens[w].end; ++t) {
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) {
    throw ValidationError("record '" + r.id + "': span maps to no subtokens");
  }
  return out;
}

/// Materializes a span from an arbitrary collection of word indices.
inline PASpan make_span(const SentenceRecord& r, std::vector<std::size_t> word_indices, SpanKind kind) {
  std::sort(word_indices.begin(), word_indices.end());
  word_indices.erase(std::unique(word_indices.begin(), word_indices.end()), word_indices.end());
  PASpan span;
  span.subtoken_indices = map_words_to_subtokens(r, word_indices);
  for (std::size_t w : word_indices) {
    if (!span.surface.empty()) span.surface += ' ';
    span.surface += r.words[w];
  }
  span.word_indices = std::move(word_indices);
  span.kind = kind;
  return span;
}

inline PASpan whole_sentence_span(const SentenceRecord& r) {
  std::vector<std::size_t> all(r.words.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return make_span(r, std::move(all), SpanKind::whole_sentence);
}

/// One span per (predicate, argument) pair, in frame order then argument
/// order. Falls back to a single whole-sentence span when the frames yield
/// nothing.
inline SpanSet build_pas_spans(const SentenceRecord& r) {
  validate_record(r);
  SpanSet set{r.id, {}, SpanStrategy::pas};
  for (const auto& frame : r.srl_frames) {
    for (const auto& arg : frame.arguments) {
      std::vector<std::size_t> words{frame.predicate_word};
      for (std::size_t w = arg.start_word; w < arg.end_word; ++w) words.push_back(w);
      set.spans.push_back(make_span(r, std::move(words), SpanKind::pas));
    }
  }
  if (set.spans.empty()) set.spans.push_back(whole_sentence_span(r));
  return set;
}

inline SpanSet build_token_spans(const SentenceRecord& r) {
  validate_record(r);
  SpanSet set{r.id, {}, SpanStrategy::token};
  for (std::size_t w = 0; w < r.words.size(); ++w) {
    set.spans.push_back(make_span(r, {w}, SpanKind::token));
  }
  return set;
}

/// `span_count` spans of uniformly drawn length, each a uniformly drawn set
/// of distinct (not necessarily adjacent) words.
inline SpanSet build_random_spans(const SentenceRecord& r, std::size_t span_count, std::uint64_t seed) {
  if (span_count < 1) throw ValidationError("record '" + r.id + "': span_count must be >= 1");
  validate_record(r);
  SeededRng rng(seed);
  const std::size_t n = r.words.size();
  SpanSet set{r.id, {}, SpanStrategy::random};
  std::vector<std::size_t> pool(n);
  for (std::size_t s = 0; s < span_count; ++s) {
    const std::size_t length = 1 + rng.below(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `length` slots become the sample.
    for (std::size_t i = 0; i < length; ++i) {
      std::swap(pool[i], pool[i + rng.below(n - i)]);
    }
    set.spans.push_back(make_span(
        r, std::vector<std::size_t>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(length)),
        SpanKind::random));
  }
  return set;
}

/// As build_random_spans, but every span is a contiguous run of words.
inline SpanSet build_continuous_random_spans(const SentenceRecord& r, std::size_t span_count,
                                             std::uint64_t seed) {
  if (span_count < 1) throw ValidationError("record '" + r.id + "': span_count must be >= 1");
  validate_record(r);
  SeededRng rng(seed);
  const std::size_t n = r.words.size();
  SpanSet set{r.id, {}, SpanStrategy::continuous_random};
  for (std::size_t s = 0; s < span_count; ++s) {
    const std::size_t length = 1 + rng.below(n);
    const std::size_t start = rng.below(n - length + 1);
    std::vector<std::size_t> words(length);
    std::iota(words.begin(), words.end(), start);
    set.spans.push_back(make_span(r, std::move(words), SpanKind::continuous_random));
  }
  return set;
}

/// Dispatches on strategy. Random strategies draw as many spans as the PAS
/// strategy yields for the same record, from a stream seeded by
/// (seed, record id).
inline SpanSet build_spans(const SentenceRecord& r, SpanStrategy strategy, std::uint64_t seed) {
  switch (strategy) {
    case SpanStrategy::pas: return build_pas_spans(r);
    case SpanStrategy::token: return build_token_spans(r);
    case SpanStrategy::random:
      return build_random_spans(r, build_pas_spans(r).spans.size(), derive_seed(seed, r.id));
    case SpanStrategy::continuous_random:
      return build_continuous_random_spans(r, build_pas_spans(r).spans.size(),
                                           derive_seed(seed, r.id));
  }
  throw ValidationError("unknown span strategy");
}

}  // namespace pasalign

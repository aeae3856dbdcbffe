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

// Span pooling, cosine similarity matrices and the align-then-average
// sentence score, plus the whole-sentence (vanilla) and de-contextualized
// scoring modes.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pasalign/assignment.hpp"
#include "pasalign/error.hpp"
#include "pasalign/spans.hpp"

namespace pasalign {

/// Per-subtoken contextual vectors of one sentence, row-major.
class TokenEmbeddings {
 public:
  TokenEmbeddings() = default;

  TokenEmbeddings(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
    if (dim_ == 0) throw ValidationError("token embedding dimension must be positive");
    if (data_.size() % dim_ != 0) {
      throw ValidationError("token embedding data size " + std::to_string(data_.size()) +
                            " is not a multiple of dimension " + std::to_string(dim_));
    }
    for (double x : data_) {
      if (!std::isfinite(x)) throw ValidationError("token embedding has a non-finite entry");
    }
  }

  static TokenEmbeddings from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ValidationError("token embeddings need at least one vector");
    std::vector<double> data;
    const std::size_t dim = rows.front().size();
    for (const auto& row : rows) {
      if (row.size() != dim) {
        throw ValidationError("token embedding rows have mixed dimensions " +
                              std::to_string(dim) + " and " + std::to_string(row.size()));
      }
      data.insert(data.end(), row.begin(), row.end());
    }
    return TokenEmbeddings(dim, std::move(data));
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  const std::vector<double>& data() const noexcept { return data_; }

  TokenEmbeddings scaled(double factor) const {
    TokenEmbeddings out = *this;
    for (double& x : out.data_) x *= factor;
    return out;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// A sentence as loaded from an encoded corpus.
struct EncodedSentence {
  SentenceRecord record;
  TokenEmbeddings tokens;
  std::optional<std::vector<double>> sentence_embedding;
};

inline void validate_encoded(const EncodedSentence& s) {
  validate_record(s.record);
  if (s.tokens.dim() != s.record.embedding_dim) {
    throw ValidationError("record '" + s.record.id + "': token embedding dimension " +
                          std::to_string(s.tokens.dim()) + " does not match embedding_dim " +
                          std::to_string(s.record.embedding_dim));
  }
  if (s.tokens.size() != s.record.token_count) {
    throw ValidationError("record '" + s.record.id + "': " + std::to_string(s.tokens.size()) +
                          " token vectors for token_count " +
                          std::to_string(s.record.token_count));
  }
  if (s.sentence_embedding.has_value() != s.record.has_sentence_embedding) {
    throw ValidationError("record '" + s.record.id +
                          "': has_sentence_embedding disagrees with the stored vector");
  }
  if (s.sentence_embedding) {
    if (s.sentence_embedding->size() != s.record.embedding_dim) {
      throw ValidationError("record '" + s.record.id + "': sentence embedding dimension " +
                            std::to_string(s.sentence_embedding->size()) +
                            " does not match embedding_dim " +
                            std::to_string(s.record.embedding_dim));
    }
    for (double x : *s.sentence_embedding) {
      if (!std::isfinite(x)) {
        throw ValidationError("record '" + s.record.id + "': sentence embedding is not finite");
      }
    }
  }
}

struct SpanRepresentation {
  std::vector<double> vector;
  const PASpan* source = nullptr;
};

/// Flat mean over the selected subtoken vectors.
inline SpanRepresentation pool_span(const TokenEmbeddings& emb,
                                    const std::vector<std::size_t>& subtoken_indices) {
  if (subtoken_indices.empty()) throw ValidationError("cannot pool an empty span");
  std::vector<double> acc(emb.dim(), 0.0);
  for (std::size_t t : subtoken_indices) {
    if (t >= emb.size()) {
      throw ValidationError("subtoken index " + std::to_string(t) + " out of range (" +
                            std::to_string(emb.size()) + " tokens)");
    }
    const auto row = emb[t];
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += row[k];
  }
  const auto count = static_cast<double>(subtoken_indices.size());
  for (double& x : acc) x /= count;
  return {std::move(acc), nullptr};
}

inline SpanRepresentation pool_span(const TokenEmbeddings& emb, const PASpan& span) {
  auto rep = pool_span(emb, span.subtoken_indices);
  rep.source = &span;
  return rep;
}

/// Number of cosine evaluations that hit a zero-norm vector, process-wide.
inline std::atomic<std::size_t>& zero_norm_counter() {
  static std::atomic<std::size_t> counter{0};
  return counter;
}

/// Cosine similarity clamped to [-1, 1]; 0 when either vector has zero norm.
inline double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine of vectors with dimensions " + std::to_string(u.size()) +
                          " and " + std::to_string(v.size()));
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  if (uu == 0.0 || vv == 0.0) {
    zero_norm_counter().fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

inline CostMatrix build_similarity_matrix(const std::vector<SpanRepresentation>& reps_a,
                                          const std::vector<SpanRepresentation>& reps_b) {
  if (reps_a.empty() || reps_b.empty()) {
    throw ValidationError("similarity matrix needs at least one span on each side");
  }
  CostMatrix c(reps_a.size(), reps_b.size());
  for (std::size_t m = 0; m < reps_a.size(); ++m)
    for (std::size_t n = 0; n < reps_b.size(); ++n)
      c(m, n) = cosine(reps_a[m].vector, reps_b[n].vector);
  return c;
}

struct AlignedSpanPair {
  std::size_t span_a;
  std::size_t span_b;
  double score;
};

struct AlignmentResult {
  CostMatrix matrix{1, 1};
  std::vector<AlignedSpanPair> aligned;  // ascending span_a
  double score = 0.0;
};

namespace detail {
inline double mean_score(const std::vector<AlignedSpanPair>& aligned) {
  double total = 0.0;
  for (const auto& p : aligned) total += p.score;
  return total / static_cast<double>(aligned.size());
}
}  // namespace detail

/// Aligns spans of sentence A to spans of sentence B by maximum-weight
/// assignment over span cosines and averages the selected cosines.
inline AlignmentResult align_and_score(const SpanSet& spans_a, const TokenEmbeddings& emb_a,
                                       const SpanSet& spans_b, const TokenEmbeddings& emb_b) {
  if (spans_a.spans.empty() || spans_b.spans.empty()) {
    throw ValidationError("cannot align an empty span set");
  }
  std::vector<SpanRepresentation> reps_a, reps_b;
  reps_a.reserve(spans_a.spans.size());
  reps_b.reserve(spans_b.spans.size());
  for (const auto& s : spans_a.spans) reps_a.push_back(pool_span(emb_a, s));
  for (const auto& s : spans_b.spans) reps_b.push_back(pool_span(emb_b, s));

  AlignmentResult result;
  result.matrix = build_similarity_matrix(reps_a, reps_b);
  const Assignment assignment = solve_max_assignment(result.matrix);
  for (const auto& p : assignment.pairs) {
    result.aligned.push_back({p.row, p.col, result.matrix(p.row, p.col)});
  }
  result.score = detail::mean_score(result.aligned);
  return result;
}

enum class ScoreMode { vanilla, aligned, aligned_decontext };

inline std::string_view to_string(ScoreMode m) {
  switch (m) {
    case ScoreMode::vanilla: return "vanilla";
    case ScoreMode::aligned: return "aligned";
    case ScoreMode::aligned_decontext: return "aligned-decontext";
  }
  return "?";
}

inline std::optional<ScoreMode> parse_mode(std::string_view s) {
  if (s == "vanilla") return ScoreMode::vanilla;
  if (s == "aligned") return ScoreMode::aligned;
  if (s == "aligned-decontext") return ScoreMode::aligned_decontext;
  return std::nullopt;
}

struct PairScore {
  std::string pair_id;
  double score = 0.0;
  ScoreMode mode = ScoreMode::vanilla;
  std::optional<AlignmentResult> alignment;
};

inline PairScore vanilla_score(const EncodedSentence& a, const EncodedSentence& b) {
  for (const auto* s : {&a, &b}) {
    if (!s->sentence_embedding) {
      throw ValidationError("record '" + s->record.id + "' has no sentence embedding");
    }
  }
  return {"", cosine(*a.sentence_embedding, *b.sentence_embedding), ScoreMode::vanilla,
          std::nullopt};
}

/// Context-free phrase vectors keyed by exact span surface.
class PhraseStore {
 public:
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }

  /// Throws ValidationError on a duplicate key or a dimension mismatch.
  void insert(std::string phrase, std::vector<double> vec) {
    if (vec.empty()) throw ValidationError("phrase '" + phrase + "' has an empty embedding");
    if (dim_ == 0) dim_ = vec.size();
    if (vec.size() != dim_) {
      throw ValidationError("phrase '" + phrase + "' has dimension " +
                            std::to_string(vec.size()) + ", store dimension is " +
                            std::to_string(dim_));
    }
    for (double x : vec) {
      if (!std::isfinite(x)) throw ValidationError("phrase '" + phrase + "' is not finite");
    }
    if (vectors_.contains(phrase)) throw ValidationError("duplicate phrase '" + phrase + "'");
    keys_.push_back(phrase);
    vectors_.emplace(std::move(phrase), std::move(vec));
  }

  const std::vector<double>* find(const std::string& phrase) const {
    auto it = vectors_.find(phrase);
    return it == vectors_.end() ? nullptr : &it->second;
  }

  /// Keys in insertion order.
  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Surfaces of aligned spans absent from the store, deduplicated, in
/// alignment order (A side before B side for each pair).
inline std::vector<std::string> missing_phrases(const AlignmentResult& result,
                                                const SpanSet& spans_a, const SpanSet& spans_b,
                                                const PhraseStore& store) {
  std::vector<std::string> missing;
  std::unordered_set<std::string> seen;
  auto check = [&](const std::string& surface) {
    if (!store.find(surface) && seen.insert(surface).second) missing.push_back(surface);
  };
  for (const auto& p : result.aligned) {
    check(spans_a.spans.at(p.span_a).surface);
    check(spans_b.spans.at(p.span_b).surface);
  }
  return missing;
}

/// Keeps the contextual alignment and replaces each pair's score with the
/// cosine of the two stored phrase vectors. Throws MissingPhraseError listing
/// every absent surface.
inline PairScore rescore_decontextualized(const AlignmentResult& result, const SpanSet& spans_a,
                                          const SpanSet& spans_b, const PhraseStore& store) {
  if (auto missing = missing_phrases(result, spans_a, spans_b, store); !missing.empty()) {
    throw MissingPhraseError(std::move(missing));
  }
  AlignmentResult rescored = result;
  for (auto& p : rescored.aligned) {
    p.score = cosine(*store.find(spans_a.spans[p.span_a].surface),
                     *store.find(spans_b.spans[p.span_b].surface));
  }
  rescored.score = detail::mean_score(rescored.aligned);
  PairScore out;
  out.score = rescored.score;
  out.mode = ScoreMode::aligned_decontext;
  out.alignment = std::move(rescored);
  return out;
}

}  // namespace pasalign

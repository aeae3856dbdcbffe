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

#include "pasalign/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "pasalign/data_io.hpp"
#include "test_util.hpp"

namespace pasalign {
namespace {

using testing::random_sentence;

// Oracle mean, summed in reverse subtoken order.
std::vector<double> ReverseMean(const TokenEmbeddings& emb, const std::vector<std::size_t>& idx) {
  std::vector<double> out(emb.dim(), 0.0);
  for (std::size_t k = 0; k < emb.dim(); ++k) {
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) out[k] += emb[*it][k];
    out[k] /= static_cast<double>(idx.size());
  }
  return out;
}

double OracleCosine(const std::vector<double>& u, const std::vector<double>& v) {
  long double dot = 0, uu = 0, vv = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += static_cast<long double>(u[k]) * v[k];
    uu += static_cast<long double>(u[k]) * u[k];
    vv += static_cast<long double>(v[k]) * v[k];
  }
  return static_cast<double>(dot / std::sqrt(uu * vv));
}

TEST(PoolSpan, SingleSubtokenUnchanged) {
  const auto emb = TokenEmbeddings::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(pool_span(emb, std::vector<std::size_t>{1}).vector, (std::vector<double>{4, 5, 6}));
}

TEST(PoolSpan, ArithmeticMean) {
  const auto emb = TokenEmbeddings::from_rows({{1, 0}, {0, 1}});
  EXPECT_EQ(pool_span(emb, std::vector<std::size_t>{0, 1}).vector, (std::vector<double>{0.5, 0.5}));
}

TEST(PoolSpan, MatchesReverseSummation) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> rows(12, std::vector<double>(8));
  for (auto& row : rows)
    for (double& x : row) x = g(rng);
  const auto emb = TokenEmbeddings::from_rows(rows);
  const std::vector<std::size_t> idx{1, 4, 5, 9, 11};
  const auto pooled = pool_span(emb, idx).vector;
  const auto oracle = ReverseMean(emb, idx);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(pooled[k], oracle[k], 1e-12);
}

TEST(PoolSpan, Errors) {
  const auto emb = TokenEmbeddings::from_rows({{1, 0}});
  EXPECT_THROW(pool_span(emb, std::vector<std::size_t>{}), ValidationError);
  EXPECT_THROW(pool_span(emb, std::vector<std::size_t>{3}), ValidationError);
}

TEST(Cosine, Basics) {
  const std::vector<double> x{0.3, -2.0, 5.5};
  EXPECT_NEAR(cosine(x, x), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  // 32 / sqrt(14 * 77)
  EXPECT_NEAR(cosine(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}), 0.974631846,
              1e-9);
  EXPECT_NEAR(cosine(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}),
              32.0 / std::sqrt(1078.0), 1e-15);
}

TEST(Cosine, ZeroNormIsZero) {
  EXPECT_EQ(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 2}), 0.0);
  EXPECT_EQ(cosine(std::vector<double>{0, 0}, std::vector<double>{0, 0}), 0.0);
}

TEST(Cosine, DimensionMismatch) {
  EXPECT_THROW(cosine(std::vector<double>{1}, std::vector<double>{1, 2}), ValidationError);
}

TEST(Cosine, ClampedToUnitInterval) {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> g(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> u(5), v(5);
    for (double& x : u) x = g(rng);
    const double k = std::abs(g(rng)) + 1e-3;
    for (std::size_t j = 0; j < 5; ++j) v[j] = (i % 2 ? k : -k) * u[j];
    const double c = cosine(u, v);
    EXPECT_LE(std::abs(c), 1.0);
    EXPECT_NEAR(std::abs(c), 1.0, 1e-12);
  }
}

TEST(BuildSimilarityMatrix, SmallCases) {
  const std::vector<SpanRepresentation> one{{{0.3, 0.4}, nullptr}};
  const auto c = build_similarity_matrix(one, one);
  ASSERT_EQ(c.rows(), 1u);
  EXPECT_NEAR(c(0, 0), 1.0, 1e-15);

  const std::vector<SpanRepresentation> basis{{{1, 0}, nullptr}, {{0, 1}, nullptr}};
  const auto id = build_similarity_matrix(basis, basis);
  EXPECT_EQ(id.data(), (std::vector<double>{1, 0, 0, 1}));

  EXPECT_THROW(build_similarity_matrix({}, basis), ValidationError);
}

TEST(BuildSimilarityMatrix, MatchesEntrywiseOracle) {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<SpanRepresentation> a(3), b(2);
  for (auto* side : {&a, &b})
    for (auto& rep : *side) {
      rep.vector.resize(8);
      for (double& x : rep.vector) x = g(rng);
    }
  const auto c = build_similarity_matrix(a, b);
  ASSERT_EQ(c.rows(), 3u);
  ASSERT_EQ(c.cols(), 2u);
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t n = 0; n < 2; ++n) EXPECT_NEAR(c(m, n), OracleCosine(a[m].vector, b[n].vector), 1e-14);
}

TEST(AlignAndScore, SelfPairScoresOne) {
  std::mt19937_64 rng(34);
  const auto s = random_sentence(rng, "x", 9);
  for (auto strategy : {SpanStrategy::pas, SpanStrategy::token, SpanStrategy::random,
                        SpanStrategy::continuous_random}) {
    const auto spans = build_spans(s.record, strategy, 1);
    const auto r = align_and_score(spans, s.tokens, spans, s.tokens);
    EXPECT_NEAR(r.score, 1.0, 1e-6);
    EXPECT_EQ(r.aligned.size(), spans.spans.size());
  }
}

TEST(AlignAndScore, OneSpanAgainstThree) {
  std::mt19937_64 rng(35);
  auto a = random_sentence(rng, "a", 4);
  auto b = random_sentence(rng, "b", 6);
  a.record.srl_frames.clear();
  b.record.srl_frames = {{1, {{"ARG0", 0, 1}, {"ARG1", 2, 3}, {"ARG2", 3, 6}}}};
  const auto sa = build_pas_spans(a.record);
  const auto sb = build_pas_spans(b.record);
  ASSERT_EQ(sa.spans.size(), 1u);
  ASSERT_EQ(sb.spans.size(), 3u);
  const auto r = align_and_score(sa, a.tokens, sb, b.tokens);
  ASSERT_EQ(r.aligned.size(), 1u);
  double best = -2.0;
  for (std::size_t n = 0; n < 3; ++n) best = std::max(best, r.matrix(0, n));
  EXPECT_DOUBLE_EQ(r.score, best);
}

TEST(AlignAndScore, GoldenFixturePair) {
  const auto corpus = load_encoded_corpus(testing::fixture("corpus.jsonl"));
  const auto& a = *corpus.find("s2");
  const auto& b = *corpus.find("s3");
  const auto r = align_and_score(build_pas_spans(a.record), a.tokens, build_pas_spans(b.record),
                                 b.tokens);
  // golden_scores_aligned.tsv, pair p2 (brute-force oracle)
  EXPECT_NEAR(r.score, 0.0636961864, 1e-6);
}

TEST(VanillaScore, Cases) {
  std::mt19937_64 rng(36);
  auto a = random_sentence(rng, "a", 3);
  auto b = random_sentence(rng, "b", 3);
  EXPECT_NEAR(vanilla_score(a, a).score, 1.0, 1e-15);
  EXPECT_EQ(vanilla_score(a, a).mode, ScoreMode::vanilla);
  EXPECT_FALSE(vanilla_score(a, a).alignment.has_value());
  EXPECT_NEAR(vanilla_score(a, b).score, OracleCosine(*a.sentence_embedding, *b.sentence_embedding),
              1e-14);
  auto zero = a;
  zero.sentence_embedding = std::vector<double>(8, 0.0);
  EXPECT_EQ(vanilla_score(zero, b).score, 0.0);
  auto none = a;
  none.sentence_embedding.reset();
  EXPECT_THROW(vanilla_score(none, b), ValidationError);
}

struct DecontextFixture {
  SpanSet spans_a, spans_b;
  AlignmentResult result;
};

// Two aligned pairs with contextual cosine 0.95 each.
DecontextFixture MakeDecontextFixture() {
  DecontextFixture f;
  f.spans_a.spans = {{{0}, {0}, "Harris announced", SpanKind::pas},
                     {{1}, {1}, "announced on twitter", SpanKind::pas}};
  f.spans_b.spans = {{{0}, {0}, "James announced", SpanKind::pas},
                     {{1}, {1}, "announced on twitter", SpanKind::pas}};
  f.result.matrix = CostMatrix::from_rows({{0.95, 0.1}, {0.1, 0.95}});
  f.result.aligned = {{0, 0, 0.95}, {1, 1, 0.95}};
  f.result.score = 0.95;
  return f;
}

TEST(RescoreDecontextualized, OrthogonalPairHalvesScore) {
  const auto f = MakeDecontextFixture();
  PhraseStore store;
  store.insert("Harris announced", {1, 0, 0});
  store.insert("James announced", {0, 1, 0});
  store.insert("announced on twitter", {0.2, 0.2, 0.9});
  const auto rescored = rescore_decontextualized(f.result, f.spans_a, f.spans_b, store);
  EXPECT_NEAR(rescored.score, 0.5, 1e-12);
  EXPECT_EQ(rescored.mode, ScoreMode::aligned_decontext);
  ASSERT_TRUE(rescored.alignment.has_value());
  ASSERT_EQ(rescored.alignment->aligned.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(rescored.alignment->aligned[i].span_a, f.result.aligned[i].span_a);
    EXPECT_EQ(rescored.alignment->aligned[i].span_b, f.result.aligned[i].span_b);
  }
}

TEST(RescoreDecontextualized, ConstantStoreScoresOne) {
  const auto f = MakeDecontextFixture();
  PhraseStore store;
  for (const char* p : {"Harris announced", "James announced", "announced on twitter"}) {
    store.insert(p, {0.5, -0.25, 2.0});
  }
  EXPECT_NEAR(rescore_decontextualized(f.result, f.spans_a, f.spans_b, store).score, 1.0, 1e-12);
}

TEST(RescoreDecontextualized, SelfAlignmentScoresOne) {
  std::mt19937_64 rng(37);
  const auto s = random_sentence(rng, "x", 8);
  const auto spans = build_pas_spans(s.record);
  const auto r = align_and_score(spans, s.tokens, spans, s.tokens);
  PhraseStore store;
  std::normal_distribution<double> g(0.0, 1.0);
  for (const auto& span : spans.spans) {
    if (store.find(span.surface)) continue;
    store.insert(span.surface, {g(rng), g(rng), g(rng), g(rng)});
  }
  EXPECT_NEAR(rescore_decontextualized(r, spans, spans, store).score, 1.0, 1e-12);
}

TEST(RescoreDecontextualized, ListsAllMissingPhrases) {
  const auto f = MakeDecontextFixture();
  PhraseStore store;
  store.insert("James announced", {1, 0});
  try {
    rescore_decontextualized(f.result, f.spans_a, f.spans_b, store);
    FAIL() << "expected MissingPhraseError";
  } catch (const MissingPhraseError& e) {
    EXPECT_EQ(e.phrases(), (std::vector<std::string>{"Harris announced", "announced on twitter"}));
  }
}

TEST(PhraseStore, RejectsDuplicatesAndMixedDims) {
  PhraseStore store;
  store.insert("a", {1, 2});
  EXPECT_THROW(store.insert("a", {1, 2}), ValidationError);
  EXPECT_THROW(store.insert("b", {1, 2, 3}), ValidationError);
}

// --- properties ------------------------------------------------------------

TEST(SimilarityProperties, SymmetryScalingAndSpanOrder) {
  std::mt19937_64 rng(38);
  std::uniform_int_distribution<std::size_t> len(1, 12);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_sentence(rng, "a", len(rng));
    const auto b = random_sentence(rng, "b", len(rng));
    for (auto strategy : {SpanStrategy::pas, SpanStrategy::token, SpanStrategy::random,
                          SpanStrategy::continuous_random}) {
      const auto sa = build_spans(a.record, strategy, trial);
      const auto sb = build_spans(b.record, strategy, trial);
      const auto ab = align_and_score(sa, a.tokens, sb, b.tokens);
      const auto ba = align_and_score(sb, b.tokens, sa, a.tokens);
      EXPECT_NEAR(ab.score, ba.score, 1e-9);

      const auto scaled = align_and_score(sa, a.tokens.scaled(scale(rng)), sb, b.tokens);
      EXPECT_NEAR(scaled.score, ab.score, 1e-9);

      auto shuffled = sb;
      std::shuffle(shuffled.spans.begin(), shuffled.spans.end(), rng);
      EXPECT_NEAR(align_and_score(sa, a.tokens, shuffled, b.tokens).score, ab.score, 1e-9);

      double lo = 2.0, hi = -2.0;
      for (const auto& p : ab.aligned) {
        lo = std::min(lo, p.score);
        hi = std::max(hi, p.score);
      }
      EXPECT_LE(lo, ab.score + 1e-15);
      EXPECT_GE(hi, ab.score - 1e-15);
      EXPECT_EQ(ab.aligned.size(), std::min(sa.spans.size(), sb.spans.size()));
    }
  }
}

}  // namespace
}  // namespace pasalign

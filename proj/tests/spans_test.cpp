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

#include "pasalign/spans.hpp"

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace pasalign {
namespace {

SentenceRecord MakeRecord(std::vector<std::string> words, std::vector<std::size_t> subtokens = {}) {
  SentenceRecord r;
  r.id = "r";
  r.words = std::move(words);
  r.embedding_dim = 4;
  std::size_t start = 0;
  for (std::size_t w = 0; w < r.words.size(); ++w) {
    const std::size_t k = subtokens.empty() ? 1 : subtokens[w];
    r.word_to_subtokens.push_back({start, start + k});
    start += k;
  }
  r.token_count = start;
  return r;
}

// "James ate some cheese whilst thinking about the play ." with the frames
// an SRL tagger assigns to "ate" and "thinking".
SentenceRecord JamesRecord() {
  auto r = MakeRecord({"James", "ate", "some", "cheese", "whilst", "thinking", "about", "the",
                       "play", "."},
                      {1, 1, 1, 2, 2, 1, 1, 1, 1, 1});
  r.id = "james";
  r.srl_frames = {
      {1, {{"ARG0", 0, 1}, {"ARG1", 2, 4}, {"ARGM-TMP", 4, 9}}},
      {5, {{"ARG0", 0, 1}, {"ARG1", 6, 9}}},
  };
  return r;
}

std::vector<std::string> Surfaces(const SpanSet& set) {
  std::vector<std::string> out;
  for (const auto& s : set.spans) out.push_back(s.surface);
  return out;
}

TEST(BuildPasSpans, WorkedExample) {
  const auto set = build_pas_spans(JamesRecord());
  EXPECT_EQ(Surfaces(set), (std::vector<std::string>{
                               "James ate",
                               "ate some cheese",
                               "ate whilst thinking about the play",
                               "James thinking",
                               "thinking about the play",
                           }));
  for (const auto& s : set.spans) EXPECT_EQ(s.kind, SpanKind::pas);
  EXPECT_EQ(set.spans[1].word_indices, (std::vector<std::size_t>{1, 2, 3}));
  // "cheese" spans subtokens 3 and 4.
  EXPECT_EQ(set.spans[1].subtoken_indices, (std::vector<std::size_t>{1, 2, 3, 4}));
}

TEST(BuildPasSpans, NoFramesFallsBackToWholeSentence) {
  const auto r = MakeRecord({"hello", "there", "world"});
  const auto set = build_pas_spans(r);
  ASSERT_EQ(set.spans.size(), 1u);
  EXPECT_EQ(set.spans[0].kind, SpanKind::whole_sentence);
  EXPECT_EQ(set.spans[0].surface, "hello there world");
  EXPECT_EQ(set.spans[0].word_indices, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(BuildPasSpans, FramesWithoutArgumentsFallBack) {
  auto r = MakeRecord({"it", "rains"});
  r.srl_frames = {{1, {}}};
  const auto set = build_pas_spans(r);
  ASSERT_EQ(set.spans.size(), 1u);
  EXPECT_EQ(set.spans[0].kind, SpanKind::whole_sentence);
}

TEST(BuildPasSpans, SmallestFrame) {
  auto r = MakeRecord({"dogs", "bark"});
  r.srl_frames = {{1, {{"ARG0", 0, 1}}}};
  const auto set = build_pas_spans(r);
  ASSERT_EQ(set.spans.size(), 1u);
  EXPECT_EQ(set.spans[0].word_indices, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(set.spans[0].surface, "dogs bark");
}

TEST(BuildPasSpans, PredicateInsideArgumentCountedOnce) {
  auto r = MakeRecord({"a", "b", "c"});
  r.srl_frames = {{1, {{"ARG1", 0, 3}}}};
  const auto set = build_pas_spans(r);
  EXPECT_EQ(set.spans[0].word_indices, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(BuildPasSpans, DuplicateSpansAreKept) {
  auto r = MakeRecord({"a", "b", "c"});
  r.srl_frames = {{1, {{"ARG0", 0, 1}}}, {1, {{"ARG0", 0, 1}}}};
  EXPECT_EQ(build_pas_spans(r).spans.size(), 2u);
}

TEST(BuildPasSpans, MalformedFramesNameRecord) {
  auto r = MakeRecord({"a", "b"});
  r.id = "bad-record";
  r.srl_frames = {{5, {{"ARG0", 0, 1}}}};
  try {
    build_pas_spans(r);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("bad-record"), std::string::npos);
  }
  r.srl_frames = {{0, {{"ARG0", 1, 1}}}};
  EXPECT_THROW(build_pas_spans(r), ValidationError);
  r.srl_frames = {{0, {{"ARG0", 1, 3}}}};
  EXPECT_THROW(build_pas_spans(r), ValidationError);
}

TEST(ValidateRecord, SubtokenCoverage) {
  auto r = MakeRecord({"a", "b"});
  EXPECT_NO_THROW(validate_record(r));
  r.word_to_subtokens[1] = {2, 3};  // gap
  EXPECT_THROW(validate_record(r), ValidationError);
  r = MakeRecord({"a", "b"});
  r.token_count = 3;
  EXPECT_THROW(validate_record(r), ValidationError);
  r = MakeRecord({"a", "b"});
  r.word_to_subtokens[0] = {0, 0};
  EXPECT_THROW(validate_record(r), ValidationError);
  EXPECT_THROW(validate_record(MakeRecord({})), ValidationError);
}

TEST(BuildTokenSpans, OnePerWord) {
  const auto set = build_token_spans(MakeRecord({"x", "y", "z"}));
  ASSERT_EQ(set.spans.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(set.spans[i].word_indices, (std::vector<std::size_t>{i}));
  }
}

TEST(BuildTokenSpans, SingleWordMatchesFallback) {
  const auto r = MakeRecord({"only"});
  const auto tokens = build_token_spans(r);
  const auto pas = build_pas_spans(r);
  ASSERT_EQ(tokens.spans.size(), 1u);
  EXPECT_EQ(tokens.spans[0].word_indices, pas.spans[0].word_indices);
  EXPECT_EQ(tokens.spans[0].subtoken_indices, pas.spans[0].subtoken_indices);
  EXPECT_EQ(tokens.spans[0].surface, pas.spans[0].surface);
}

TEST(BuildTokenSpans, WorkedExampleCountsWords) {
  const auto r = JamesRecord();
  EXPECT_EQ(build_token_spans(r).spans.size(), r.words.size());
  EXPECT_EQ(r.words.size(), 10u);
}

TEST(BuildRandomSpans, Deterministic) {
  const auto r = JamesRecord();
  EXPECT_EQ(build_random_spans(r, 5, 42), build_random_spans(r, 5, 42));
  EXPECT_EQ(build_continuous_random_spans(r, 5, 42), build_continuous_random_spans(r, 5, 42));
}

TEST(BuildRandomSpans, CountMatchesPas) {
  const auto r = JamesRecord();
  const auto pas = build_pas_spans(r);
  EXPECT_EQ(build_random_spans(r, pas.spans.size(), 1).spans.size(), pas.spans.size());
  EXPECT_EQ(build_continuous_random_spans(r, pas.spans.size(), 1).spans.size(), pas.spans.size());
  EXPECT_EQ(build_spans(r, SpanStrategy::random, 9).spans.size(), 5u);
  EXPECT_EQ(build_spans(r, SpanStrategy::continuous_random, 9).spans.size(), 5u);
}

TEST(BuildRandomSpans, SingleWordSentence) {
  const auto r = MakeRecord({"solo"});
  for (const auto& set : {build_random_spans(r, 2, 3), build_continuous_random_spans(r, 2, 3)}) {
    ASSERT_EQ(set.spans.size(), 2u);
    for (const auto& s : set.spans) EXPECT_EQ(s.word_indices, (std::vector<std::size_t>{0}));
  }
}

TEST(BuildRandomSpans, RejectsZeroCount) {
  EXPECT_THROW(build_random_spans(JamesRecord(), 0, 1), ValidationError);
  EXPECT_THROW(build_continuous_random_spans(JamesRecord(), 0, 1), ValidationError);
}

TEST(BuildContinuousRandomSpans, Contiguous) {
  const auto r = JamesRecord();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (const auto& s : build_continuous_random_spans(r, 6, seed).spans) {
      for (std::size_t i = 1; i < s.word_indices.size(); ++i) {
        EXPECT_EQ(s.word_indices[i], s.word_indices[i - 1] + 1);
      }
    }
  }
}

TEST(BuildRandomSpans, SeedsDiffer) {
  const auto r = JamesRecord();
  std::set<std::vector<std::string>> random_sets, continuous_sets;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    random_sets.insert(Surfaces(build_random_spans(r, 5, seed)));
    continuous_sets.insert(Surfaces(build_continuous_random_spans(r, 5, seed)));
  }
  EXPECT_GE(random_sets.size(), 95u);
  EXPECT_GE(continuous_sets.size(), 95u);
}

TEST(BuildRandomSpans, NonContiguousSamplesOccur) {
  const auto r = JamesRecord();
  bool gap = false;
  for (std::uint64_t seed = 0; seed < 20 && !gap; ++seed) {
    for (const auto& s : build_random_spans(r, 5, seed).spans) {
      gap = gap || (s.word_indices.back() - s.word_indices.front() + 1 != s.word_indices.size());
    }
  }
  EXPECT_TRUE(gap);
}

TEST(MapWordsToSubtokens, Lookup) {
  auto r = MakeRecord({"a", "bc"}, {1, 2});
  EXPECT_EQ(map_words_to_subtokens(r, {1}), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(map_words_to_subtokens(r, {0, 1}), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(map_words_to_subtokens(r, {0, 1}).size(), r.token_count);
  EXPECT_THROW(map_words_to_subtokens(r, {2}), ValidationError);
  EXPECT_THROW(map_words_to_subtokens(r, {}), ValidationError);
}

// --- properties over random records -------------------------------------

TEST(SpanProperties, RandomRecords) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> len(1, 14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = testing::random_sentence(rng, "t" + std::to_string(trial), len(rng));
    const auto& r = s.record;

    std::size_t args = 0;
    for (const auto& f : r.srl_frames) args += f.arguments.size();
    const auto pas = build_pas_spans(r);
    EXPECT_EQ(pas.spans.size(), args == 0 ? 1 : args);

    for (auto strategy : {SpanStrategy::pas, SpanStrategy::token, SpanStrategy::random,
                          SpanStrategy::continuous_random}) {
      const auto set = build_spans(r, strategy, 77);
      ASSERT_FALSE(set.spans.empty());
      for (const auto& span : set.spans) {
        ASSERT_FALSE(span.word_indices.empty());
        EXPECT_TRUE(std::is_sorted(span.word_indices.begin(), span.word_indices.end()));
        // subtokens are exactly the image of the words
        std::vector<std::size_t> image;
        for (std::size_t w : span.word_indices) {
          for (std::size_t t = r.word_to_subtokens[w].begin; t < r.word_to_subtokens[w].end; ++t) {
            image.push_back(t);
          }
        }
        EXPECT_EQ(span.subtoken_indices, image);
        // surface is an ordered subsequence of the sentence
        std::string expected;
        for (std::size_t w : span.word_indices) {
          expected += (expected.empty() ? "" : " ") + r.words[w];
        }
        EXPECT_EQ(span.surface, expected);
      }
    }
  }
}

}  // namespace
}  // namespace pasalign

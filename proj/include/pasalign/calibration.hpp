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

// Threshold calibration, binary classification metrics, stratified dev
// splitting and unigram lexical overlap.
//
// Decision rule everywhere: score >= threshold  =>  predicted positive.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pasalign/error.hpp"
#include "pasalign/random.hpp"

namespace pasalign {

enum class Label { negative, positive };

struct LabeledScore {
  std::string pair_id;
  double score = 0.0;
  Label gold = Label::negative;
};

enum class TargetMetric { f1_pos, accuracy };

inline std::string_view to_string(TargetMetric m) {
  return m == TargetMetric::f1_pos ? "f1_pos" : "accuracy";
}

inline std::optional<TargetMetric> parse_metric(std::string_view s) {
  if (s == "f1_pos" || s == "f1") return TargetMetric::f1_pos;
  if (s == "accuracy" || s == "acc") return TargetMetric::accuracy;
  return std::nullopt;
}

struct Threshold {
  double value = 0.0;
  TargetMetric target = TargetMetric::f1_pos;
};

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricReport {
  double f1_pos = 0.0;
  double accuracy = 0.0;
  double precision_pos = 0.0;
  double recall_pos = 0.0;
  double recall_neg = 0.0;
  double threshold = 0.0;
  ConfusionCounts counts;
};

namespace detail {
inline double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace detail

/// Standard metrics from a confusion matrix. Undefined ratios are 0.
inline MetricReport metrics_from_counts(const ConfusionCounts& c, double threshold) {
  MetricReport r;
  r.counts = c;
  r.threshold = threshold;
  r.precision_pos = detail::ratio(c.tp, c.tp + c.fp);
  r.recall_pos = detail::ratio(c.tp, c.tp + c.fn);
  r.recall_neg = detail::ratio(c.tn, c.tn + c.fp);
  r.accuracy = detail::ratio(c.tp + c.tn, c.total());
  // 2PR/(P+R) rewritten over counts so it rounds once.
  r.f1_pos = detail::ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  return r;
}

inline double metric_value(const MetricReport& r, TargetMetric m) {
  return m == TargetMetric::f1_pos ? r.f1_pos : r.accuracy;
}

inline MetricReport evaluate(const std::vector<LabeledScore>& test, const Threshold& t) {
  if (test.empty()) throw ValidationError("cannot evaluate an empty score set");
  ConfusionCounts c;
  for (const auto& s : test) {
    const bool predicted = s.score >= t.value;
    if (s.gold == Label::positive) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  return metrics_from_counts(c, t.value);
}

/// Candidate cut points: one sentinel below the minimum, midpoints between
/// adjacent distinct scores, one sentinel above the maximum. Ascending.
inline std::vector<double> candidate_thresholds(const std::vector<LabeledScore>& scores) {
  std::vector<double> sorted;
  sorted.reserve(scores.size());
  for (const auto& s : scores) sorted.push_back(s.score);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> out;
  out.reserve(sorted.size() + 1);
  out.push_back(sorted.front() - 1.0);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    out.push_back(sorted[i] + (sorted[i + 1] - sorted[i]) / 2.0);
  }
  out.push_back(sorted.back() + 1.0);
  return out;
}

/// Threshold maximizing `metric` on the dev scores; the smallest maximizing
/// candidate wins ties. Sweeps candidates in ascending order, moving
/// samples from predicted-positive to predicted-negative as the cut rises.
inline Threshold find_optimal_threshold(const std::vector<LabeledScore>& dev, TargetMetric metric) {
  if (dev.empty()) throw ValidationError("cannot calibrate on an empty dev set");
  for (const auto& s : dev) {
    if (!std::isfinite(s.score)) {
      throw ValidationError("dev score for pair '" + s.pair_id + "' is not finite");
    }
  }
  std::size_t positives = 0;
  for (const auto& s : dev) positives += s.gold == Label::positive;
  if (metric == TargetMetric::f1_pos && (positives == 0 || positives == dev.size())) {
    throw ValidationError("F1 calibration needs both classes in the dev set");
  }

  std::vector<LabeledScore> sorted = dev;
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) { return a.score < b.score; });
  const auto candidates = candidate_thresholds(dev);

  // Lowest sentinel: everything predicted positive.
  ConfusionCounts c;
  c.tp = positives;
  c.fp = dev.size() - positives;
  std::size_t next = 0;
  double best_value = -1.0;
  double best_t = candidates.front();
  for (double t : candidates) {
    while (next < sorted.size() && sorted[next].score < t) {
      if (sorted[next].gold == Label::positive) {
        --c.tp;
        ++c.fn;
      } else {
        --c.fp;
        ++c.tn;
      }
      ++next;
    }
    const double value = metric_value(metrics_from_counts(c, t), metric);
    if (value > best_value) {
      best_value = value;
      best_t = t;
    }
  }
  return {best_t, metric};
}

/// Stratified random split: `fraction` of each class goes to dev, with the
/// per-class dev sizes chosen by largest remainder so they sum to
/// round(fraction * n). Both outputs keep the input order.
template <typename T, typename LabelOf>
std::pair<std::vector<T>, std::vector<T>> stratified_dev_split(const std::vector<T>& rows,
                                                               double fraction, std::uint64_t seed,
                                                               LabelOf label_of) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ValidationError("split fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    by_class[label_of(rows[i]) == Label::positive ? 1 : 0].push_back(i);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw ValidationError("stratified split needs both classes present");
  }

  const auto total_dev = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows.size())));
  std::size_t quota[2];
  double remainder[2];
  for (int k = 0; k < 2; ++k) {
    const double exact = fraction * static_cast<double>(by_class[k].size());
    quota[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - std::floor(exact);
  }
  std::size_t assigned = quota[0] + quota[1];
  // Hand out the rounding slack to the class with the larger remainder
  // first (negative class on ties).
  const int order[2] = {remainder[1] > remainder[0] ? 1 : 0, remainder[1] > remainder[0] ? 0 : 1};
  for (int k : order) {
    if (assigned < total_dev && quota[k] < by_class[k].size()) {
      ++quota[k];
      ++assigned;
    }
  }

  SeededRng rng(seed);
  std::vector<char> in_dev(rows.size(), 0);
  for (int k = 0; k < 2; ++k) {
    auto& idx = by_class[k];
    for (std::size_t i = 0; i < quota[k]; ++i) {
      std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
      in_dev[idx[i]] = 1;
    }
  }
  std::pair<std::vector<T>, std::vector<T>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    (in_dev[i] ? out.second : out.first).push_back(rows[i]);
  }
  return out;
}

namespace detail {
inline std::set<std::string> unigram_set(std::string_view text) {
  std::string lowered(text);
  for (char& ch : lowered) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  std::istringstream in(lowered);
  std::set<std::string> out;
  for (std::string w; in >> w;) out.insert(std::move(w));
  return out;
}
}  // namespace detail

/// Unigram Jaccard similarity over lowercased whitespace tokens. Two empty
/// texts score 1.
inline double jaccard_unigram(std::string_view a, std::string_view b) {
  const auto sa = detail::unigram_set(a);
  const auto sb = detail::unigram_set(b);
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& w : sa) common += sb.count(w);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

struct TextPair {
  std::string text_a;
  std::string text_b;
  Label gold = Label::negative;
};

/// Mean Jaccard overlap, in percent. A class with no pairs reports 0.
struct OverlapReport {
  double overall = 0.0;
  double positive = 0.0;
  double negative = 0.0;
  std::size_t count_positive = 0;
  std::size_t count_negative = 0;
};

inline OverlapReport overlap_report(const std::vector<TextPair>& pairs) {
  if (pairs.empty()) throw ValidationError("overlap report needs at least one pair");
  double sum_pos = 0.0, sum_neg = 0.0;
  OverlapReport r;
  for (const auto& p : pairs) {
    const double j = jaccard_unigram(p.text_a, p.text_b);
    if (p.gold == Label::positive) {
      sum_pos += j;
      ++r.count_positive;
    } else {
      sum_neg += j;
      ++r.count_negative;
    }
  }
  r.overall = 100.0 * (sum_pos + sum_neg) / static_cast<double>(pairs.size());
  r.positive = r.count_positive ? 100.0 * sum_pos / static_cast<double>(r.count_positive) : 0.0;
  r.negative = r.count_negative ? 100.0 * sum_neg / static_cast<double>(r.count_negative) : 0.0;
  return r;
}

}  // namespace pasalign

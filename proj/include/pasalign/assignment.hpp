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

// Rectangular maximum-weight linear assignment.
//
// solve_max_assignment() runs the shortest augmenting path variant of the
// Jonker-Volgenant algorithm (one Dijkstra-like search per row, reduced
// costs kept non-negative through row/column potentials). It works on
// rectangular inputs directly: the smaller side is always fully matched and
// the surplus rows or columns of the larger side stay unassigned.
//
// brute_force_assignment() enumerates every injective mapping and exists as
// a test oracle.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pasalign/error.hpp"

namespace pasalign {

/// Dense M x N similarity matrix, row-major. Entry (m, n) is the score of
/// pairing row item m with column item n.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
      throw ValidationError("cost matrix must have at least one row and one column");
    }
  }

  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
      throw ValidationError("cost matrix must have at least one row and one column");
    }
    if (data_.size() != rows * cols) {
      throw ValidationError("cost matrix data has " + std::to_string(data_.size()) +
                            " entries, expected " + std::to_string(rows * cols));
    }
  }

  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) {
      throw ValidationError("cost matrix must have at least one row and one column");
    }
    const std::size_t cols = rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (std::size_t m = 0; m < rows.size(); ++m) {
      if (rows[m].size() != cols) {
        throw ValidationError("cost matrix row " + std::to_string(m) + " has " +
                              std::to_string(rows[m].size()) + " entries, expected " +
                              std::to_string(cols));
      }
      data.insert(data.end(), rows[m].begin(), rows[m].end());
    }
    return CostMatrix(rows.size(), cols, std::move(data));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t m, std::size_t n) const { return data_[m * cols_ + n]; }
  double& operator()(std::size_t m, std::size_t n) { return data_[m * cols_ + n]; }

  const std::vector<double>& data() const noexcept { return data_; }

  CostMatrix transposed() const {
    CostMatrix t(cols_, rows_);
    for (std::size_t m = 0; m < rows_; ++m)
      for (std::size_t n = 0; n < cols_; ++n) t(n, m) = (*this)(m, n);
    return t;
  }

  /// Throws ValidationError naming the first non-finite cell.
  void validate() const {
    for (std::size_t m = 0; m < rows_; ++m) {
      for (std::size_t n = 0; n < cols_; ++n) {
        if (!std::isfinite((*this)(m, n))) {
          throw ValidationError("cost matrix entry (" + std::to_string(m) + ", " +
                                std::to_string(n) + ") is not finite");
        }
      }
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

struct AssignedPair {
  std::size_t row;
  std::size_t col;

  friend bool operator==(const AssignedPair&, const AssignedPair&) = default;
};

/// A matching of size min(M, N); `pairs` is sorted by row index.
struct Assignment {
  std::vector<AssignedPair> pairs;
  double objective = 0.0;
};

namespace detail {

// Sum of selected entries, accumulated in ascending row order so that two
// assignments selecting the same cells report bit-identical objectives.
inline double objective_of(const CostMatrix& c, std::vector<AssignedPair>& pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const AssignedPair& a, const AssignedPair& b) { return a.row < b.row; });
  double total = 0.0;
  for (const auto& p : pairs) total += c(p.row, p.col);
  return total;
}

// Minimum-cost assignment of every row of `cost` (rows <= cols) to a
// distinct column. Returns col_for_row.
inline std::vector<std::size_t> min_cost_rows_le_cols(const CostMatrix& cost) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const std::size_t nr = cost.rows();
  const std::size_t nc = cost.cols();

  std::vector<double> u(nr, 0.0), v(nc, 0.0), shortest(nc, kInf);
  std::vector<std::size_t> path(nc, kNone), col4row(nr, kNone), row4col(nc, kNone);
  std::vector<std::size_t> remaining(nc);
  std::vector<char> scanned_row(nr, 0), scanned_col(nc, 0);

  for (std::size_t cur_row = 0; cur_row < nr; ++cur_row) {
    // Dijkstra over reduced costs from cur_row until a free column is hit.
    double min_val = 0.0;
    std::size_t i = cur_row;
    std::size_t num_remaining = nc;
    for (std::size_t it = 0; it < nc; ++it) remaining[it] = nc - it - 1;
    std::fill(scanned_row.begin(), scanned_row.end(), 0);
    std::fill(scanned_col.begin(), scanned_col.end(), 0);
    std::fill(shortest.begin(), shortest.end(), kInf);

    std::size_t sink = kNone;
    while (sink == kNone) {
      std::size_t index = kNone;
      double lowest = kInf;
      scanned_row[i] = 1;
      for (std::size_t it = 0; it < num_remaining; ++it) {
        const std::size_t j = remaining[it];
        const double r = min_val + cost(i, j) - u[i] - v[j];
        if (r < shortest[j]) {
          path[j] = i;
          shortest[j] = r;
        }
        // Prefer free columns among equal distances: ends the search early.
        if (shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == kNone)) {
          lowest = shortest[j];
          index = it;
        }
      }
      min_val = lowest;
      const std::size_t j = remaining[index];
      if (row4col[j] == kNone) {
        sink = j;
      } else {
        i = row4col[j];
      }
      scanned_col[j] = 1;
      remaining[index] = remaining[--num_remaining];
    }

    u[cur_row] += min_val;
    for (std::size_t r = 0; r < nr; ++r) {
      if (scanned_row[r] && r != cur_row) u[r] += min_val - shortest[col4row[r]];
    }
    for (std::size_t c = 0; c < nc; ++c) {
      if (scanned_col[c]) v[c] -= min_val - shortest[c];
    }

    // Flip the alternating path ending at sink.
    std::size_t j = sink;
    while (true) {
      const std::size_t r = path[j];
      row4col[j] = r;
      std::swap(col4row[r], j);
      if (r == cur_row) break;
    }
  }
  return col4row;
}

inline void enumerate_injections(const CostMatrix& c, std::size_t row, std::vector<char>& used,
                                 std::vector<std::size_t>& current, double partial,
                                 double& best, std::vector<std::size_t>& best_map) {
  if (row == c.rows()) {
    if (partial > best) {
      best = partial;
      best_map = current;
    }
    return;
  }
  for (std::size_t col = 0; col < c.cols(); ++col) {
    if (used[col]) continue;
    used[col] = 1;
    current[row] = col;
    enumerate_injections(c, row + 1, used, current, partial + c(row, col), best, best_map);
    used[col] = 0;
  }
}

}  // namespace detail

/// Maximum-weight assignment of size min(M, N).
///
/// Throws ValidationError if any entry is NaN or infinite. Among several
/// optimal matchings the one returned is unspecified; only the objective is
/// guaranteed.
inline Assignment solve_max_assignment(const CostMatrix& c) {
  c.validate();
  const bool transpose = c.rows() > c.cols();
  CostMatrix work = transpose ? c.transposed() : c;
  // Maximize by minimizing the negated scores.
  for (std::size_t m = 0; m < work.rows(); ++m)
    for (std::size_t n = 0; n < work.cols(); ++n) work(m, n) = -work(m, n);

  const auto col4row = detail::min_cost_rows_le_cols(work);

  Assignment out;
  out.pairs.reserve(col4row.size());
  for (std::size_t r = 0; r < col4row.size(); ++r) {
    if (transpose) {
      out.pairs.push_back({col4row[r], r});
    } else {
      out.pairs.push_back({r, col4row[r]});
    }
  }
  out.objective = detail::objective_of(c, out.pairs);
  return out;
}

/// Exhaustive search over all injective mappings of the smaller side into the
/// larger one. Refuses inputs with min(M, N) > 8.
inline Assignment brute_force_assignment(const CostMatrix& c) {
  constexpr std::size_t kMaxSide = 8;
  c.validate();
  if (std::min(c.rows(), c.cols()) > kMaxSide) {
    throw ValidationError("brute force assignment refuses min(M, N) = " +
                          std::to_string(std::min(c.rows(), c.cols())) + " > 8");
  }
  const bool transpose = c.rows() > c.cols();
  const CostMatrix work = transpose ? c.transposed() : c;

  std::vector<char> used(work.cols(), 0);
  std::vector<std::size_t> current(work.rows(), 0), best_map;
  double best = -std::numeric_limits<double>::infinity();
  detail::enumerate_injections(work, 0, used, current, 0.0, best, best_map);

  Assignment out;
  for (std::size_t r = 0; r < best_map.size(); ++r) {
    if (transpose) {
      out.pairs.push_back({best_map[r], r});
    } else {
      out.pairs.push_back({r, best_map[r]});
    }
  }
  out.objective = detail::objective_of(c, out.pairs);
  return out;
}

}  // namespace pasalign

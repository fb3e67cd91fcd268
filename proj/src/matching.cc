// Copyright 2026 The Codemix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <limits>
#include <numeric>

#include "codemix/alignment.h"
#include "codemix/error.h"
#include "codemix/kernels/kernels.h"
#include "codemix/text.h"

namespace codemix {

AlignMethod ParseAlignMethod(std::string_view name) {
  if (name == "match") return AlignMethod::kMatch;
  if (name == "intersect") return AlignMethod::kIntersect;
  throw ConfigError("unknown alignment method '" + std::string(name) +
                    "' (expected match or intersect)");
}

namespace {

// Minimum-cost assignment of every row to a distinct column (rows <= cols),
// Hungarian algorithm with potentials. Returns the column of each row.
std::vector<std::size_t> SolveAssignment(const std::vector<double>& cost, std::size_t rows,
                                         std::size_t cols) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based internally; column 0 is the virtual start.
  std::vector<double> u(rows + 1, 0.0);
  std::vector<double> v(cols + 1, 0.0);
  std::vector<std::size_t> owner(cols + 1, 0);
  std::vector<std::size_t> way(cols + 1, 0);
  for (std::size_t r = 1; r <= rows; ++r) {
    owner[0] = r;
    std::size_t col0 = 0;
    std::vector<double> min_slack(cols + 1, kInf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[col0] = true;
      const std::size_t row0 = owner[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= cols; ++c) {
        if (used[c]) continue;
        const double reduced = cost[(row0 - 1) * cols + (c - 1)] - u[row0] - v[c];
        if (reduced < min_slack[c]) {
          min_slack[c] = reduced;
          way[c] = col0;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= cols; ++c) {
        if (used[c]) {
          u[owner[c]] += delta;
          v[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      owner[col0] = owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(rows, 0);
  for (std::size_t c = 1; c <= cols; ++c) {
    if (owner[c] != 0) assignment[owner[c] - 1] = c - 1;
  }
  return assignment;
}

void SortLinks(AlignmentLinks* out) {
  std::sort(out->links.begin(), out->links.end());
}

}  // namespace

AlignmentLinks MaxWeightMatching(const std::vector<double>& weights, std::size_t rows,
                                 std::size_t cols) {
  AlignmentLinks out;
  out.solver = AlignmentLinks::Solver::kExact;
  if (rows == 0 || cols == 0) return out;
  const bool transpose = rows > cols;
  const std::size_t r = transpose ? cols : rows;
  const std::size_t c = transpose ? rows : cols;
  std::vector<double> cost(r * c);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double w = weights[i * cols + j];
      if (transpose) {
        cost[j * c + i] = -w;
      } else {
        cost[i * c + j] = -w;
      }
    }
  }
  const auto assignment = SolveAssignment(cost, r, c);
  for (std::size_t a = 0; a < r; ++a) {
    const std::size_t i = transpose ? assignment[a] : a;
    const std::size_t j = transpose ? a : assignment[a];
    if (weights[i * cols + j] > 0.0) out.links.emplace_back(i, j);
  }
  SortLinks(&out);
  return out;
}

AlignmentLinks GreedyMatching(const std::vector<double>& weights, std::size_t rows,
                              std::size_t cols) {
  AlignmentLinks out;
  out.solver = AlignmentLinks::Solver::kGreedy;
  std::vector<std::size_t> order(rows * cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return weights[a] > weights[b];
  });
  std::vector<bool> row_used(rows, false);
  std::vector<bool> col_used(cols, false);
  for (const std::size_t cell : order) {
    if (!(weights[cell] > 0.0)) break;
    const std::size_t i = cell / cols;
    const std::size_t j = cell % cols;
    if (row_used[i] || col_used[j]) continue;
    row_used[i] = col_used[j] = true;
    out.links.emplace_back(i, j);
  }
  SortLinks(&out);
  return out;
}

AlignmentLinks IntersectArgmax(const std::vector<double>& weights, std::size_t rows,
                               std::size_t cols) {
  AlignmentLinks out;
  out.solver = AlignmentLinks::Solver::kArgmax;
  if (rows == 0 || cols == 0) return out;
  std::vector<double> transposed(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) transposed[j * rows + i] = weights[i * cols + j];
  }
  std::vector<std::size_t> col_best(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    col_best[j] = kernels::ArgMax({transposed.data() + j * rows, rows});
  }
  for (std::size_t i = 0; i < rows; ++i) {
    std::span<const double> row(weights.data() + i * cols, cols);
    const std::size_t j = kernels::ArgMax(row);
    if (row[j] > 0.0 && col_best[j] == i) out.links.emplace_back(i, j);
  }
  SortLinks(&out);
  return out;
}

AlignmentLinks AlignPair(const TokenList& matrix, const TokenList& embedded,
                         const TranslationProbTable& probs, AlignMethod method) {
  const std::size_t rows = matrix.size();
  const std::size_t cols = embedded.size();
  std::vector<double> weights(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      weights[i * cols + j] = probs.Get(matrix[i], embedded[j]);
    }
  }
  if (method == AlignMethod::kIntersect) return IntersectArgmax(weights, rows, cols);
  if (rows <= kExactMatchingLimit && cols <= kExactMatchingLimit) {
    return MaxWeightMatching(weights, rows, cols);
  }
  return GreedyMatching(weights, rows, cols);
}

std::string FormatPharaoh(const AlignmentLinks& links) {
  std::string out;
  for (std::size_t k = 0; k < links.links.size(); ++k) {
    if (k > 0) out.push_back(' ');
    out += std::to_string(links.links[k].first);
    out.push_back('-');
    out += std::to_string(links.links[k].second);
  }
  return out;
}

AlignmentLinks ParsePharaoh(std::string_view line) {
  AlignmentLinks out;
  for (const auto& part : text::SplitOn(text::Trim(line), ' ')) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == part.size()) {
      throw DataError("malformed Pharaoh link '" + part + "'");
    }
    const auto digits = [](std::string_view v) {
      return !v.empty() && v.size() < 10 &&
             std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    const std::string_view lhs(part.data(), dash);
    const std::string_view rhs(part.data() + dash + 1, part.size() - dash - 1);
    if (!digits(lhs) || !digits(rhs)) {
      throw DataError("malformed Pharaoh link '" + part + "'");
    }
    out.links.emplace_back(std::stoul(std::string(lhs)), std::stoul(std::string(rhs)));
  }
  SortLinks(&out);
  out.links.erase(std::unique(out.links.begin(), out.links.end()), out.links.end());
  return out;
}

}  // namespace codemix

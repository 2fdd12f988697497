// Copyright 2026 The hma-sim Authors
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

#include "hma/assignment.hpp"

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>

namespace hma {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_matrix(const CostMatrix& cost) {
  if (cost.rows < 0 || cost.cols < 0 || cost.rows > cost.cols) {
    throw std::invalid_argument("cost matrix requires 0 <= rows <= cols");
  }
  if (cost.entries.size() != static_cast<std::size_t>(cost.rows) * cost.cols) {
    throw std::invalid_argument("cost matrix entry count does not match rows * cols");
  }
  for (int r = 0; r < cost.rows; ++r) {
    bool has_candidate = false;
    for (int c = 0; c < cost.cols; ++c) {
      const double e = cost.at(r, c);
      if (is_forbidden(e)) continue;
      if (!std::isfinite(e)) {
        throw std::invalid_argument("cost entry (" + std::to_string(r) + ", " +
                                    std::to_string(c) + ") is not finite");
      }
      has_candidate = true;
    }
    if (!has_candidate) {
      throw InfeasibleAssignmentError(
          r, "row " + std::to_string(r) + " has no allowed column");
    }
  }
}

// Affine transform to nonnegative minimization costs. The shift keeps duals
// well-conditioned; it cancels because objectives are re-summed from the
// original entries.
struct WorkingCosts {
  const CostMatrix& cost;
  bool maximize;
  double shift;

  explicit WorkingCosts(const CostMatrix& c) : cost(c), maximize(c.sense == OptimizeSense::maximize) {
    double lo = kInf;
    double hi = -kInf;
    for (double e : c.entries) {
      if (is_forbidden(e)) continue;
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    shift = maximize ? hi : lo;
  }

  double at(int r, int c) const {
    const double e = cost.at(r, c);
    return maximize ? shift - e : e - shift;
  }
};

}  // namespace

AssignmentResult solve_lap_jv(const CostMatrix& cost, std::ostream* debug) {
  check_matrix(cost);
  const int rows = cost.rows;
  const int cols = cost.cols;
  AssignmentResult result;
  result.row_to_col.assign(rows, -1);
  if (rows == 0) return result;

  const WorkingCosts w(cost);
  if (debug) {
    *debug << "lap sense=" << (w.maximize ? "maximize" : "minimize")
           << " shift=" << w.shift << " rows=" << rows << " cols=" << cols << "\n";
  }

  // Shortest augmenting paths with dual updates. Column `cols` is the
  // virtual start column holding the row being inserted.
  std::vector<double> u(rows, 0.0);
  std::vector<double> v(cols + 1, 0.0);
  std::vector<int> col_to_row(cols + 1, -1);

  std::vector<double> minv(cols + 1);
  std::vector<int> way(cols + 1);
  std::vector<char> used(cols + 1);

  for (int r = 0; r < rows; ++r) {
    int j0 = cols;
    col_to_row[cols] = r;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(way.begin(), way.end(), -1);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = col_to_row[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 0; j < cols; ++j) {
        if (used[j]) continue;
        if (!is_forbidden(cost.at(i0, j))) {
          const double reduced = w.at(i0, j) - u[i0] - v[j];
          if (reduced < minv[j]) {
            minv[j] = reduced;
            way[j] = j0;
          }
        }
        // The candidate set is every unused column reachable from any row
        // already in the tree, not only columns the current row allows.
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 < 0) {
        throw InfeasibleAssignmentError(
            r, "no complete assignment avoids the forbidden entries (witness row " +
                   std::to_string(r) + ")");
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[col_to_row[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_to_row[j0] != -1);

    if (debug) {
      *debug << "augment row " << r << ": path";
      for (int j = j0; j != cols; j = way[j]) *debug << " col" << j;
      *debug << "\n";
    }
    do {
      const int j1 = way[j0];
      col_to_row[j0] = col_to_row[j1];
      j0 = j1;
    } while (j0 != cols);
  }

  for (int j = 0; j < cols; ++j) {
    const int r = col_to_row[j];
    if (r >= 0) result.row_to_col[r] = j;
  }
  result.objective = 0.0;
  for (int r = 0; r < rows; ++r) result.objective += cost.at(r, result.row_to_col[r]);

  if (debug) {
    *debug << "row duals:";
    for (double d : u) *debug << ' ' << d;
    *debug << "\ncol duals:";
    for (int j = 0; j < cols; ++j) *debug << ' ' << v[j];
    *debug << "\n";
  }
  return result;
}

AssignmentResult brute_force_lap(const CostMatrix& cost) {
  check_matrix(cost);
  if (cost.rows > 8) throw std::invalid_argument("brute_force_lap guard: rows must be <= 8");
  if (cost.cols > 16) throw std::invalid_argument("brute_force_lap guard: cols must be <= 16");
  const bool maximize = cost.sense == OptimizeSense::maximize;

  AssignmentResult best;
  bool found = false;
  int deepest = 0;
  std::vector<int> current(cost.rows, -1);

  const auto recurse = [&](const auto& self, int row, std::uint32_t used, double sum) -> void {
    if (row == cost.rows) {
      if (!found || (maximize ? sum > best.objective : sum < best.objective)) {
        best.objective = sum;
        best.row_to_col = current;
        found = true;
      }
      return;
    }
    deepest = std::max(deepest, row);
    for (int c = 0; c < cost.cols; ++c) {
      if (used & (1u << c)) continue;
      const double e = cost.at(row, c);
      if (is_forbidden(e)) continue;
      current[row] = c;
      self(self, row + 1, used | (1u << c), sum + e);
    }
    current[row] = -1;
  };
  recurse(recurse, 0, 0u, 0.0);

  if (!found) {
    throw InfeasibleAssignmentError(
        deepest, "no complete assignment avoids the forbidden entries (witness row " +
                     std::to_string(deepest) + ")");
  }
  return best;
}

MatchingResult repair_to_matching(const AssignmentResult& assignment,
                                  const std::vector<double>& pair_fitness,
                                  const std::vector<double>& solo_fitness) {
  const int m = static_cast<int>(solo_fitness.size());
  const std::vector<int>& perm = assignment.row_to_col;
  if (static_cast<int>(perm.size()) != m) {
    throw std::invalid_argument("assignment length does not match solo_fitness length");
  }
  if (pair_fitness.size() != static_cast<std::size_t>(m) * m) {
    throw std::invalid_argument("pair_fitness must be an M x M matrix");
  }
  {
    std::vector<char> seen(m, 0);
    for (int c : perm) {
      if (c < 0 || c >= m || seen[c]) {
        throw std::invalid_argument("assignment is not a permutation of the UE indices");
      }
      seen[c] = 1;
    }
  }
  const auto pair_at = [&](int a, int b) {
    return pair_fitness[static_cast<std::size_t>(a) * m + b];
  };

  MatchingResult result;
  std::vector<char> visited(m, 0);
  for (int start = 0; start < m; ++start) {
    if (visited[start]) continue;
    std::vector<int> cycle;
    for (int x = start; !visited[x]; x = perm[x]) {
      visited[x] = 1;
      cycle.push_back(x);
    }
    if (cycle.size() == 1) {
      result.solos.push_back(cycle[0]);
      continue;
    }
    if (cycle.size() == 2) {
      result.pairs.emplace_back(std::min(cycle[0], cycle[1]), std::max(cycle[0], cycle[1]));
      continue;
    }
    // Greedy cascade: take the best adjacent pair, close the remainder back
    // into a cycle (which creates one new adjacency), repeat.
    while (cycle.size() >= 2) {
      const int n = static_cast<int>(cycle.size());
      double best_value = -kInf;
      int best_idx = 0;
      for (int idx = 0; idx < n; ++idx) {
        if (n == 2 && idx == 1) break;  // (a, b) and (b, a) are the same pair
        const double v = pair_at(cycle[idx], cycle[(idx + 1) % n]);
        if (v > best_value) {
          best_value = v;
          best_idx = idx;
        }
      }
      const int a = cycle[best_idx];
      const int b = cycle[(best_idx + 1) % n];
      result.pairs.emplace_back(std::min(a, b), std::max(a, b));
      std::vector<int> remainder;
      remainder.reserve(n - 2);
      for (int i = 1; i < n - 1; ++i) remainder.push_back(cycle[(best_idx + 1 + i) % n]);
      cycle = std::move(remainder);
    }
    if (cycle.size() == 1) result.solos.push_back(cycle[0]);
  }

  std::sort(result.pairs.begin(), result.pairs.end());
  std::sort(result.solos.begin(), result.solos.end());
  result.objective = 0.0;
  for (const auto& [a, b] : result.pairs) result.objective += pair_at(a, b);
  for (int s : result.solos) result.objective += solo_fitness[s];
  return result;
}

MatchingResult brute_force_matching(const std::vector<double>& pair_fitness,
                                    const std::vector<double>& solo_fitness) {
  const int m = static_cast<int>(solo_fitness.size());
  if (m > 12) throw std::invalid_argument("brute_force_matching guard: M must be <= 12");
  if (pair_fitness.size() != static_cast<std::size_t>(m) * m) {
    throw std::invalid_argument("pair_fitness must be an M x M matrix");
  }
  const auto pair_at = [&](int a, int b) {
    return pair_fitness[static_cast<std::size_t>(a) * m + b];
  };

  // DP over subsets: handle the lowest remaining UE either solo or paired
  // with each other remaining UE.
  const std::uint32_t full = m == 0 ? 0u : ((1u << m) - 1u);
  std::vector<double> value(full + 1, 0.0);
  std::vector<int> choice(full + 1, -1);  // partner of the lowest member, or itself
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    int lowest = 0;
    while (!(mask & (1u << lowest))) ++lowest;
    double best = solo_fitness[lowest] + value[mask & ~(1u << lowest)];
    int best_partner = lowest;
    for (int j = lowest + 1; j < m; ++j) {
      if (!(mask & (1u << j))) continue;
      const double v =
          pair_at(lowest, j) + value[mask & ~(1u << lowest) & ~(1u << j)];
      if (v > best) {
        best = v;
        best_partner = j;
      }
    }
    value[mask] = best;
    choice[mask] = best_partner;
  }

  MatchingResult result;
  result.objective = value[full];
  std::uint32_t mask = full;
  while (mask) {
    int lowest = 0;
    while (!(mask & (1u << lowest))) ++lowest;
    const int partner = choice[mask];
    if (partner == lowest) {
      result.solos.push_back(lowest);
      mask &= ~(1u << lowest);
    } else {
      result.pairs.emplace_back(lowest, partner);
      mask &= ~(1u << lowest) & ~(1u << partner);
    }
  }
  return result;
}

}  // namespace hma

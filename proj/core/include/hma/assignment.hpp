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

// Dense linear assignment by the Jonker-Volgenant shortest augmenting path
// algorithm, exhaustive oracles for testing, and the cycle-repair step that
// turns a square assignment permutation into a valid pairing of UEs.

#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hma {

// Entries equal to kForbidden are excluded from the solve entirely; they are
// a sentinel, not a large penalty, so they cannot contaminate dual variables.
inline constexpr double kForbidden = std::numeric_limits<double>::quiet_NaN();

inline bool is_forbidden(double entry) { return std::isnan(entry); }

enum class OptimizeSense : int { minimize = 0, maximize = 1 };

// Rectangular cost matrix, rows <= cols. Non-forbidden entries must be
// finite and every row needs at least one candidate column.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> entries;  // rows * cols, row-major
  OptimizeSense sense = OptimizeSense::minimize;

  double& at(int r, int c) { return entries[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return entries[static_cast<std::size_t>(r) * cols + c]; }
};

struct AssignmentResult {
  std::vector<int> row_to_col;  // length rows, pairwise distinct columns
  double objective = 0.0;       // exact sum of the selected original entries
};

struct MatchingResult {
  std::vector<std::pair<int, int>> pairs;  // unordered, stored with first < second
  std::vector<int> solos;
  double objective = 0.0;
};

class InfeasibleAssignmentError : public std::runtime_error {
 public:
  InfeasibleAssignmentError(int witness_row, const std::string& message)
      : std::runtime_error(message), witness_row_(witness_row) {}
  // A row that cannot be completed to a full assignment.
  int witness_row() const { return witness_row_; }

 private:
  int witness_row_;
};

// Exact optimum via shortest augmenting paths, O(rows * cols^2).
// Maximization negates the entries and shifts them so all working costs are
// nonnegative; the shift cancels because the reported objective is re-summed
// from the original entries. Among equal-cost optima the deterministic scan
// order (lowest row index, then lowest column index) decides. If `debug` is
// non-null, dual variables and augmenting-path traces are written to it.
AssignmentResult solve_lap_jv(const CostMatrix& cost, std::ostream* debug = nullptr);

// Exhaustive oracle over injective row->column maps. Guards: rows <= 8,
// cols <= 16 (throws std::invalid_argument beyond them).
AssignmentResult brute_force_lap(const CostMatrix& cost);

// Decompose a square-assignment permutation into a pairing. Fixed points
// become solos and 2-cycles become pairs; a longer cycle is repaired
// greedily: repeatedly extract the adjacent pair with the highest
// pair_fitness, let the remaining nodes close back into a shorter cycle, and
// leave a final odd node solo. The objective is recomputed from
// pair_fitness / solo_fitness of the final matching.
MatchingResult repair_to_matching(const AssignmentResult& assignment,
                                  const std::vector<double>& pair_fitness,
                                  const std::vector<double>& solo_fitness);

// Globally optimal matching-with-solos by exhaustive recursion; exact oracle
// for the repair step. Guard: M <= 12.
MatchingResult brute_force_matching(const std::vector<double>& pair_fitness,
                                    const std::vector<double>& solo_fitness);

}  // namespace hma

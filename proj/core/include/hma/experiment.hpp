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

// Monte Carlo experiment driver: sweeps UE counts, scheme rows, and duplex
// modes over seeded trials, reusing one channel realization per (M, trial)
// across every scheme row and duplex mode so comparisons are paired. Emits
// summary tables as CSV or structured text.
//
// Scheme rows are cumulative topology sets named by their members:
//   oma           {OMA}
//   noma          {OMA, NOMA}
//   noma+thr      {OMA, NOMA, THR}
//   noma+thr+twr  {OMA, NOMA, THR, TWR_DF}
//   hma           all five kinds
// Because the rows are nested prefixes of one topology chain, each
// (M, trial, duplex) cell is served by a single solve_hma_chain call.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hma/channel_model.hpp"
#include "hma/engine.hpp"

namespace hma {

// Map a scheme-row token to its topology set (canonical order). Throws
// std::invalid_argument naming an unknown token.
std::vector<TopologyKind> parse_scheme_row(const std::string& token);

struct RunSpec {
  ScenarioConfig base;
  std::vector<int> ue_counts;            // strictly ascending, non-empty
  std::vector<std::string> scheme_rows;  // tokens from the vocabulary above
  std::vector<Duplex> duplex_modes;
  int trials = 100;
  std::uint64_t seed0 = 42;
  // When positive, run the exact matching oracle for every cell with
  // M <= oracle_check_max_m and record per-trial repaired/exact ratios.
  int oracle_check_max_m = 0;
};

// Throws ConfigError (base config) or std::invalid_argument naming the
// violated field or token.
void validate(const RunSpec& spec);

struct CellStats {
  std::string scheme;
  Duplex duplex = Duplex::HD;
  int num_ues = 0;
  double mean_gain_pct = 0.0;
  double std_gain_pct = 0.0;  // sample standard deviation, 0 for one trial
  int trials = 0;
  std::array<double, kTopologyCount> mean_shares{};
  std::array<double, kTopologyCount> mean_contribs{};
  std::vector<double> trial_gains;     // per-trial gain_pct, trial order
  std::vector<double> oracle_ratios;   // per-trial repaired/exact, may be empty
  double mean_oracle_ratio = 0.0;      // 0 when the oracle did not run
};

struct TrialDigest {
  int num_ues = 0;
  int trial = 0;
  std::uint64_t channel_digest = 0;
};

struct SummaryTable {
  // Cells in emission order: scheme rows outermost, then duplex modes, then
  // UE counts, all in RunSpec order.
  std::vector<CellStats> cells;
  // One channel digest per (M, trial); every scheme row and duplex mode of
  // that cell grid saw exactly this channel state.
  std::vector<TrialDigest> digests;

  const CellStats* find(const std::string& scheme, Duplex duplex, int num_ues) const;
};

// Deterministic sweep. The per-trial seed is
// seed0 XOR splitmix64(M * 0x9E3779B97F4A7C15 + trial), so any (M, trial)
// cell can be reproduced in isolation. Per-trial errors abort the run with
// (M, trial, scheme) context.
SummaryTable run_monte_carlo(const RunSpec& spec);

enum class OutputFormat : int { csv = 0, structured_text = 1 };

// CSV header (fixed order, 6 significant digits, no unit row):
//   scheme,duplex,num_ues,mean_gain_pct,std_gain_pct,trials,
//   share_OMA,share_NOMA,share_THR,share_TWR_DF,share_TWR_PLNC,
//   contrib_OMA,contrib_NOMA,contrib_THR,contrib_TWR_DF,contrib_TWR_PLNC
// plus a trailing oracle_ratio column when the oracle check ran.
// Structured text mirrors the same fields one block per cell.
void emit_results(const SummaryTable& table, OutputFormat format, const std::string& path);

std::string format_results(const SummaryTable& table, OutputFormat format);

// Command-line driver behind the hma_cli tool. Flags:
//   --config <file> --ues 10,50,100,200 --schemes oma,noma,...,hma
//   --duplex hd,fd --trials 100 --seed 42 --out results.csv
//   [--oracle-check <maxM>] [--fig3-shares]
// Prints an aligned summary table; --fig3-shares adds per-topology share and
// contribution lines for the richest scheme row. Returns 0 on success,
// nonzero with a single-line diagnostic on config, IO, or model errors.
int cli_main(int argc, const char* const* argv);

}  // namespace hma

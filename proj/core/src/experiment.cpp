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

#include "hma/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

#include "hma/assignment.hpp"
#include "hma/random.hpp"

namespace hma {
namespace {

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

std::vector<TopologyKind> parse_scheme_row(const std::string& token) {
  using enum TopologyKind;
  if (token == "oma") return {OMA};
  if (token == "noma") return {OMA, NOMA};
  if (token == "noma+thr") return {OMA, NOMA, THR};
  if (token == "noma+thr+twr") return {OMA, NOMA, THR, TWR_DF};
  if (token == "hma") return {OMA, NOMA, THR, TWR_DF, TWR_PLNC};
  throw std::invalid_argument("unknown scheme row '" + token + "'");
}

void validate(const RunSpec& spec) {
  validate(spec.base);
  if (spec.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (spec.ue_counts.empty()) throw std::invalid_argument("ue_counts must not be empty");
  for (std::size_t i = 0; i < spec.ue_counts.size(); ++i) {
    if (spec.ue_counts[i] < 1) throw std::invalid_argument("ue_counts entries must be positive");
    if (i > 0 && spec.ue_counts[i] <= spec.ue_counts[i - 1]) {
      throw std::invalid_argument("ue_counts must be strictly ascending");
    }
  }
  if (spec.scheme_rows.empty()) throw std::invalid_argument("scheme_rows must not be empty");
  for (const std::string& row : spec.scheme_rows) parse_scheme_row(row);
  if (spec.duplex_modes.empty()) throw std::invalid_argument("duplex_modes must not be empty");
  if (spec.oracle_check_max_m < 0) {
    throw std::invalid_argument("oracle_check_max_m must be nonnegative");
  }
}

const CellStats* SummaryTable::find(const std::string& scheme, Duplex duplex,
                                    int num_ues) const {
  for (const CellStats& cell : cells) {
    if (cell.scheme == scheme && cell.duplex == duplex && cell.num_ues == num_ues) {
      return &cell;
    }
  }
  return nullptr;
}

SummaryTable run_monte_carlo(const RunSpec& spec) {
  validate(spec);

  // Rows are nested prefixes of one topology chain, so a single chain solve
  // per (M, trial, duplex) serves every requested row. The tensor is built
  // for the union of the rows' topology sets.
  std::vector<std::vector<TopologyKind>> row_sets;
  for (const std::string& row : spec.scheme_rows) row_sets.push_back(parse_scheme_row(row));
  std::vector<TopologyKind> union_set;
  for (TopologyKind kind : kCanonicalTopologyOrder) {
    for (const auto& set : row_sets) {
      if (std::find(set.begin(), set.end(), kind) != set.end()) {
        union_set.push_back(kind);
        break;
      }
    }
  }
  for (const auto& set : row_sets) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (union_set[i] != set[i]) {
        throw std::logic_error("scheme rows must be nested prefixes of one topology chain");
      }
    }
  }

  const std::size_t n_schemes = spec.scheme_rows.size();
  const std::size_t n_duplex = spec.duplex_modes.size();
  const std::size_t n_counts = spec.ue_counts.size();

  SummaryTable table;
  table.cells.resize(n_schemes * n_duplex * n_counts);
  const auto cell_at = [&](std::size_t si, std::size_t di, std::size_t mi) -> CellStats& {
    return table.cells[(si * n_duplex + di) * n_counts + mi];
  };
  for (std::size_t si = 0; si < n_schemes; ++si) {
    for (std::size_t di = 0; di < n_duplex; ++di) {
      for (std::size_t mi = 0; mi < n_counts; ++mi) {
        CellStats& cell = cell_at(si, di, mi);
        cell.scheme = spec.scheme_rows[si];
        cell.duplex = spec.duplex_modes[di];
        cell.num_ues = spec.ue_counts[mi];
        cell.trials = spec.trials;
        cell.trial_gains.reserve(spec.trials);
      }
    }
  }

  for (std::size_t mi = 0; mi < n_counts; ++mi) {
    const int m = spec.ue_counts[mi];
    ScenarioConfig cfg = spec.base;
    cfg.num_ues = m;
    cfg.num_channels = m;
    cfg.topology_set = union_set;

    for (int t = 0; t < spec.trials; ++t) {
      cfg.rng_seed = trial_seed(spec.seed0, m, t);
      ChannelState chan;
      std::uint64_t digest = 0;
      try {
        const Deployment dep = generate_deployment(cfg);
        chan = compute_channel_state(dep, cfg);
        digest = channel_digest(chan);
      } catch (const std::exception& e) {
        throw std::runtime_error("channel generation failed at M=" + std::to_string(m) +
                                 " trial=" + std::to_string(t) + ": " + e.what());
      }
      table.digests.push_back(TrialDigest{m, t, digest});

      for (std::size_t di = 0; di < n_duplex; ++di) {
        cfg.duplex = spec.duplex_modes[di];
        FitnessTensor tensor;
        std::vector<PartitionReport> chain;
        try {
          tensor = build_fitness_tensor(chan, cfg);
          chain = solve_hma_chain(tensor);
        } catch (const std::exception& e) {
          throw std::runtime_error("trial failed at M=" + std::to_string(m) + " trial=" +
                                   std::to_string(t) + " duplex=" +
                                   duplex_name(spec.duplex_modes[di]) + ": " + e.what());
        }

        for (std::size_t si = 0; si < n_schemes; ++si) {
          CellStats& cell = cell_at(si, di, mi);
          try {
            const std::size_t prefix = row_sets[si].size();
            const PartitionReport& report = chain[prefix - 1];
            const GainReport gain = evaluate(report, tensor, cfg);
            cell.trial_gains.push_back(gain.gain_pct);
            for (int i = 0; i < kTopologyCount; ++i) {
              cell.mean_shares[i] += gain.topology_shares[i];
              cell.mean_contribs[i] += gain.topology_gain_contrib[i];
            }
            if (spec.oracle_check_max_m > 0 && m <= spec.oracle_check_max_m) {
              std::vector<double> pair_best = reduce_pair_best(tensor, static_cast<int>(prefix));
              for (double& v : pair_best) {
                if (is_forbidden(v)) v = -std::numeric_limits<double>::infinity();
              }
              std::vector<double> solo(m);
              for (int k = 0; k < m; ++k) solo[k] = tensor.value_at(k, k, 0);
              const MatchingResult exact = brute_force_matching(pair_best, solo);
              const double repaired = partition_objective(report);
              cell.oracle_ratios.push_back(exact.objective > 0.0 ? repaired / exact.objective
                                                                 : 1.0);
            }
          } catch (const std::exception& e) {
            throw std::runtime_error("trial failed at M=" + std::to_string(m) + " trial=" +
                                     std::to_string(t) + " scheme=" + cell.scheme + ": " +
                                     e.what());
          }
        }
      }

      // The same channel object served every row and duplex mode; verify it
      // was not disturbed along the way.
      if (channel_digest(chan) != digest) {
        throw std::logic_error("channel state changed during paired evaluation at M=" +
                               std::to_string(m) + " trial=" + std::to_string(t));
      }
    }
  }

  for (CellStats& cell : table.cells) {
    cell.mean_gain_pct = mean_of(cell.trial_gains);
    cell.std_gain_pct = sample_std(cell.trial_gains, cell.mean_gain_pct);
    for (int i = 0; i < kTopologyCount; ++i) {
      cell.mean_shares[i] /= spec.trials;
      cell.mean_contribs[i] /= spec.trials;
    }
    if (!cell.oracle_ratios.empty()) cell.mean_oracle_ratio = mean_of(cell.oracle_ratios);
  }
  return table;
}

std::string format_results(const SummaryTable& table, OutputFormat format) {
  bool has_oracle = false;
  for (const CellStats& cell : table.cells) {
    if (!cell.oracle_ratios.empty()) has_oracle = true;
  }

  std::ostringstream out;
  if (format == OutputFormat::csv) {
    out << "scheme,duplex,num_ues,mean_gain_pct,std_gain_pct,trials";
    for (TopologyKind kind : kCanonicalTopologyOrder) out << ",share_" << topology_name(kind);
    for (TopologyKind kind : kCanonicalTopologyOrder) out << ",contrib_" << topology_name(kind);
    if (has_oracle) out << ",oracle_ratio";
    out << "\n";
    for (const CellStats& cell : table.cells) {
      out << cell.scheme << ',' << duplex_name(cell.duplex) << ',' << cell.num_ues << ','
          << fmt6(cell.mean_gain_pct) << ',' << fmt6(cell.std_gain_pct) << ',' << cell.trials;
      for (int i = 0; i < kTopologyCount; ++i) out << ',' << fmt6(cell.mean_shares[i]);
      for (int i = 0; i < kTopologyCount; ++i) out << ',' << fmt6(cell.mean_contribs[i]);
      if (has_oracle) {
        out << ',';
        if (!cell.oracle_ratios.empty()) out << fmt6(cell.mean_oracle_ratio);
      }
      out << "\n";
    }
    return out.str();
  }

  for (const CellStats& cell : table.cells) {
    out << "cell scheme=" << cell.scheme << " duplex=" << duplex_name(cell.duplex)
        << " num_ues=" << cell.num_ues << "\n"
        << "  mean_gain_pct=" << fmt6(cell.mean_gain_pct) << "\n"
        << "  std_gain_pct=" << fmt6(cell.std_gain_pct) << "\n"
        << "  trials=" << cell.trials << "\n";
    out << "  shares:";
    for (int i = 0; i < kTopologyCount; ++i) {
      out << ' ' << topology_name(kCanonicalTopologyOrder[i]) << '='
          << fmt6(cell.mean_shares[i]);
    }
    out << "\n  contribs:";
    for (int i = 0; i < kTopologyCount; ++i) {
      out << ' ' << topology_name(kCanonicalTopologyOrder[i]) << '='
          << fmt6(cell.mean_contribs[i]);
    }
    out << "\n";
    if (!cell.oracle_ratios.empty()) {
      out << "  oracle_ratio=" << fmt6(cell.mean_oracle_ratio) << "\n";
    }
  }
  return out.str();
}

void emit_results(const SummaryTable& table, OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << format_results(table, format);
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

namespace {

void print_summary(const SummaryTable& table, const RunSpec& spec, bool fig3_shares) {
  std::printf("%-16s %-6s", "scheme", "duplex");
  for (int m : spec.ue_counts) {
    char head[16];
    std::snprintf(head, sizeof(head), "M=%d", m);
    std::printf(" %8s", head);
  }
  std::printf("\n");
  for (const std::string& scheme : spec.scheme_rows) {
    for (Duplex duplex : spec.duplex_modes) {
      std::printf("%-16s %-6s", scheme.c_str(), duplex_name(duplex));
      for (int m : spec.ue_counts) {
        const CellStats* cell = table.find(scheme, duplex, m);
        std::printf(" %8.2f", cell ? cell->mean_gain_pct : 0.0);
      }
      std::printf("\n");
    }
  }

  bool has_oracle = false;
  for (const CellStats& cell : table.cells) {
    if (!cell.oracle_ratios.empty()) has_oracle = true;
  }
  if (has_oracle) {
    std::printf("\n");
    for (const CellStats& cell : table.cells) {
      if (cell.oracle_ratios.empty()) continue;
      const double lo = *std::min_element(cell.oracle_ratios.begin(), cell.oracle_ratios.end());
      std::printf("oracle scheme=%s duplex=%s M=%d mean_ratio=%s min_ratio=%s\n",
                  cell.scheme.c_str(), duplex_name(cell.duplex), cell.num_ues,
                  fmt6(cell.mean_oracle_ratio).c_str(), fmt6(lo).c_str());
    }
  }

  if (fig3_shares) {
    const std::string& richest = spec.scheme_rows.back();
    std::printf("\n");
    for (Duplex duplex : spec.duplex_modes) {
      for (int m : spec.ue_counts) {
        const CellStats* cell = table.find(richest, duplex, m);
        if (!cell) continue;
        std::printf("shares   scheme=%s duplex=%s M=%d:", richest.c_str(), duplex_name(duplex), m);
        for (int i = 0; i < kTopologyCount; ++i) {
          std::printf(" %s=%s", topology_name(kCanonicalTopologyOrder[i]),
                      fmt6(cell->mean_shares[i]).c_str());
        }
        std::printf("\ncontribs scheme=%s duplex=%s M=%d:", richest.c_str(), duplex_name(duplex), m);
        for (int i = 0; i < kTopologyCount; ++i) {
          std::printf(" %s=%s", topology_name(kCanonicalTopologyOrder[i]),
                      fmt6(cell->mean_contribs[i]).c_str());
        }
        std::printf("\n");
      }
    }
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Hybrid multiple access sum-rate simulator"};
  std::string config_path;
  std::string ues_str = "10,50,100,200";
  std::string schemes_str = "oma,noma,noma+thr,noma+thr+twr,hma";
  std::string duplex_str = "hd,fd";
  std::string out_path;
  int trials = 100;
  std::uint64_t seed = 42;
  int oracle_max = 0;
  bool fig3 = false;

  app.add_option("--config", config_path, "JSON scenario configuration file");
  app.add_option("--ues", ues_str, "Comma-separated UE counts, strictly ascending");
  app.add_option("--schemes", schemes_str,
                 "Comma-separated scheme rows (oma,noma,noma+thr,noma+thr+twr,hma)");
  app.add_option("--duplex", duplex_str, "Comma-separated duplex modes (hd,fd)");
  app.add_option("--trials", trials, "Monte Carlo trials per cell");
  app.add_option("--seed", seed, "Base seed for per-trial seed derivation");
  app.add_option("--out", out_path, "Result file; .txt selects structured text, else CSV");
  app.add_option("--oracle-check", oracle_max,
                 "Also run the exact matching oracle for cells with M <= this value");
  app.add_flag("--fig3-shares", fig3, "Print per-topology share and contribution lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunSpec spec;
    if (!config_path.empty()) spec.base = load_scenario_config(config_path);
    for (const std::string& token : split_csv(ues_str)) {
      std::size_t pos = 0;
      const int m = std::stoi(token, &pos);
      if (pos != token.size()) throw std::invalid_argument("invalid UE count '" + token + "'");
      spec.ue_counts.push_back(m);
    }
    spec.scheme_rows = split_csv(schemes_str);
    for (const std::string& token : split_csv(duplex_str)) {
      spec.duplex_modes.push_back(parse_duplex(token));
    }
    spec.trials = trials;
    spec.seed0 = seed;
    spec.oracle_check_max_m = oracle_max;
    validate(spec);

    const SummaryTable table = run_monte_carlo(spec);
    print_summary(table, spec, fig3);
    if (!out_path.empty()) {
      const bool text = out_path.size() >= 4 && out_path.substr(out_path.size() - 4) == ".txt";
      emit_results(table, text ? OutputFormat::structured_text : OutputFormat::csv, out_path);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hma

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

#include "hma/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hma {
namespace {

// Canonical subset of enabled topologies; OMA first, then the enabled pair
// kinds in chain order.
std::vector<TopologyKind> canonical_topologies(const ScenarioConfig& cfg) {
  std::vector<TopologyKind> out;
  for (TopologyKind kind : kCanonicalTopologyOrder) {
    for (TopologyKind enabled : cfg.topology_set) {
      if (enabled == kind) {
        out.push_back(kind);
        break;
      }
    }
  }
  return out;
}

// Per-pair argmax over pair planes [1, prefix_len). Later planes win exact
// ties, so richer topologies take precedence in the decode.
void reduce_prefix(const FitnessTensor& tensor, int prefix_len, std::vector<double>* best,
                   std::vector<int>* argmax) {
  const int m = tensor.m;
  best->assign(static_cast<std::size_t>(m) * m, kForbidden);
  argmax->assign(static_cast<std::size_t>(m) * m, -1);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      if (k == j) continue;
      const std::size_t kj = static_cast<std::size_t>(k) * m + j;
      for (int n = 1; n < prefix_len; ++n) {
        const double v = tensor.value_at(k, j, n);
        if (is_forbidden(v)) continue;
        if (is_forbidden((*best)[kj]) || v >= (*best)[kj]) {
          (*best)[kj] = v;
          (*argmax)[kj] = n;
        }
      }
    }
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void append_operating_point(std::ostringstream& out, const OperatingPoint& op) {
  const auto field = [&](const char* name, double v) {
    if (!std::isnan(v)) out << ' ' << name << '=' << format_double(v);
  };
  field("alpha", op.alpha);
  field("tau_rx", op.tau_rx);
  field("tau_tx", op.tau_tx);
  field("tau_own", op.tau_own);
  field("mac_time_share", op.mac_time_share);
}

}  // namespace

const char* role_name(UeRole role) {
  switch (role) {
    case UeRole::solo: return "solo";
    case UeRole::relay: return "relay";
    case UeRole::end_node: return "end_node";
    case UeRole::noma_member: return "noma_member";
  }
  return "?";
}

FitnessTensor build_fitness_tensor(const ChannelState& chan, const ScenarioConfig& cfg) {
  validate(cfg);
  if (chan.num_ues != cfg.num_ues) {
    throw std::invalid_argument("channel state holds " + std::to_string(chan.num_ues) +
                                " UEs, config expects " + std::to_string(cfg.num_ues));
  }
  FitnessTensor tensor;
  tensor.m = chan.num_ues;
  tensor.topologies = canonical_topologies(cfg);
  const int m = tensor.m;
  const int planes = tensor.plane_count();
  const std::size_t total = static_cast<std::size_t>(m) * m * planes;
  tensor.values.assign(total, kForbidden);
  tensor.operating_points.assign(total, OperatingPoint{});
  tensor.relay_ue.assign(static_cast<std::size_t>(m) * m, -1);

  for (int k = 0; k < m; ++k) {
    const FitnessValue solo = oma_fitness(chan.snr_ul[k], chan.snr_dl[k]);
    tensor.values[tensor.index(k, k, 0)] = solo.value;
  }

  for (int k = 0; k < m; ++k) {
    for (int j = k + 1; j < m; ++j) {
      const std::size_t kj = static_cast<std::size_t>(k) * m + j;
      const std::size_t jk = static_cast<std::size_t>(j) * m + k;
      tensor.relay_ue[kj] = tensor.relay_ue[jk] = chan.snr_dl[k] >= chan.snr_dl[j] ? k : j;

      PairContext ctx;
      ctx.snr_ul_k = chan.snr_ul[k];
      ctx.snr_dl_k = chan.snr_dl[k];
      ctx.snr_ul_j = chan.snr_ul[j];
      ctx.snr_dl_j = chan.snr_dl[j];
      ctx.snr_d2d = chan.snr_d2d_at(k, j);
      ctx.si_snr = chan.si_snr;
      ctx.duplex = cfg.duplex;
      ctx.tol = cfg.scalar_opt_tol;

      for (int n = 1; n < planes; ++n) {
        try {
          const FitnessValue fv = pair_fitness(tensor.topologies[n], ctx);
          tensor.values[tensor.index(k, j, n)] = fv.value;
          tensor.values[tensor.index(j, k, n)] = fv.value;
          tensor.operating_points[tensor.index(k, j, n)] = fv.operating_point;
          tensor.operating_points[tensor.index(j, k, n)] = fv.operating_point;
        } catch (const std::exception& e) {
          throw std::runtime_error("fitness evaluation failed for pair (" + std::to_string(k) +
                                   ", " + std::to_string(j) + ") topology " +
                                   topology_name(tensor.topologies[n]) + ": " + e.what());
        }
      }
    }
  }
  return tensor;
}

std::vector<double> reduce_pair_best(const FitnessTensor& tensor, int prefix_len) {
  if (prefix_len < 1 || prefix_len > tensor.plane_count()) {
    throw std::invalid_argument("prefix_len must be in [1, plane count]");
  }
  std::vector<double> best;
  std::vector<int> argmax;
  reduce_prefix(tensor, prefix_len, &best, &argmax);
  return best;
}

std::vector<PartitionReport> solve_hma_chain(const FitnessTensor& tensor) {
  const int m = tensor.m;
  const int planes = tensor.plane_count();
  if (m < 1 || planes < 1 || tensor.topologies[0] != TopologyKind::OMA) {
    throw std::invalid_argument("tensor must have plane 0 as the solo baseline");
  }
  std::vector<double> solo(m);
  for (int k = 0; k < m; ++k) {
    solo[k] = tensor.value_at(k, k, 0);
    if (!std::isfinite(solo[k])) {
      throw std::invalid_argument("tensor diagonal must be finite on the baseline plane");
    }
  }

  std::vector<PartitionReport> chain;
  chain.reserve(planes);

  PartitionReport best;
  best.m = m;
  best.assignments.resize(m);
  double best_objective = 0.0;
  for (int k = 0; k < m; ++k) {
    best.assignments[k] = UeAssignment{TopologyKind::OMA, -1, UeRole::solo,
                                       tensor.operating_points[tensor.index(k, k, 0)]};
    best.clusters.push_back(ClusterRecord{{k}, {k}, TopologyKind::OMA, solo[k]});
    best_objective += solo[k];
  }
  chain.push_back(best);

  std::vector<double> pair_best;
  std::vector<int> argmax;
  for (int prefix = 2; prefix <= planes; ++prefix) {
    reduce_prefix(tensor, prefix, &pair_best, &argmax);

    // Off-diagonal entries are halved: a pair occupies two permutation rows,
    // so halving makes the LAP objective count each pair value once per
    // member and keeps it commensurable with the solo diagonal.
    CostMatrix working;
    working.rows = m;
    working.cols = m;
    working.sense = OptimizeSense::maximize;
    working.entries.assign(static_cast<std::size_t>(m) * m, kForbidden);
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < m; ++j) {
        const std::size_t kj = static_cast<std::size_t>(k) * m + j;
        working.entries[kj] = k == j ? solo[k]
                                     : (is_forbidden(pair_best[kj]) ? kForbidden
                                                                    : 0.5 * pair_best[kj]);
      }
    }

    const AssignmentResult lap = solve_lap_jv(working);
    const MatchingResult matching = repair_to_matching(lap, pair_best, solo);

    if (matching.objective > best_objective) {
      PartitionReport rep;
      rep.m = m;
      rep.assignments.resize(m);
      for (int s : matching.solos) {
        rep.assignments[s] = UeAssignment{TopologyKind::OMA, -1, UeRole::solo,
                                          tensor.operating_points[tensor.index(s, s, 0)]};
        rep.clusters.push_back(ClusterRecord{{s}, {s}, TopologyKind::OMA, solo[s]});
      }
      for (const auto& [a, b] : matching.pairs) {
        const std::size_t ab = static_cast<std::size_t>(a) * m + b;
        const int n = argmax[ab];
        const TopologyKind kind = tensor.topologies[n];
        const OperatingPoint& op = tensor.operating_points[tensor.index(a, b, n)];
        UeRole role_a = UeRole::noma_member;
        UeRole role_b = UeRole::noma_member;
        if (kind != TopologyKind::NOMA) {
          const bool a_relays = tensor.relay_ue[ab] == a;
          role_a = a_relays ? UeRole::relay : UeRole::end_node;
          role_b = a_relays ? UeRole::end_node : UeRole::relay;
        }
        rep.assignments[a] = UeAssignment{kind, b, role_a, op};
        rep.assignments[b] = UeAssignment{kind, a, role_b, op};
        rep.clusters.push_back(ClusterRecord{{a, b}, {a, b}, kind, pair_best[ab]});
      }
      std::sort(rep.clusters.begin(), rep.clusters.end(),
                [](const ClusterRecord& x, const ClusterRecord& y) {
                  return x.members.front() < y.members.front();
                });
      best = std::move(rep);
      best_objective = matching.objective;
    }
    chain.push_back(best);
  }
  return chain;
}

PartitionReport solve_hma(const FitnessTensor& tensor) {
  return solve_hma_chain(tensor).back();
}

double partition_objective(const PartitionReport& report) {
  double total = 0.0;
  for (const ClusterRecord& cluster : report.clusters) total += cluster.fitness;
  return total;
}

GainReport evaluate(const PartitionReport& report, const FitnessTensor& tensor,
                    const ScenarioConfig& cfg) {
  if (report.m != tensor.m || tensor.m != cfg.num_ues) {
    throw std::invalid_argument("report, tensor, and config disagree on the UE count");
  }
  const int m = tensor.m;
  double solo_raw = 0.0;
  for (int k = 0; k < m; ++k) solo_raw += tensor.value_at(k, k, 0);
  const double total_raw = partition_objective(report);

  GainReport gain;
  const double rb_bandwidth = cfg.total_bandwidth_hz / (2.0 * m);
  gain.sum_rate_bps = total_raw * rb_bandwidth;
  gain.oma_sum_rate_bps = solo_raw * rb_bandwidth;
  // Divide before scaling so an unchanged partition reports exactly 100.
  gain.gain_pct = 100.0 * (total_raw / solo_raw);

  std::array<int, kTopologyCount> counts{};
  for (const UeAssignment& ue : report.assignments) {
    counts[static_cast<int>(ue.topology)] += 1;
  }
  for (int i = 0; i < kTopologyCount; ++i) {
    gain.topology_shares[i] = static_cast<double>(counts[i]) / m;
  }

  std::array<double, kTopologyCount> surplus{};
  double surplus_total = 0.0;
  for (const ClusterRecord& cluster : report.clusters) {
    if (cluster.members.size() != 2) continue;
    const double s = cluster.fitness - tensor.value_at(cluster.members[0], cluster.members[0], 0) -
                     tensor.value_at(cluster.members[1], cluster.members[1], 0);
    surplus[static_cast<int>(cluster.topology)] += s;
    surplus_total += s;
  }
  if (surplus_total > 0.0) {
    for (int i = 0; i < kTopologyCount; ++i) {
      gain.topology_gain_contrib[i] = surplus[i] / surplus_total;
    }
  }
  return gain;
}

std::string to_text(const PartitionReport& report) {
  std::ostringstream out;
  out << "partition m=" << report.m << "\n";
  for (int k = 0; k < report.m; ++k) {
    const UeAssignment& ue = report.assignments[k];
    out << "ue " << k << ": topology=" << topology_name(ue.topology)
        << " role=" << role_name(ue.role);
    if (ue.partner >= 0) out << " partner=" << ue.partner;
    out << "\n";
  }
  for (const ClusterRecord& cluster : report.clusters) {
    out << "cluster members=";
    for (std::size_t i = 0; i < cluster.members.size(); ++i) {
      if (i) out << ',';
      out << cluster.members[i];
    }
    out << " channels=";
    for (std::size_t i = 0; i < cluster.channels.size(); ++i) {
      if (i) out << ',';
      out << cluster.channels[i];
    }
    out << " topology=" << topology_name(cluster.topology)
        << " fitness=" << format_double(cluster.fitness);
    if (!cluster.members.empty()) {
      append_operating_point(out, report.assignments[cluster.members.front()].operating_point);
    }
    out << "\n";
  }
  return out.str();
}

std::string to_text(const GainReport& report) {
  std::ostringstream out;
  out << "sum_rate_bps=" << format_double(report.sum_rate_bps) << "\n"
      << "oma_sum_rate_bps=" << format_double(report.oma_sum_rate_bps) << "\n"
      << "gain_pct=" << format_double(report.gain_pct) << "\n";
  out << "topology_shares:";
  for (int i = 0; i < kTopologyCount; ++i) {
    out << ' ' << topology_name(kCanonicalTopologyOrder[i]) << '='
        << format_double(report.topology_shares[i]);
  }
  out << "\ntopology_gain_contrib:";
  for (int i = 0; i < kTopologyCount; ++i) {
    out << ' ' << topology_name(kCanonicalTopologyOrder[i]) << '='
        << format_double(report.topology_gain_contrib[i]);
  }
  out << "\n";
  return out.str();
}

}  // namespace hma

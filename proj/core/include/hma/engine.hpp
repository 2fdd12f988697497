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

// The partitioning engine: builds the M x M x N fitness tensor from channel
// state, optimizes the partition, and decodes it into per-UE assignments and
// the gain-versus-baseline report.
//
// The pipeline per topology prefix is: reduce the tensor over the topology
// axis by per-pair argmax (later kinds win exact ties), solve a square
// maximize LAP whose diagonal holds solo values and whose off-diagonal
// holds halved pair values (a pair occupies two rows, so halving makes the
// permutation objective count it once per member), repair permutation cycles
// into a valid pairing, and decode. solve_hma_chain runs this for every
// prefix of the tensor's topology chain and keeps the best partition seen so
// far at each step, which makes gains non-decreasing in the topology set by
// construction and never below the all-solo baseline.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hma/assignment.hpp"
#include "hma/channel_model.hpp"
#include "hma/topology_rates.hpp"

namespace hma {

// Dense M x M x N fitness tensor. Entry (k, j, n) is the fitness of pairing
// UE k with UE j under topologies[n]; the diagonal is finite only on the
// solo-baseline plane, and pair planes are exactly symmetric in (k, j).
struct FitnessTensor {
  int m = 0;
  std::vector<TopologyKind> topologies;    // size N, canonical order
  std::vector<double> values;              // m*m*N, kForbidden where invalid
  std::vector<OperatingPoint> operating_points;  // parallel to values
  std::vector<int> relay_ue;               // m*m, relaying member per pair, -1 on diagonal

  int plane_count() const { return static_cast<int>(topologies.size()); }
  std::size_t index(int k, int j, int n) const {
    return (static_cast<std::size_t>(k) * m + j) * topologies.size() + n;
  }
  double value_at(int k, int j, int n) const { return values[index(k, j, n)]; }
};

enum class UeRole : std::uint8_t { solo = 0, relay = 1, end_node = 2, noma_member = 3 };

const char* role_name(UeRole role);

struct UeAssignment {
  TopologyKind topology = TopologyKind::OMA;
  int partner = -1;  // -1 when solo
  UeRole role = UeRole::solo;
  OperatingPoint operating_point;
};

struct ClusterRecord {
  std::vector<int> members;   // one or two UE indices
  std::vector<int> channels;  // the members' own channels
  TopologyKind topology = TopologyKind::OMA;
  double fitness = 0.0;       // bit/s/Hz over the cluster's RBs
};

struct PartitionReport {
  int m = 0;
  std::vector<UeAssignment> assignments;  // per UE
  std::vector<ClusterRecord> clusters;
};

struct GainReport {
  double sum_rate_bps = 0.0;
  double oma_sum_rate_bps = 0.0;
  double gain_pct = 100.0;  // 100 * sum_rate / oma_sum_rate, >= 100 up to rounding
  // Indexed by TopologyKind value; shares sum to 1, contributions sum to 1
  // whenever the total surplus over the baseline is positive (else all 0).
  std::array<double, kTopologyCount> topology_shares{};
  std::array<double, kTopologyCount> topology_gain_contrib{};
};

// Evaluate every enabled (pair, topology) combination under config.duplex.
// Errors from the rate layer are rethrown with (k, j, topology) context.
FitnessTensor build_fitness_tensor(const ChannelState& chan, const ScenarioConfig& cfg);

// Per-pair argmax over the first prefix_len topology planes (pair planes
// only; plane 0 is the solo baseline). Returns an m*m matrix with
// kForbidden on the diagonal. Exposed for oracle checks and tests.
std::vector<double> reduce_pair_best(const FitnessTensor& tensor, int prefix_len);

// One partition per topology-chain prefix, each the best partition over that
// prefix and all shorter ones. Element 0 is the all-solo baseline.
std::vector<PartitionReport> solve_hma_chain(const FitnessTensor& tensor);

// The full-set result: last element of solve_hma_chain.
PartitionReport solve_hma(const FitnessTensor& tensor);

// Sum of cluster fitness values (bit/s/Hz over all 2M RBs).
double partition_objective(const PartitionReport& report);

GainReport evaluate(const PartitionReport& report, const FitnessTensor& tensor,
                    const ScenarioConfig& cfg);

// Structured-text serialization: one record per UE, then one block per
// cluster with its operating point.
std::string to_text(const PartitionReport& report);
// One summary block with rates, gain, shares, and contributions.
std::string to_text(const GainReport& report);

}  // namespace hma

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

// Achievable-rate fitness of a solo UE or a UE pair under each supported
// sub-topology and duplex mode.
//
// Every fitness value is an UL+DL symmetric sum rate in bit/s/Hz, aggregated
// over the cluster's resource blocks with unit-normalized per-RB bandwidth.
// The physical W/(2M) prefactor is applied later, during gain aggregation,
// where it cancels out of all gain-versus-baseline ratios.
//
// Pair topologies:
//   NOMA      both members share both channels; UL is a two-user multiple
//             access channel decoded successively, DL is superposition coding
//             with the power split chosen for the symmetric (equal-rate)
//             point.
//   THR       two-hop relaying: the stronger member forwards the weaker
//             member's UL and DL traffic hop by hop.
//   TWR_DF    two-way decode-forward relaying: a multiple-access phase toward
//             the relay, then a broadcast phase from it.
//   TWR_PLNC  two-way relaying with physical-layer network coding: the relay
//             decodes a lattice-code combination at the compute rate
//             log2(1/2 + snr), then broadcasts.
//
// Relay operation uses a single radio: the relay splits unit time into a
// receive share tau_rx, a transmit share tau_tx, and a remainder for its own
// point-to-point traffic. Each relayed stream is bottlenecked by
// min(tau_rx * in_rate, tau_tx * out_rate). Under full duplex both shares
// are 1 and every in-cluster receive SNR is degraded by residual
// self-interference; the no-cooperation operating point is always available
// as a fallback.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>

namespace hma {

// Order is the canonical chain order used for nested scheme comparisons:
// each successive kind may only improve the optimized partition.
enum class TopologyKind : std::uint8_t {
  OMA = 0,
  NOMA = 1,
  THR = 2,
  TWR_DF = 3,
  TWR_PLNC = 4,
};

inline constexpr int kTopologyCount = 5;

inline constexpr std::array<TopologyKind, kTopologyCount> kCanonicalTopologyOrder = {
    TopologyKind::OMA, TopologyKind::NOMA, TopologyKind::THR,
    TopologyKind::TWR_DF, TopologyKind::TWR_PLNC};

enum class Duplex : std::uint8_t { HD = 0, FD = 1 };

const char* topology_name(TopologyKind kind);
const char* duplex_name(Duplex duplex);

// Parse "oma", "noma", "thr", "twr_df", "twr_plnc" (case-sensitive).
// Throws std::invalid_argument naming the offending token.
TopologyKind parse_topology(const std::string& token);
// Parse "hd" or "fd".
Duplex parse_duplex(const std::string& token);

// Optimized inner variables of a fitness evaluation. Fields that do not
// apply to the chosen topology or branch stay NaN; serialization emits only
// the populated ones. When the time shares are populated they satisfy
// tau_rx + tau_tx + tau_own = 1.
struct OperatingPoint {
  double alpha = kUnset;           // DL superposition power split (NOMA)
  double tau_rx = kUnset;          // relay receive time share (HD relaying)
  double tau_tx = kUnset;          // relay transmit time share (HD relaying)
  double tau_own = kUnset;         // relay own-traffic time share (HD relaying)
  double mac_time_share = kUnset;  // corner time-sharing weight (NOMA UL)

  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
};

// Linear SNRs seen by an unordered UE pair (k, j). The first member is the
// one with the lower UE index; relay-selection ties prefer it.
struct PairContext {
  double snr_ul_k = 0.0;
  double snr_dl_k = 0.0;
  double snr_ul_j = 0.0;
  double snr_dl_j = 0.0;
  double snr_d2d = 0.0;  // cooperation link between the two members
  double si_snr = 0.0;   // residual self-interference to noise ratio (FD)
  Duplex duplex = Duplex::HD;
  double tol = 1e-6;     // scalar-optimizer tolerance
};

struct FitnessValue {
  double value = 0.0;  // bit/s/Hz summed over the cluster's RBs
  TopologyKind topology = TopologyKind::OMA;
  // Member acting as relay: 0 = first (k), 1 = second (j), -1 = no relay.
  int relay_index = -1;
  OperatingPoint operating_point;
};

// log2(1 + snr). Throws std::domain_error for negative or non-finite input.
double shannon_rate(double snr);

// Symmetric (equal-rate) point of the two-user Gaussian MAC with successive
// cancellation: min(0.5 * log2(1 + a + b), log2(1 + min(a, b))) per user.
double mac_symmetric_rate(double snr_a, double snr_b);

struct MacSymmetricPoint {
  double rate = 0.0;
  // Time-sharing weight of the decoding order that favors the first user;
  // 0.5 when the corner points coincide.
  double time_share = 0.5;
};
MacSymmetricPoint mac_symmetric_point(double snr_a, double snr_b);

// Compute-rate of lattice-code physical-layer network coding:
// max(0, log2(1/2 + snr)).
double plnc_compute_rate(double snr);

struct TwoHopRate {
  double rate = 0.0;
  double first_hop_share = 0.5;  // time share tau of the first hop
};
// max over tau in [0,1] of min(tau * first_hop_rate, (1-tau) * second_hop_rate),
// in closed form: the hops balance at tau = r2 / (r1 + r2).
TwoHopRate two_hop_rate(double first_hop_rate, double second_hop_rate);

// One relayed stream: decoded at in_rate during the receive share, forwarded
// at out_rate during the transmit share.
struct RelayStream {
  double in_rate = 0.0;
  double out_rate = 0.0;
};

struct RelayPhasePlan {
  double value = 0.0;
  double tau_rx = 0.0;
  double tau_tx = 0.0;
};

// Best half-duplex time split for a single-radio relay with its own traffic:
//   max over tau_rx, tau_tx >= 0, tau_rx + tau_tx <= 1 of
//     (1 - tau_rx) * own_ul_rate + (1 - tau_tx) * own_dl_rate
//     + stream_weight * sum_d min(tau_rx * in_d, tau_tx * out_d)
// The objective is concave piecewise-linear, so the optimum is found exactly
// by enumerating the corner points and the per-stream balance vertices.
RelayPhasePlan optimize_relay_phases(double own_ul_rate, double own_dl_rate,
                                     const RelayStream& s1, const RelayStream& s2,
                                     double stream_weight);

// Solo baseline: one dedicated UL RB plus one dedicated DL RB.
FitnessValue oma_fitness(double snr_ul, double snr_dl);

// Pair fitness under each topology. All validate the context (SNRs finite
// and nonnegative) and return a finite, nonnegative value.
FitnessValue noma_fitness(const PairContext& ctx);
FitnessValue thr_fitness(const PairContext& ctx);
FitnessValue twr_df_fitness(const PairContext& ctx);
FitnessValue twr_plnc_fitness(const PairContext& ctx);

// Dispatch to the pair operation for `kind` (which must not be OMA).
FitnessValue pair_fitness(TopologyKind kind, const PairContext& ctx);

struct ScalarOptimum {
  double argmax = 0.0;
  double value = 0.0;
};

// Maximize a scalar objective on [0, 1]. Golden-section search refined to an
// interval of width <= tol, returning the midpoint; falls back to a dense
// grid with step tol when a coarse scan detects non-unimodality. Throws
// std::domain_error if a non-finite objective value is encountered.
ScalarOptimum optimize_scalar(const std::function<double(double)>& objective, double tol);

}  // namespace hma

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
#include <vector>

#include <gtest/gtest.h>

#include "hma/random.hpp"

namespace hma {
namespace {

ScenarioConfig config_for(int m, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.num_ues = cfg.num_channels = m;
  cfg.rng_seed = seed;
  return cfg;
}

ChannelState channel_for(const ScenarioConfig& cfg) {
  return compute_channel_state(generate_deployment(cfg), cfg);
}

// Hand-built two-UE channel state for directed scenarios.
ChannelState manual_pair_state(double ul0, double dl0, double ul1, double dl1, double d2d,
                               double si_snr = 0.0) {
  ChannelState st;
  st.num_ues = 2;
  st.g_bs = {1.0, 1.0};
  st.g_ue = {0.0, 1.0, 1.0, 0.0};
  st.noise_per_rb_w = 1.0;
  st.snr_ul = {ul0, ul1};
  st.snr_dl = {dl0, dl1};
  st.snr_d2d = {0.0, d2d, d2d, 0.0};
  st.si_snr = si_snr;
  return st;
}

TEST(BuildFitnessTensor, SingleUeHasOnlyTheSoloEntry) {
  const ScenarioConfig cfg = config_for(1, 3);
  const ChannelState chan = channel_for(cfg);
  const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
  ASSERT_EQ(tensor.m, 1);
  ASSERT_EQ(tensor.plane_count(), 5);
  EXPECT_DOUBLE_EQ(tensor.value_at(0, 0, 0),
                   shannon_rate(chan.snr_ul[0]) + shannon_rate(chan.snr_dl[0]));
  for (int n = 1; n < 5; ++n) EXPECT_TRUE(is_forbidden(tensor.value_at(0, 0, n)));
}

TEST(BuildFitnessTensor, EntriesMatchIndependentReEvaluation) {
  for (Duplex duplex : {Duplex::HD, Duplex::FD}) {
    ScenarioConfig cfg = config_for(3, 11);
    cfg.duplex = duplex;
    const ChannelState chan = channel_for(cfg);
    const FitnessTensor tensor = build_fitness_tensor(chan, cfg);

    for (int k = 0; k < 3; ++k) {
      for (int j = k + 1; j < 3; ++j) {
        PairContext ctx;
        ctx.snr_ul_k = chan.snr_ul[k];
        ctx.snr_dl_k = chan.snr_dl[k];
        ctx.snr_ul_j = chan.snr_ul[j];
        ctx.snr_dl_j = chan.snr_dl[j];
        ctx.snr_d2d = chan.snr_d2d_at(k, j);
        ctx.si_snr = chan.si_snr;
        ctx.duplex = duplex;
        ctx.tol = cfg.scalar_opt_tol;
        for (int n = 1; n < tensor.plane_count(); ++n) {
          const FitnessValue expected = pair_fitness(tensor.topologies[n], ctx);
          ASSERT_EQ(tensor.value_at(k, j, n), expected.value);
          ASSERT_EQ(tensor.value_at(j, k, n), expected.value);
        }
        const int expected_relay = chan.snr_dl[k] >= chan.snr_dl[j] ? k : j;
        ASSERT_EQ(tensor.relay_ue[static_cast<std::size_t>(k) * 3 + j], expected_relay);
      }
      for (int n = 1; n < tensor.plane_count(); ++n) {
        ASSERT_TRUE(is_forbidden(tensor.value_at(k, k, n)));
      }
    }
  }
}

TEST(BuildFitnessTensor, DeterministicAndSymmetric) {
  const ScenarioConfig cfg = config_for(6, 19);
  const ChannelState chan = channel_for(cfg);
  const FitnessTensor a = build_fitness_tensor(chan, cfg);
  const FitnessTensor b = build_fitness_tensor(chan, cfg);
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (is_forbidden(a.values[i])) {
      ASSERT_TRUE(is_forbidden(b.values[i]));
    } else {
      ASSERT_EQ(a.values[i], b.values[i]);
    }
  }
  for (int k = 0; k < 6; ++k) {
    for (int j = 0; j < 6; ++j) {
      if (k == j) continue;
      for (int n = 1; n < a.plane_count(); ++n) {
        ASSERT_EQ(a.value_at(k, j, n), a.value_at(j, k, n));
      }
    }
  }
}

TEST(BuildFitnessTensor, SeveredDeviceLinkReducesRelayingToRelaySolo) {
  const ChannelState chan = manual_pair_state(2.0, 5.0, 3.0, 1.0, 0.0);
  ScenarioConfig cfg = config_for(2, 0);
  const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
  // UE 0 has the stronger DL, so it relays; with the cooperation link dead
  // every relaying plane collapses to UE 0's solo value.
  const double relay_solo = shannon_rate(2.0) + shannon_rate(5.0);
  for (int n = 2; n < 5; ++n) {
    ASSERT_NEAR(tensor.value_at(0, 1, n), relay_solo, 1e-12 * relay_solo);
  }
  EXPECT_EQ(tensor.relay_ue[1], 0);
}

TEST(BuildFitnessTensor, MismatchedChannelStateIsRejected) {
  const ScenarioConfig cfg = config_for(3, 2);
  const ChannelState chan = channel_for(config_for(4, 2));
  EXPECT_THROW(build_fitness_tensor(chan, cfg), std::invalid_argument);
}

TEST(ReducePairBest, TakesPlaneMaximumWithLaterTieWin) {
  const ScenarioConfig cfg = config_for(3, 23);
  const ChannelState chan = channel_for(cfg);
  const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
  const std::vector<double> best = reduce_pair_best(tensor, 5);
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      if (k == j) {
        ASSERT_TRUE(is_forbidden(best[static_cast<std::size_t>(k) * 3 + j]));
        continue;
      }
      double expected = -1.0;
      for (int n = 1; n < 5; ++n) {
        expected = std::max(expected, tensor.value_at(k, j, n));
      }
      ASSERT_EQ(best[static_cast<std::size_t>(k) * 3 + j], expected);
    }
  }
  EXPECT_THROW(reduce_pair_best(tensor, 0), std::invalid_argument);
  EXPECT_THROW(reduce_pair_best(tensor, 6), std::invalid_argument);
}

TEST(SolveHma, BaselineOnlyTopologySetGivesExactly100) {
  ScenarioConfig cfg = config_for(7, 29);
  cfg.topology_set = {TopologyKind::OMA};
  const ChannelState chan = channel_for(cfg);
  const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
  ASSERT_EQ(tensor.plane_count(), 1);
  const PartitionReport report = solve_hma(tensor);
  EXPECT_EQ(static_cast<int>(report.clusters.size()), 7);
  for (const UeAssignment& ue : report.assignments) {
    EXPECT_EQ(ue.topology, TopologyKind::OMA);
    EXPECT_EQ(ue.role, UeRole::solo);
    EXPECT_EQ(ue.partner, -1);
  }
  const GainReport gain = evaluate(report, tensor, cfg);
  EXPECT_EQ(gain.gain_pct, 100.0);
  EXPECT_EQ(gain.topology_shares[0], 1.0);
}

TEST(SolveHma, DominatedPairingFallsBackToAllSolo) {
  // Disparate direct links and a dead cooperation link: sharing RBs hurts
  // and relaying is impossible, so the decoded partition is the baseline.
  const ChannelState chan = manual_pair_state(50.0, 50.0, 0.5, 0.7, 1e-9);
  const ScenarioConfig cfg = config_for(2, 0);
  const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
  const PartitionReport report = solve_hma(tensor);
  EXPECT_EQ(report.clusters.size(), 2u);
  const GainReport gain = evaluate(report, tensor, cfg);
  EXPECT_EQ(gain.gain_pct, 100.0);
}

TEST(SolveHma, ProfitablePairForms) {
  // Weak UE 1 next to a strong UE 0 with an excellent device link: some
  // pair topology must beat the solo sum.
  const ChannelState chan = manual_pair_state(30.0, 30.0, 0.05, 0.05, 500.0);
  const ScenarioConfig cfg = config_for(2, 0);
  const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
  const PartitionReport report = solve_hma(tensor);
  ASSERT_EQ(report.clusters.size(), 1u);
  ASSERT_EQ(report.clusters[0].members.size(), 2u);
  EXPECT_NE(report.clusters[0].topology, TopologyKind::OMA);
  EXPECT_EQ(report.assignments[0].partner, 1);
  EXPECT_EQ(report.assignments[1].partner, 0);

  const GainReport gain = evaluate(report, tensor, cfg);
  EXPECT_GT(gain.gain_pct, 100.0);
  if (report.clusters[0].topology != TopologyKind::NOMA) {
    EXPECT_EQ(report.assignments[0].role, UeRole::relay);
    EXPECT_EQ(report.assignments[1].role, UeRole::end_node);
  }
}

TEST(SolveHma, DecodeIsConsistentWithTensorEntries) {
  Rng seeds(83);
  for (int trial = 0; trial < 20; ++trial) {
    const ScenarioConfig cfg = config_for(8, seeds.next_u64());
    const ChannelState chan = channel_for(cfg);
    const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
    const PartitionReport report = solve_hma(tensor);

    double solo_sum = 0.0;
    for (int k = 0; k < 8; ++k) solo_sum += tensor.value_at(k, k, 0);

    std::vector<int> seen(8, 0);
    double recomputed = 0.0;
    for (const ClusterRecord& cluster : report.clusters) {
      int plane = -1;
      for (int n = 0; n < tensor.plane_count(); ++n) {
        if (tensor.topologies[n] == cluster.topology) plane = n;
      }
      ASSERT_GE(plane, 0);
      if (cluster.members.size() == 1) {
        const int k = cluster.members[0];
        seen[k] += 1;
        ASSERT_EQ(cluster.fitness, tensor.value_at(k, k, 0));
        ASSERT_EQ(report.assignments[k].partner, -1);
      } else {
        ASSERT_EQ(cluster.members.size(), 2u);
        const int a = cluster.members[0];
        const int b = cluster.members[1];
        seen[a] += 1;
        seen[b] += 1;
        ASSERT_EQ(cluster.fitness, tensor.value_at(a, b, plane));
        ASSERT_EQ(report.assignments[a].partner, b);
        ASSERT_EQ(report.assignments[b].partner, a);
        ASSERT_EQ(report.assignments[a].topology, cluster.topology);
        if (cluster.topology != TopologyKind::NOMA) {
          const int relay = tensor.relay_ue[static_cast<std::size_t>(a) * 8 + b];
          const int expected_end = relay == a ? b : a;
          ASSERT_EQ(report.assignments[relay].role, UeRole::relay);
          ASSERT_EQ(report.assignments[expected_end].role, UeRole::end_node);
        }
      }
      recomputed += cluster.fitness;
    }
    for (int k = 0; k < 8; ++k) ASSERT_EQ(seen[k], 1);
    ASSERT_NEAR(partition_objective(report), recomputed, 1e-12);
    ASSERT_GE(recomputed, solo_sum - 1e-9);
  }
}

TEST(SolveHmaChain, ObjectivesNeverDecreaseAlongThePrefixChain) {
  Rng seeds(89);
  for (int trial = 0; trial < 100; ++trial) {
    const ScenarioConfig cfg = config_for(6, seeds.next_u64());
    const ChannelState chan = channel_for(cfg);
    const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
    const std::vector<PartitionReport> chain = solve_hma_chain(tensor);
    ASSERT_EQ(chain.size(), 5u);
    double prev = -1.0;
    for (const PartitionReport& report : chain) {
      const double objective = partition_objective(report);
      ASSERT_GE(objective, prev);
      prev = objective;
    }
  }
}

TEST(SolveHmaChain, FullDuplexDominatesHalfDuplexWithPerfectCancellation) {
  ScenarioConfig cfg = config_for(10, 97);
  cfg.si_cancellation_db = 400.0;  // si_snr is numerically zero
  const ChannelState chan = channel_for(cfg);

  cfg.duplex = Duplex::HD;
  const FitnessTensor hd = build_fitness_tensor(chan, cfg);
  const GainReport hd_gain = evaluate(solve_hma(hd), hd, cfg);

  cfg.duplex = Duplex::FD;
  const FitnessTensor fd = build_fitness_tensor(chan, cfg);
  const GainReport fd_gain = evaluate(solve_hma(fd), fd, cfg);

  EXPECT_GE(fd_gain.gain_pct, hd_gain.gain_pct - 1e-9);
}

TEST(SolveHma, GainInvariantUnderUeRelabeling) {
  const ScenarioConfig cfg = config_for(9, 101);
  const ChannelState chan = channel_for(cfg);
  const int m = chan.num_ues;

  // Reverse the UE indexing by hand.
  ChannelState reversed = chan;
  for (int k = 0; k < m; ++k) {
    reversed.g_bs[k] = chan.g_bs[m - 1 - k];
    reversed.snr_ul[k] = chan.snr_ul[m - 1 - k];
    reversed.snr_dl[k] = chan.snr_dl[m - 1 - k];
    for (int j = 0; j < m; ++j) {
      reversed.g_ue[static_cast<std::size_t>(k) * m + j] = chan.g_ue_at(m - 1 - k, m - 1 - j);
      reversed.snr_d2d[static_cast<std::size_t>(k) * m + j] =
          chan.snr_d2d_at(m - 1 - k, m - 1 - j);
    }
  }

  const FitnessTensor a = build_fitness_tensor(chan, cfg);
  const FitnessTensor b = build_fitness_tensor(reversed, cfg);
  const GainReport ga = evaluate(solve_hma(a), a, cfg);
  const GainReport gb = evaluate(solve_hma(b), b, cfg);
  EXPECT_NEAR(ga.gain_pct, gb.gain_pct, 1e-9);
}

TEST(Evaluate, BandwidthScalesRatesButNotGain) {
  const ScenarioConfig cfg = config_for(5, 103);
  const ChannelState chan = channel_for(cfg);
  const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
  const PartitionReport report = solve_hma(tensor);

  const GainReport base = evaluate(report, tensor, cfg);
  ScenarioConfig wide = cfg;
  wide.total_bandwidth_hz *= 2.0;
  const GainReport doubled = evaluate(report, tensor, wide);
  EXPECT_EQ(doubled.sum_rate_bps, 2.0 * base.sum_rate_bps);
  EXPECT_EQ(doubled.oma_sum_rate_bps, 2.0 * base.oma_sum_rate_bps);
  EXPECT_EQ(doubled.gain_pct, base.gain_pct);
}

TEST(Evaluate, SharesAndContributionsAreNormalized) {
  Rng seeds(107);
  for (int trial = 0; trial < 20; ++trial) {
    for (Duplex duplex : {Duplex::HD, Duplex::FD}) {
      ScenarioConfig cfg = config_for(10, seeds.next_u64());
      cfg.duplex = duplex;
      const ChannelState chan = channel_for(cfg);
      const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
      const GainReport gain = evaluate(solve_hma(tensor), tensor, cfg);

      double share_sum = 0.0;
      double contrib_sum = 0.0;
      for (int i = 0; i < kTopologyCount; ++i) {
        share_sum += gain.topology_shares[i];
        contrib_sum += gain.topology_gain_contrib[i];
      }
      ASSERT_NEAR(share_sum, 1.0, 1e-9);
      if (gain.gain_pct > 100.0 + 1e-9) {
        ASSERT_NEAR(contrib_sum, 1.0, 1e-9);
      }
      ASSERT_GE(gain.gain_pct, 100.0 - 1e-6);
    }
  }
}

TEST(Evaluate, RejectsMismatchedInputs) {
  const ScenarioConfig cfg = config_for(4, 5);
  const ChannelState chan = channel_for(cfg);
  const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
  const PartitionReport report = solve_hma(tensor);
  const ScenarioConfig other = config_for(5, 5);
  EXPECT_THROW(evaluate(report, tensor, other), std::invalid_argument);
}

TEST(ToText, SerializesPartitionAndGainBlocks) {
  const ChannelState chan = manual_pair_state(30.0, 30.0, 0.05, 0.05, 500.0);
  const ScenarioConfig cfg = config_for(2, 0);
  const FitnessTensor tensor = build_fitness_tensor(chan, cfg);
  const PartitionReport report = solve_hma(tensor);
  const std::string partition_text = to_text(report);
  EXPECT_NE(partition_text.find("partition m=2"), std::string::npos);
  EXPECT_NE(partition_text.find("cluster members="), std::string::npos);
  EXPECT_NE(partition_text.find("topology="), std::string::npos);

  const std::string gain_text = to_text(evaluate(report, tensor, cfg));
  EXPECT_NE(gain_text.find("gain_pct="), std::string::npos);
  EXPECT_NE(gain_text.find("topology_shares:"), std::string::npos);
  EXPECT_NE(gain_text.find("topology_gain_contrib:"), std::string::npos);
}

}  // namespace
}  // namespace hma

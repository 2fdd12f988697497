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

#include "hma/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

namespace hma {
namespace {

double bs_distance(const Deployment& dep, int i) {
  return std::hypot(dep.ue_positions[i][0] - dep.bs_position[0],
                    dep.ue_positions[i][1] - dep.bs_position[1]);
}

TEST(ScenarioConfig, DefaultsAreValid) {
  EXPECT_NO_THROW(validate(ScenarioConfig{}));
}

TEST(ScenarioConfig, ValidationNamesTheViolatedField) {
  const auto expect_field = [](ScenarioConfig cfg, const std::string& field) {
    try {
      validate(cfg);
      FAIL() << "expected ConfigError for field " << field;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), field);
    }
  };

  ScenarioConfig cfg;
  cfg.num_ues = 0;
  expect_field(cfg, "num_ues");

  cfg = ScenarioConfig{};
  cfg.num_channels = cfg.num_ues + 1;
  expect_field(cfg, "num_channels");

  cfg = ScenarioConfig{};
  cfg.min_bs_distance_m = 0.0;
  expect_field(cfg, "min_bs_distance_m");

  cfg = ScenarioConfig{};
  cfg.cell_radius_m = cfg.min_bs_distance_m;
  expect_field(cfg, "cell_radius_m");

  cfg = ScenarioConfig{};
  cfg.total_bandwidth_hz = 0.0;
  expect_field(cfg, "total_bandwidth_hz");

  cfg = ScenarioConfig{};
  cfg.shadow_std_db = -1.0;
  expect_field(cfg, "shadow_std_db");

  cfg = ScenarioConfig{};
  cfg.si_cancellation_db = -5.0;
  expect_field(cfg, "si_cancellation_db");

  cfg = ScenarioConfig{};
  cfg.scalar_opt_tol = 0.0;
  expect_field(cfg, "scalar_opt_tol");

  cfg = ScenarioConfig{};
  cfg.topology_set = {TopologyKind::NOMA};
  expect_field(cfg, "topology_set");

  cfg = ScenarioConfig{};
  cfg.topology_set = {TopologyKind::OMA, TopologyKind::NOMA, TopologyKind::NOMA};
  expect_field(cfg, "topology_set");

  cfg = ScenarioConfig{};
  cfg.pathloss_bs.model = "free_space";
  expect_field(cfg, "pathloss_bs.model");
}

TEST(ScenarioConfig, ParseOverridesDefaultsAndValidates) {
  const char* text = R"({
    "cell_radius_m": 250.0,
    "num_ues": 4,
    "num_channels": 4,
    "pathloss_ue": {"intercept_db": 140.0, "slope_db_per_decade": 36.0},
    "fading": "none",
    "topology_set": ["oma", "noma"],
    "duplex": "fd",
    "rng_seed": 7
  })";
  const ScenarioConfig cfg = parse_scenario_config(text);
  EXPECT_EQ(cfg.cell_radius_m, 250.0);
  EXPECT_EQ(cfg.num_ues, 4);
  EXPECT_EQ(cfg.pathloss_ue.intercept_db, 140.0);
  EXPECT_EQ(cfg.pathloss_ue.slope_db_per_decade, 36.0);
  EXPECT_EQ(cfg.pathloss_ue.model, "log_distance");
  EXPECT_EQ(cfg.fading, FadingKind::none);
  ASSERT_EQ(cfg.topology_set.size(), 2u);
  EXPECT_EQ(cfg.topology_set[1], TopologyKind::NOMA);
  EXPECT_EQ(cfg.duplex, Duplex::FD);
  EXPECT_EQ(cfg.rng_seed, 7u);
  // Untouched fields keep their defaults.
  EXPECT_EQ(cfg.ue_tx_power_dbm, ScenarioConfig{}.ue_tx_power_dbm);
}

TEST(ScenarioConfig, UnknownKeysAreHardErrors) {
  try {
    parse_scenario_config(R"({"cell_radius": 250.0})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "cell_radius");
  }
  try {
    parse_scenario_config(R"({"pathloss_bs": {"intercept": 100.0}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "pathloss_bs.intercept");
  }
}

TEST(ScenarioConfig, TypeErrorsNameTheKey) {
  try {
    parse_scenario_config(R"({"num_ues": "ten"})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "num_ues");
  }
}

TEST(ScenarioConfig, MalformedJsonAndMissingFileAreErrors) {
  EXPECT_THROW(parse_scenario_config("{not json"), std::runtime_error);
  EXPECT_THROW(load_scenario_config("/nonexistent/config.json"), std::runtime_error);
}

TEST(Deployment, SeededDeterminism) {
  ScenarioConfig cfg;
  cfg.num_ues = cfg.num_channels = 1;
  cfg.rng_seed = 7;
  const Deployment a = generate_deployment(cfg);
  const Deployment b = generate_deployment(cfg);
  ASSERT_EQ(a.ue_positions.size(), 1u);
  EXPECT_EQ(a.ue_positions[0][0], b.ue_positions[0][0]);
  EXPECT_EQ(a.ue_positions[0][1], b.ue_positions[0][1]);

  cfg.rng_seed = 8;
  const Deployment c = generate_deployment(cfg);
  EXPECT_NE(a.ue_positions[0][0], c.ue_positions[0][0]);
}

TEST(Deployment, AllDistancesInsideAnnulus) {
  ScenarioConfig cfg;
  cfg.num_ues = cfg.num_channels = 1000;
  const Deployment dep = generate_deployment(cfg);
  for (int i = 0; i < cfg.num_ues; ++i) {
    const double d = bs_distance(dep, i);
    ASSERT_GE(d, cfg.min_bs_distance_m);
    ASSERT_LE(d, cfg.cell_radius_m);
  }
}

TEST(Deployment, MeanDistanceMatchesAreaUniformOracle) {
  ScenarioConfig cfg;
  cfg.num_ues = cfg.num_channels = 100000;
  const Deployment dep = generate_deployment(cfg);
  double sum = 0.0;
  for (int i = 0; i < cfg.num_ues; ++i) sum += bs_distance(dep, i);
  // E[r] over the annulus [10, 500]: 2(R^3 - r0^3) / (3(R^2 - r0^2)).
  EXPECT_NEAR(sum / cfg.num_ues, 333.464, 333.464 * 0.01);
}

TEST(ChannelState, PathlossAnchorAtOneKilometer) {
  const ScenarioConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.pathloss_bs.loss_db(1000.0), 128.1);
  EXPECT_NEAR(cfg.pathloss_bs.loss_db(100.0), 128.1 - 37.6, 1e-12);
}

TEST(ChannelState, SnrRecomputationFromParts) {
  ScenarioConfig cfg;
  cfg.num_ues = cfg.num_channels = 12;
  const Deployment dep = generate_deployment(cfg);
  const ChannelState st = compute_channel_state(dep, cfg);

  const int m = cfg.num_ues;
  const double noise = dbm_to_watts(cfg.noise_psd_dbm_hz) * cfg.total_bandwidth_hz / (2.0 * m);
  EXPECT_NEAR(st.noise_per_rb_w, noise, noise * 1e-12);
  const double pu_rb = dbm_to_watts(cfg.ue_tx_power_dbm) / m;  // split_across_band
  const double pb_rb = dbm_to_watts(cfg.bs_total_power_dbm) / m;
  for (int k = 0; k < m; ++k) {
    ASSERT_NEAR(st.snr_ul[k], pu_rb * st.g_bs[k] / noise, st.snr_ul[k] * 1e-12);
    ASSERT_NEAR(st.snr_dl[k], pb_rb * st.g_bs[k] / noise, st.snr_dl[k] * 1e-12);
    for (int j = 0; j < m; ++j) {
      if (j == k) continue;
      ASSERT_NEAR(st.snr_d2d_at(k, j), pu_rb * st.g_ue_at(k, j) / noise,
                  st.snr_d2d_at(k, j) * 1e-12);
    }
  }
  const double si = pu_rb * db_to_linear(-cfg.si_cancellation_db) / noise;
  EXPECT_NEAR(st.si_snr, si, si * 1e-12);
}

TEST(ChannelState, FullPerRbPolicyScalesUeSnrsByM) {
  ScenarioConfig split;
  split.num_ues = split.num_channels = 8;
  ScenarioConfig full = split;
  full.ue_power_policy = UePowerPolicy::full_per_rb;

  const Deployment dep = generate_deployment(split);
  const ChannelState a = compute_channel_state(dep, split);
  const ChannelState b = compute_channel_state(dep, full);
  for (int k = 0; k < split.num_ues; ++k) {
    ASSERT_NEAR(b.snr_ul[k], 8.0 * a.snr_ul[k], b.snr_ul[k] * 1e-12);
    ASSERT_EQ(b.snr_dl[k], a.snr_dl[k]);  // BS power split is policy-independent
  }
}

TEST(ChannelState, D2dMatrixExactlySymmetricWithZeroDiagonal) {
  ScenarioConfig cfg;
  cfg.num_ues = cfg.num_channels = 9;
  const ChannelState st = compute_channel_state(generate_deployment(cfg), cfg);
  for (int k = 0; k < 9; ++k) {
    EXPECT_EQ(st.snr_d2d_at(k, k), 0.0);
    for (int j = 0; j < 9; ++j) {
      ASSERT_EQ(st.snr_d2d_at(k, j), st.snr_d2d_at(j, k));
      ASSERT_EQ(st.g_ue_at(k, j), st.g_ue_at(j, k));
    }
  }
}

TEST(ChannelState, GainMonotoneInDistanceWithoutRandomEffects) {
  ScenarioConfig cfg;
  cfg.num_ues = cfg.num_channels = 64;
  cfg.shadow_std_db = 0.0;
  cfg.fading = FadingKind::none;
  const Deployment dep = generate_deployment(cfg);
  const ChannelState st = compute_channel_state(dep, cfg);

  std::vector<int> order(64);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return bs_distance(dep, a) < bs_distance(dep, b); });
  for (std::size_t i = 1; i < order.size(); ++i) {
    ASSERT_GE(st.g_bs[order[i - 1]], st.g_bs[order[i]]);
  }
}

TEST(ChannelState, RayleighFactorsHaveUnitMean) {
  // With fading disabled the generator skips the fading draws, so a paired
  // run isolates the multiplicative factor on every BS link.
  ScenarioConfig faded;
  faded.num_ues = faded.num_channels = 10000;
  ScenarioConfig flat = faded;
  flat.fading = FadingKind::none;

  const Deployment dep = generate_deployment(faded);
  const ChannelState a = compute_channel_state(dep, faded);
  const ChannelState b = compute_channel_state(dep, flat);
  double sum = 0.0;
  for (int k = 0; k < faded.num_ues; ++k) sum += a.g_bs[k] / b.g_bs[k];
  EXPECT_NEAR(sum / faded.num_ues, 1.0, 0.03);
}

TEST(ChannelState, AllQuantitiesFiniteAndNonnegative) {
  ScenarioConfig cfg;
  cfg.num_ues = cfg.num_channels = 25;
  const ChannelState st = compute_channel_state(generate_deployment(cfg), cfg);
  const auto check = [](double v) {
    ASSERT_TRUE(std::isfinite(v));
    ASSERT_GE(v, 0.0);
  };
  for (double v : st.g_bs) check(v);
  for (double v : st.g_ue) check(v);
  for (double v : st.snr_ul) check(v);
  for (double v : st.snr_dl) check(v);
  for (double v : st.snr_d2d) check(v);
  check(st.noise_per_rb_w);
  check(st.si_snr);
}

TEST(ChannelDigest, SeparatesStatesAndDetectsMutation) {
  ScenarioConfig cfg;
  cfg.num_ues = cfg.num_channels = 6;
  cfg.rng_seed = 1;
  const ChannelState a = compute_channel_state(generate_deployment(cfg), cfg);
  cfg.rng_seed = 2;
  const ChannelState b = compute_channel_state(generate_deployment(cfg), cfg);
  EXPECT_NE(channel_digest(a), channel_digest(b));
  EXPECT_EQ(channel_digest(a), channel_digest(a));

  ChannelState mutated = a;
  mutated.snr_ul[3] = std::nextafter(mutated.snr_ul[3], 1e300);
  EXPECT_NE(channel_digest(a), channel_digest(mutated));
}

}  // namespace
}  // namespace hma

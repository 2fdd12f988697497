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

// Reproducible single-cell deployments and link-gain / SNR state.
//
// One base station sits at the origin; M UEs are placed uniformly at random
// in an annulus around it. Each UE owns one UL and one DL resource block, so
// the band splits into 2M RBs. Link gains follow a log-distance path-loss
// law with optional i.i.d. log-normal shadowing and unit-mean Rayleigh
// (exponential power) fading. All dB quantities are converted to linear
// exactly once at this module's boundary; downstream modules see linear
// values only.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hma/topology_rates.hpp"

namespace hma {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Path loss in dB as a function of log10 distance in km:
// pl(d) = intercept_db + slope_db_per_decade * log10(d_km).
struct PathlossModel {
  std::string model = "log_distance";
  double intercept_db = 0.0;
  double slope_db_per_decade = 0.0;

  double loss_db(double distance_m) const {
    return intercept_db + slope_db_per_decade * std::log10(distance_m / 1000.0);
  }
};

enum class FadingKind : std::uint8_t { none = 0, rayleigh = 1 };

// How the configured UE transmit power maps to one RB.
//   split_across_band: the budget is divided evenly over the UE's M-th share
//                      of the band, so per-RB UE power is ue_tx_power / M and
//                      UE-side SNRs do not change with density.
//   full_per_rb:       the full budget is spent on whichever RB the UE is
//                      transmitting on.
enum class UePowerPolicy : std::uint8_t { split_across_band = 0, full_per_rb = 1 };

struct ScenarioConfig {
  double cell_radius_m = 500.0;
  double min_bs_distance_m = 10.0;
  int num_ues = 10;       // M
  int num_channels = 10;  // K; must equal M
  double total_bandwidth_hz = 10e6;
  double ue_tx_power_dbm = 23.0;
  double bs_total_power_dbm = 37.0;
  double noise_psd_dbm_hz = -170.0;
  PathlossModel pathloss_bs{"log_distance", 128.1, 37.6};
  PathlossModel pathloss_ue{"log_distance", 121.0, 20.0};
  double shadow_std_db = 17.0;  // 0 disables shadowing
  FadingKind fading = FadingKind::rayleigh;
  double si_cancellation_db = 145.0;
  UePowerPolicy ue_power_policy = UePowerPolicy::split_across_band;
  std::vector<TopologyKind> topology_set{kCanonicalTopologyOrder.begin(),
                                         kCanonicalTopologyOrder.end()};
  Duplex duplex = Duplex::HD;
  double scalar_opt_tol = 1e-6;
  std::uint64_t rng_seed = 42;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Throws ConfigError naming the first violated field. Checks, among others:
// M >= 1, K == M, cell_radius_m > min_bs_distance_m > 0, topology_set
// contains OMA, si_cancellation_db >= 0, scalar_opt_tol > 0.
void validate(const ScenarioConfig& config);

// Load a JSON configuration over the defaults above. Nested sections mirror
// the struct (pathloss_bs has keys model / intercept_db / slope_db_per_decade;
// topology_set is an array of topology names; fading, duplex and
// ue_power_policy are strings). Unknown keys anywhere are a hard error.
ScenarioConfig load_scenario_config(const std::string& path);
ScenarioConfig parse_scenario_config(const std::string& json_text);

struct Deployment {
  std::array<double, 2> bs_position{0.0, 0.0};
  std::vector<std::array<double, 2>> ue_positions;
  std::uint64_t seed_used = 0;
};

struct ChannelState {
  int num_ues = 0;
  std::vector<double> g_bs;   // length M, linear power gain UE_k <-> BS
  std::vector<double> g_ue;   // M*M row-major, symmetric, diagonal unused (0)
  double noise_per_rb_w = 0.0;
  std::vector<double> snr_ul;   // per-RB UE power * g_bs / noise
  std::vector<double> snr_dl;   // per-UE share of BS power * g_bs / noise
  std::vector<double> snr_d2d;  // M*M, per-RB UE power * g_ue / noise
  double si_snr = 0.0;  // residual self-interference to noise ratio under FD

  double g_ue_at(int k, int j) const { return g_ue[static_cast<std::size_t>(k) * num_ues + j]; }
  double snr_d2d_at(int k, int j) const {
    return snr_d2d[static_cast<std::size_t>(k) * num_ues + j];
  }
};

// Place M UEs uniformly in the annulus [min_bs_distance_m, cell_radius_m].
// Deterministic for a fixed (config, seed); throws ConfigError on invalid
// config.
Deployment generate_deployment(const ScenarioConfig& config);

// Derive gains and SNRs from a deployment. Shadowing and fading draws come
// from a substream of the deployment seed, so the full channel state is a
// pure function of (config, seed). Pair distances are floored at 1 m to keep
// gains finite when two UEs nearly coincide.
ChannelState compute_channel_state(const Deployment& deployment, const ScenarioConfig& config);

// FNV-1a hash over the channel state's bit patterns; used to assert that
// paired Monte Carlo comparisons really saw identical channels.
std::uint64_t channel_digest(const ChannelState& state);

}  // namespace hma

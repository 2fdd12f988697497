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
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "hma/random.hpp"

namespace hma {
namespace {

// Substream tags keep deployment draws and shadowing/fading draws on
// independent sequences derived from one base seed.
constexpr std::uint64_t kDeploymentStream = 1;
constexpr std::uint64_t kChannelStream = 2;

std::uint64_t substream_seed(std::uint64_t base, std::uint64_t tag) {
  return splitmix64(base ^ (tag * kSeedMixGamma));
}

void check_finite(double value, const char* field) {
  if (!std::isfinite(value)) throw ConfigError(field, "must be finite");
}

void check_pathloss(const PathlossModel& model, const char* field) {
  if (model.model != "log_distance") {
    throw ConfigError(std::string(field) + ".model",
                      "unsupported model '" + model.model + "' (expected log_distance)");
  }
  check_finite(model.intercept_db, field);
  check_finite(model.slope_db_per_decade, field);
}

}  // namespace

void validate(const ScenarioConfig& config) {
  if (config.num_ues < 1) throw ConfigError("num_ues", "must be at least 1");
  if (config.num_channels != config.num_ues) {
    throw ConfigError("num_channels", "must equal num_ues (one channel per UE)");
  }
  check_finite(config.min_bs_distance_m, "min_bs_distance_m");
  check_finite(config.cell_radius_m, "cell_radius_m");
  if (!(config.min_bs_distance_m > 0.0)) {
    throw ConfigError("min_bs_distance_m", "must be positive");
  }
  if (!(config.cell_radius_m > config.min_bs_distance_m)) {
    throw ConfigError("cell_radius_m", "must exceed min_bs_distance_m");
  }
  check_finite(config.total_bandwidth_hz, "total_bandwidth_hz");
  if (!(config.total_bandwidth_hz > 0.0)) {
    throw ConfigError("total_bandwidth_hz", "must be positive");
  }
  check_finite(config.ue_tx_power_dbm, "ue_tx_power_dbm");
  check_finite(config.bs_total_power_dbm, "bs_total_power_dbm");
  check_finite(config.noise_psd_dbm_hz, "noise_psd_dbm_hz");
  check_pathloss(config.pathloss_bs, "pathloss_bs");
  check_pathloss(config.pathloss_ue, "pathloss_ue");
  check_finite(config.shadow_std_db, "shadow_std_db");
  if (config.shadow_std_db < 0.0) throw ConfigError("shadow_std_db", "must be nonnegative");
  check_finite(config.si_cancellation_db, "si_cancellation_db");
  if (config.si_cancellation_db < 0.0) {
    throw ConfigError("si_cancellation_db", "must be nonnegative");
  }
  check_finite(config.scalar_opt_tol, "scalar_opt_tol");
  if (!(config.scalar_opt_tol > 0.0)) throw ConfigError("scalar_opt_tol", "must be positive");
  if (config.topology_set.empty()) throw ConfigError("topology_set", "must not be empty");
  bool has_oma = false;
  for (std::size_t i = 0; i < config.topology_set.size(); ++i) {
    if (config.topology_set[i] == TopologyKind::OMA) has_oma = true;
    for (std::size_t k = 0; k < i; ++k) {
      if (config.topology_set[k] == config.topology_set[i]) {
        throw ConfigError("topology_set", "duplicate entry '" +
                                              std::string(topology_name(config.topology_set[i])) +
                                              "'");
      }
    }
  }
  if (!has_oma) throw ConfigError("topology_set", "must contain OMA (the baseline)");
}

Deployment generate_deployment(const ScenarioConfig& config) {
  validate(config);
  Deployment dep;
  dep.seed_used = config.rng_seed;
  dep.bs_position = {0.0, 0.0};
  dep.ue_positions.reserve(static_cast<std::size_t>(config.num_ues));

  Rng rng(substream_seed(config.rng_seed, kDeploymentStream));
  const double rmin2 = config.min_bs_distance_m * config.min_bs_distance_m;
  const double rmax2 = config.cell_radius_m * config.cell_radius_m;
  for (int i = 0; i < config.num_ues; ++i) {
    const double u = rng.uniform01();
    const double v = rng.uniform01();
    // Area-uniform radius in the annulus, then an independent angle.
    const double r = std::sqrt(rmin2 + u * (rmax2 - rmin2));
    const double theta = 2.0 * 3.14159265358979323846 * v;
    dep.ue_positions.push_back({r * std::cos(theta), r * std::sin(theta)});
  }
  return dep;
}

ChannelState compute_channel_state(const Deployment& deployment, const ScenarioConfig& config) {
  validate(config);
  const int m = config.num_ues;
  if (deployment.ue_positions.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("deployment holds " +
                                std::to_string(deployment.ue_positions.size()) +
                                " UE positions, config expects " + std::to_string(m));
  }

  ChannelState st;
  st.num_ues = m;
  const std::size_t mm = static_cast<std::size_t>(m) * m;

  std::vector<double> pl_bs_db(m);
  for (int i = 0; i < m; ++i) {
    const auto& p = deployment.ue_positions[i];
    const double d = std::hypot(p[0] - deployment.bs_position[0],
                                p[1] - deployment.bs_position[1]);
    pl_bs_db[i] = config.pathloss_bs.loss_db(d);
  }
  std::vector<double> pl_ue_db(mm, 0.0);
  for (int k = 0; k < m; ++k) {
    for (int j = k + 1; j < m; ++j) {
      const auto& a = deployment.ue_positions[k];
      const auto& b = deployment.ue_positions[j];
      // Floor at 1 m so near-coincident UEs keep a finite gain.
      const double d = std::max(1.0, std::hypot(a[0] - b[0], a[1] - b[1]));
      pl_ue_db[static_cast<std::size_t>(k) * m + j] = config.pathloss_ue.loss_db(d);
      pl_ue_db[static_cast<std::size_t>(j) * m + k] = pl_ue_db[static_cast<std::size_t>(k) * m + j];
    }
  }

  // Draw order is fixed: BS shadowing, pair shadowing (upper triangle),
  // BS fading, pair fading. Disabling a stage skips its draws.
  Rng rng(substream_seed(deployment.seed_used, kChannelStream));
  if (config.shadow_std_db > 0.0) {
    for (int i = 0; i < m; ++i) pl_bs_db[i] += rng.normal() * config.shadow_std_db;
    for (int k = 0; k < m; ++k) {
      for (int j = k + 1; j < m; ++j) {
        const double s = rng.normal() * config.shadow_std_db;
        pl_ue_db[static_cast<std::size_t>(k) * m + j] += s;
        pl_ue_db[static_cast<std::size_t>(j) * m + k] += s;
      }
    }
  }

  st.g_bs.resize(m);
  for (int i = 0; i < m; ++i) st.g_bs[i] = db_to_linear(-pl_bs_db[i]);
  st.g_ue.assign(mm, 0.0);
  for (int k = 0; k < m; ++k) {
    for (int j = k + 1; j < m; ++j) {
      const double g = db_to_linear(-pl_ue_db[static_cast<std::size_t>(k) * m + j]);
      st.g_ue[static_cast<std::size_t>(k) * m + j] = g;
      st.g_ue[static_cast<std::size_t>(j) * m + k] = g;
    }
  }
  if (config.fading == FadingKind::rayleigh) {
    for (int i = 0; i < m; ++i) st.g_bs[i] *= rng.exponential();
    for (int k = 0; k < m; ++k) {
      for (int j = k + 1; j < m; ++j) {
        const double f = rng.exponential();
        st.g_ue[static_cast<std::size_t>(k) * m + j] *= f;
        st.g_ue[static_cast<std::size_t>(j) * m + k] *= f;
      }
    }
  }

  st.noise_per_rb_w =
      dbm_to_watts(config.noise_psd_dbm_hz) * config.total_bandwidth_hz / (2.0 * m);
  const double ue_power_w = dbm_to_watts(config.ue_tx_power_dbm);
  const double ue_power_per_rb_w =
      config.ue_power_policy == UePowerPolicy::split_across_band ? ue_power_w / m : ue_power_w;
  const double bs_power_per_ue_w = dbm_to_watts(config.bs_total_power_dbm) / m;

  st.snr_ul.resize(m);
  st.snr_dl.resize(m);
  st.snr_d2d.assign(mm, 0.0);
  for (int i = 0; i < m; ++i) {
    st.snr_ul[i] = ue_power_per_rb_w * st.g_bs[i] / st.noise_per_rb_w;
    st.snr_dl[i] = bs_power_per_ue_w * st.g_bs[i] / st.noise_per_rb_w;
  }
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      if (k == j) continue;
      st.snr_d2d[static_cast<std::size_t>(k) * m + j] =
          ue_power_per_rb_w * st.g_ue[static_cast<std::size_t>(k) * m + j] / st.noise_per_rb_w;
    }
  }
  st.si_snr =
      ue_power_per_rb_w * db_to_linear(-config.si_cancellation_db) / st.noise_per_rb_w;
  return st;
}

std::uint64_t channel_digest(const ChannelState& state) {
  std::uint64_t h = 14695981039346656037ull;
  const auto mix_u64 = [&h](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xFFull;
      h *= 1099511628211ull;
    }
  };
  const auto mix_double = [&](double d) { mix_u64(std::bit_cast<std::uint64_t>(d)); };
  mix_u64(static_cast<std::uint64_t>(state.num_ues));
  for (double g : state.g_bs) mix_double(g);
  for (double g : state.g_ue) mix_double(g);
  mix_double(state.noise_per_rb_w);
  for (double s : state.snr_ul) mix_double(s);
  for (double s : state.snr_dl) mix_double(s);
  for (double s : state.snr_d2d) mix_double(s);
  mix_double(state.si_snr);
  return h;
}

namespace {

using nlohmann::json;

PathlossModel parse_pathloss(const json& section, const std::string& field,
                             const PathlossModel& defaults) {
  PathlossModel model = defaults;
  for (const auto& [key, value] : section.items()) {
    if (key == "model") {
      model.model = value.get<std::string>();
    } else if (key == "intercept_db") {
      model.intercept_db = value.get<double>();
    } else if (key == "slope_db_per_decade") {
      model.slope_db_per_decade = value.get<double>();
    } else {
      throw ConfigError(field + "." + key, "unknown key");
    }
  }
  return model;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw std::runtime_error("config root must be a JSON object");

  ScenarioConfig cfg;
  for (const auto& [key, value] : root.items()) {
    try {
      if (key == "cell_radius_m") cfg.cell_radius_m = value.get<double>();
      else if (key == "min_bs_distance_m") cfg.min_bs_distance_m = value.get<double>();
      else if (key == "num_ues") cfg.num_ues = value.get<int>();
      else if (key == "num_channels") cfg.num_channels = value.get<int>();
      else if (key == "total_bandwidth_hz") cfg.total_bandwidth_hz = value.get<double>();
      else if (key == "ue_tx_power_dbm") cfg.ue_tx_power_dbm = value.get<double>();
      else if (key == "bs_total_power_dbm") cfg.bs_total_power_dbm = value.get<double>();
      else if (key == "noise_psd_dbm_hz") cfg.noise_psd_dbm_hz = value.get<double>();
      else if (key == "pathloss_bs") cfg.pathloss_bs = parse_pathloss(value, key, cfg.pathloss_bs);
      else if (key == "pathloss_ue") cfg.pathloss_ue = parse_pathloss(value, key, cfg.pathloss_ue);
      else if (key == "shadow_std_db") cfg.shadow_std_db = value.get<double>();
      else if (key == "fading") {
        const std::string token = value.get<std::string>();
        if (token == "none") cfg.fading = FadingKind::none;
        else if (token == "rayleigh") cfg.fading = FadingKind::rayleigh;
        else throw ConfigError("fading", "unknown value '" + token + "'");
      } else if (key == "si_cancellation_db") {
        cfg.si_cancellation_db = value.get<double>();
      } else if (key == "ue_power_policy") {
        const std::string token = value.get<std::string>();
        if (token == "split_across_band") cfg.ue_power_policy = UePowerPolicy::split_across_band;
        else if (token == "full_per_rb") cfg.ue_power_policy = UePowerPolicy::full_per_rb;
        else throw ConfigError("ue_power_policy", "unknown value '" + token + "'");
      } else if (key == "topology_set") {
        cfg.topology_set.clear();
        for (const auto& entry : value) cfg.topology_set.push_back(parse_topology(entry.get<std::string>()));
      } else if (key == "duplex") {
        cfg.duplex = parse_duplex(value.get<std::string>());
      } else if (key == "scalar_opt_tol") {
        cfg.scalar_opt_tol = value.get<double>();
      } else if (key == "rng_seed") {
        cfg.rng_seed = value.get<std::uint64_t>();
      } else {
        throw ConfigError(key, "unknown key");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(key, e.what());
    }
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_config(buffer.str());
}

}  // namespace hma

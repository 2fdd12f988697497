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

#include "hma/topology_rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hma {
namespace {

void check_snr(double snr, const char* what) {
  if (!std::isfinite(snr) || snr < 0.0) {
    throw std::domain_error(std::string(what) + " must be a finite nonnegative SNR");
  }
}

void check_context(const PairContext& ctx) {
  check_snr(ctx.snr_ul_k, "snr_ul_k");
  check_snr(ctx.snr_dl_k, "snr_dl_k");
  check_snr(ctx.snr_ul_j, "snr_ul_j");
  check_snr(ctx.snr_dl_j, "snr_dl_j");
  check_snr(ctx.snr_d2d, "snr_d2d");
  check_snr(ctx.si_snr, "si_snr");
  if (!(ctx.tol > 0.0)) throw std::domain_error("tol must be positive");
}

// Relay choice inside a pair: the member with the stronger DL link; exact
// ties prefer the first (lower-index) member.
int choose_relay(const PairContext& ctx) {
  return ctx.snr_dl_k >= ctx.snr_dl_j ? 0 : 1;
}

struct RelayLinks {
  double snr_ul_relay = 0.0;
  double snr_dl_relay = 0.0;
  double snr_d2d = 0.0;
};

RelayLinks relay_links(const PairContext& ctx, int relay) {
  RelayLinks links;
  links.snr_ul_relay = relay == 0 ? ctx.snr_ul_k : ctx.snr_ul_j;
  links.snr_dl_relay = relay == 0 ? ctx.snr_dl_k : ctx.snr_dl_j;
  links.snr_d2d = ctx.snr_d2d;
  return links;
}

// Per-kind relayed streams. Stream 1 carries the end node's UL traffic
// (sink: the relay's own UL link), stream 2 its DL traffic (sink: the
// cooperation link back to the end node).
void relay_streams(TopologyKind kind, const RelayLinks& l, double si_divisor,
                   RelayStream* s1, RelayStream* s2) {
  const double ul_r = l.snr_ul_relay / si_divisor;
  const double dl_r = l.snr_dl_relay / si_divisor;
  const double d2d = l.snr_d2d / si_divisor;
  switch (kind) {
    case TopologyKind::THR:
      *s1 = {shannon_rate(d2d), shannon_rate(ul_r)};
      *s2 = {shannon_rate(dl_r), shannon_rate(d2d)};
      return;
    case TopologyKind::TWR_DF: {
      // Both directions enter the relay through one multiple-access phase.
      const double mac = mac_symmetric_rate(dl_r, d2d);
      *s1 = {mac, shannon_rate(ul_r)};
      *s2 = {mac, shannon_rate(d2d)};
      return;
    }
    case TopologyKind::TWR_PLNC:
      *s1 = {plnc_compute_rate(d2d), shannon_rate(ul_r)};
      *s2 = {plnc_compute_rate(dl_r), shannon_rate(d2d)};
      return;
    default:
      throw std::invalid_argument("not a relaying topology");
  }
}

FitnessValue relay_fitness(TopologyKind kind, const PairContext& ctx) {
  check_context(ctx);
  const int relay = choose_relay(ctx);
  const RelayLinks links = relay_links(ctx, relay);
  // Stream multiplicity: a two-way exchange moves traffic in both directions
  // within one receive/transmit cycle, plain forwarding moves each stream once.
  const double weight = kind == TopologyKind::THR ? 1.0 : 2.0;

  const double own_ul = shannon_rate(links.snr_ul_relay);
  const double own_dl = shannon_rate(links.snr_dl_relay);

  FitnessValue fv;
  fv.topology = kind;
  fv.relay_index = relay;

  if (ctx.duplex == Duplex::HD) {
    RelayStream s1, s2;
    relay_streams(kind, links, 1.0, &s1, &s2);
    const RelayPhasePlan plan = optimize_relay_phases(own_ul, own_dl, s1, s2, weight);
    fv.value = plan.value;
    fv.operating_point.tau_rx = plan.tau_rx;
    fv.operating_point.tau_tx = plan.tau_tx;
    fv.operating_point.tau_own = std::max(0.0, 1.0 - plan.tau_rx - plan.tau_tx);
    return fv;
  }

  // FD: phases run concurrently, so every in-cluster receive SNR is degraded
  // by residual self-interference. Falling back to no cooperation restores
  // the clean solo rates, since solo UL/DL need no simultaneous
  // transmit-and-receive.
  const double divisor = 1.0 + ctx.si_snr;
  RelayStream s1, s2;
  relay_streams(kind, links, divisor, &s1, &s2);
  const double coop = shannon_rate(links.snr_ul_relay / divisor) +
                      shannon_rate(links.snr_dl_relay / divisor) +
                      weight * (std::min(s1.in_rate, s1.out_rate) +
                                std::min(s2.in_rate, s2.out_rate));
  fv.value = std::max(own_ul + own_dl, coop);
  return fv;
}

}  // namespace

const char* topology_name(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::OMA: return "OMA";
    case TopologyKind::NOMA: return "NOMA";
    case TopologyKind::THR: return "THR";
    case TopologyKind::TWR_DF: return "TWR_DF";
    case TopologyKind::TWR_PLNC: return "TWR_PLNC";
  }
  return "?";
}

const char* duplex_name(Duplex duplex) {
  return duplex == Duplex::HD ? "hd" : "fd";
}

TopologyKind parse_topology(const std::string& token) {
  if (token == "oma") return TopologyKind::OMA;
  if (token == "noma") return TopologyKind::NOMA;
  if (token == "thr") return TopologyKind::THR;
  if (token == "twr_df") return TopologyKind::TWR_DF;
  if (token == "twr_plnc") return TopologyKind::TWR_PLNC;
  throw std::invalid_argument("unknown topology '" + token + "'");
}

Duplex parse_duplex(const std::string& token) {
  if (token == "hd") return Duplex::HD;
  if (token == "fd") return Duplex::FD;
  throw std::invalid_argument("unknown duplex mode '" + token + "'");
}

double shannon_rate(double snr) {
  check_snr(snr, "snr");
  return std::log2(1.0 + snr);
}

double mac_symmetric_rate(double snr_a, double snr_b) {
  check_snr(snr_a, "snr_a");
  check_snr(snr_b, "snr_b");
  return std::min(0.5 * shannon_rate(snr_a + snr_b),
                  shannon_rate(std::min(snr_a, snr_b)));
}

MacSymmetricPoint mac_symmetric_point(double snr_a, double snr_b) {
  MacSymmetricPoint point;
  point.rate = mac_symmetric_rate(snr_a, snr_b);
  const double la = shannon_rate(snr_a);
  const double lb = shannon_rate(snr_b);
  const double lsum = shannon_rate(snr_a + snr_b);
  if (point.rate <= 0.0) return point;
  if (0.5 * lsum <= shannon_rate(std::min(snr_a, snr_b))) {
    // Sum constraint binds: time-share the two decoding-order corners along
    // the dominant face so that user a's rate hits the symmetric point.
    const double denom = la + lb - lsum;
    point.time_share =
        denom > 0.0 ? std::clamp((point.rate - lsum + lb) / denom, 0.0, 1.0) : 0.5;
  } else {
    // Weak user binds: operate at the corner that decodes the weak user
    // free of interference; no time sharing needed.
    point.time_share = snr_a <= snr_b ? 1.0 : 0.0;
  }
  return point;
}

double plnc_compute_rate(double snr) {
  check_snr(snr, "snr");
  return std::max(0.0, std::log2(0.5 + snr));
}

TwoHopRate two_hop_rate(double first_hop_rate, double second_hop_rate) {
  if (!std::isfinite(first_hop_rate) || first_hop_rate < 0.0 ||
      !std::isfinite(second_hop_rate) || second_hop_rate < 0.0) {
    throw std::domain_error("hop rates must be finite and nonnegative");
  }
  TwoHopRate result;
  const double sum = first_hop_rate + second_hop_rate;
  if (sum <= 0.0) return result;
  result.rate = first_hop_rate * second_hop_rate / sum;
  result.first_hop_share = second_hop_rate / sum;
  return result;
}

RelayPhasePlan optimize_relay_phases(double own_ul_rate, double own_dl_rate,
                                     const RelayStream& s1, const RelayStream& s2,
                                     double stream_weight) {
  const auto value_at = [&](double u, double v) {
    return (1.0 - u) * own_ul_rate + (1.0 - v) * own_dl_rate +
           stream_weight * (std::min(u * s1.in_rate, v * s1.out_rate) +
                            std::min(u * s2.in_rate, v * s2.out_rate));
  };
  // Corners of the time simplex plus each stream's balance vertex on the
  // tau_rx + tau_tx = 1 edge; the concave piecewise-linear objective attains
  // its maximum at one of these.
  std::vector<std::pair<double, double>> candidates = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  for (const RelayStream& s : {s1, s2}) {
    const double denom = s.in_rate + s.out_rate;
    if (denom > 0.0) candidates.emplace_back(s.out_rate / denom, s.in_rate / denom);
  }
  RelayPhasePlan best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const auto& [u, v] : candidates) {
    const double value = value_at(u, v);
    if (value > best.value) best = {value, u, v};
  }
  return best;
}

FitnessValue oma_fitness(double snr_ul, double snr_dl) {
  FitnessValue fv;
  fv.topology = TopologyKind::OMA;
  fv.value = shannon_rate(snr_ul) + shannon_rate(snr_dl);
  return fv;
}

FitnessValue noma_fitness(const PairContext& ctx) {
  check_context(ctx);
  const MacSymmetricPoint ul = mac_symmetric_point(ctx.snr_ul_k, ctx.snr_ul_j);

  const double gs = std::max(ctx.snr_dl_k, ctx.snr_dl_j);
  const double gw = std::min(ctx.snr_dl_k, ctx.snr_dl_j);
  double alpha = 0.0;
  double r_dl = 0.0;
  if (gw > 0.0) {
    // Power split equalizing the superposition rates: the strong user gets
    // log2(1 + alpha*gs) after cancelling, the weak user
    // log2(1 + (1-alpha)*gw / (1 + alpha*gw)); equality is a quadratic in
    // alpha with one root in [0, 1].
    const double a = gs * gw;
    const double b = gs + gw;
    const double c = -gw;
    alpha = std::clamp((-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a), 0.0, 1.0);
    r_dl = shannon_rate(alpha * gs);
  }

  FitnessValue fv;
  fv.topology = TopologyKind::NOMA;
  // Both members are active on both members' channels: two UL RBs carrying
  // two users each at the symmetric MAC rate, two DL RBs likewise.
  fv.value = 4.0 * (ul.rate + r_dl);
  fv.operating_point.alpha = alpha;
  fv.operating_point.mac_time_share = ul.time_share;
  return fv;
}

FitnessValue thr_fitness(const PairContext& ctx) {
  return relay_fitness(TopologyKind::THR, ctx);
}

FitnessValue twr_df_fitness(const PairContext& ctx) {
  return relay_fitness(TopologyKind::TWR_DF, ctx);
}

FitnessValue twr_plnc_fitness(const PairContext& ctx) {
  return relay_fitness(TopologyKind::TWR_PLNC, ctx);
}

FitnessValue pair_fitness(TopologyKind kind, const PairContext& ctx) {
  switch (kind) {
    case TopologyKind::NOMA: return noma_fitness(ctx);
    case TopologyKind::THR: return thr_fitness(ctx);
    case TopologyKind::TWR_DF: return twr_df_fitness(ctx);
    case TopologyKind::TWR_PLNC: return twr_plnc_fitness(ctx);
    case TopologyKind::OMA: break;
  }
  throw std::invalid_argument("pair_fitness requires a pair topology");
}

ScalarOptimum optimize_scalar(const std::function<double(double)>& objective, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const auto eval = [&](double x) {
    const double v = objective(x);
    if (!std::isfinite(v)) throw std::domain_error("objective is not finite on [0, 1]");
    return v;
  };

  constexpr int kCoarse = 33;
  std::array<double, kCoarse> xs, vs;
  int best_i = 0;
  for (int i = 0; i < kCoarse; ++i) {
    xs[i] = static_cast<double>(i) / (kCoarse - 1);
    vs[i] = eval(xs[i]);
    if (vs[i] > vs[best_i]) best_i = i;
  }

  // Unimodality check: once the coarse samples strictly decrease, any later
  // strict increase breaks the single-peak bracket assumption.
  bool unimodal = true;
  bool falling = false;
  for (int i = 0; i + 1 < kCoarse; ++i) {
    if (vs[i + 1] < vs[i]) falling = true;
    else if (vs[i + 1] > vs[i] && falling) { unimodal = false; break; }
  }

  if (!unimodal) {
    ScalarOptimum out{0.0, vs[0]};
    const long long steps = std::llround(std::ceil(1.0 / tol));
    for (long long i = 0; i <= steps; ++i) {
      const double x = std::min(1.0, static_cast<double>(i) * tol);
      const double v = eval(x);
      if (v > out.value) out = {x, v};
    }
    return out;
  }

  double lo = xs[std::max(0, best_i - 1)];
  double hi = xs[std::min(kCoarse - 1, best_i + 1)];
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - phi * (hi - lo);
  double d = lo + phi * (hi - lo);
  double fc = eval(c);
  double fd = eval(d);
  int guard = 0;
  while (hi - lo > tol && guard++ < 200) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - phi * (hi - lo);
      fc = eval(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + phi * (hi - lo);
      fd = eval(d);
    }
  }
  const double mid = 0.5 * (lo + hi);
  return {mid, eval(mid)};
}

}  // namespace hma

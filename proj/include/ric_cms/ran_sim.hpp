//------------------------------------------------------------------------------
//
//   Copyright 2026 The ric-cms Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

// Discrete-time RAN world: gNBs on a grid, UEs with mixed mobility, RSRP
// attachment, A3 handover with CIO/HYS/TTT, link failures, ping-pong
// accounting and a fixed-plus-amplifier energy model.

#include "ric_cms/common.hpp"
#include "ric_cms/mitigation.hpp"
#include "ric_cms/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ric_cms {

enum class MobilityClass
{
  kWalking,
  kCycling,
  kDriving,
};

enum class ServiceType
{
  kEmbb,
  kUrllc,
  kMmtc,
};

constexpr std::string_view to_string(MobilityClass m) noexcept
{
  switch (m)
  {
  case MobilityClass::kWalking:
    return "walking";
  case MobilityClass::kCycling:
    return "cycling";
  case MobilityClass::kDriving:
    return "driving";
  }
  return "?";
}

constexpr std::string_view to_string(ServiceType s) noexcept
{
  switch (s)
  {
  case ServiceType::kEmbb:
    return "eMBB";
  case ServiceType::kUrllc:
    return "URLLC";
  case ServiceType::kMmtc:
    return "mMTC";
  }
  return "?";
}

struct MobilityShare
{
  MobilityClass mobility_class = MobilityClass::kWalking;
  double        share          = 0.0;
  double        min_speed_mps  = 0.0;
  double        max_speed_mps  = 0.0;

  bool operator==(MobilityShare const &) const = default;
};

struct ServiceShare
{
  ServiceType service          = ServiceType::kEmbb;
  double      share            = 0.0;
  double      bandwidth_weight = 1.0;

  bool operator==(ServiceShare const &) const = default;
};

struct SimConfig
{
  std::size_t n_gnbs        = 4;
  std::size_t n_ues         = 100;
  double      area_width_m  = 2300.0;
  double      area_height_m = 2300.0;
  double      carrier_freq_hz = 2.4e9;
  double      step_ms         = 100.0;
  double      duration_min    = 10.0;
  double      rsrp_min_dbm    = -110.0;
  /// Serving RSRP below which handover evaluation runs; unset means every
  /// tick (plain A3).
  std::optional<double> ho_threshold_dbm = -110.0;
  double                txp_default_dbm  = 30.0;
  Bounds                txp_bounds_dbm{0.0, 50.0};
  double                cio_db             = 2.0;
  double                hys_db             = 0.5;
  double                ttt_ms             = 0.1;
  double                ret_deg            = 1.5;
  double                adjust_interval_ms = 1000.0;
  double                pingpong_window_ms = 1000.0;

  std::vector<MobilityShare> mobility_mix{
      {MobilityClass::kWalking, 0.35, 0.0, 1.0},
      {MobilityClass::kCycling, 0.30, 2.0, 5.0},
      {MobilityClass::kDriving, 0.35, 6.0, 15.0},
  };
  std::vector<ServiceShare> service_mix{
      {ServiceType::kEmbb, 0.40, 1.0},
      {ServiceType::kUrllc, 0.30, 1.0},
      {ServiceType::kMmtc, 0.30, 1.0},
  };

  // Propagation: log-distance with a tilt penalty.
  double pl0_db             = 40.05;
  double pathloss_exponent  = 3.5;
  double ret_opt_deg        = 1.5;
  double ret_att_db_per_deg = 1.0;

  // Link budget and energy.
  double noise_floor_dbm   = -100.0;
  double ue_bandwidth_hz   = 1e6;
  double p_fixed_w         = 100.0;
  double amplifier_factor  = 4.0;

  bool operator==(SimConfig const &) const = default;

  TimeMs duration_ms() const noexcept
  {
    return duration_min * 60'000.0;
  }

  std::size_t total_steps() const noexcept
  {
    return static_cast<std::size_t>(std::llround(duration_ms() / step_ms));
  }

  void validate() const
  {
    auto fail = [](std::string const &what) { throw Error(ErrorCode::kInvalidConfig, what); };
    if (n_ues == 0)
    {
      fail("n_ues must be positive");
    }
    if (n_gnbs == 0)
    {
      fail("n_gnbs must be positive");
    }
    if (!(step_ms > 0.0))
    {
      fail("step_ms must be positive");
    }
    if (!(duration_min > 0.0))
    {
      fail("duration_min must be positive");
    }
    if (!(area_width_m > 0.0) || !(area_height_m > 0.0))
    {
      fail("area must have positive extent");
    }
    if (!(txp_bounds_dbm.max >= txp_bounds_dbm.min))
    {
      fail("txp bounds out of order");
    }
    if (!txp_bounds_dbm.contains(txp_default_dbm))
    {
      fail("default txp outside bounds");
    }
    if (!(adjust_interval_ms > 0.0))
    {
      fail("adjust_interval_ms must be positive");
    }
    if (mobility_mix.empty() || service_mix.empty())
    {
      fail("mobility and service mixes must be non-empty");
    }
    double m = 0.0;
    for (auto const &s : mobility_mix)
    {
      if (s.share < 0.0 || s.min_speed_mps < 0.0 || s.max_speed_mps < s.min_speed_mps)
      {
        fail("invalid mobility class entry");
      }
      m += s.share;
    }
    double sv = 0.0;
    for (auto const &s : service_mix)
    {
      if (s.share < 0.0 || s.bandwidth_weight < 0.0)
      {
        fail("invalid service entry");
      }
      sv += s.share;
    }
    if (std::abs(m - 1.0) > 1e-9)
    {
      fail("mobility mix does not sum to 1");
    }
    if (std::abs(sv - 1.0) > 1e-9)
    {
      fail("service mix does not sum to 1");
    }
  }
};

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  bool operator==(Vec2 const &) const = default;
};

inline double distance(Vec2 a, Vec2 b) noexcept
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct LastHandover
{
  std::size_t from_gnb = 0;
  TimeMs      t_clock  = 0.0;

  bool operator==(LastHandover const &) const = default;
};

struct UEState
{
  std::size_t                id = 0;
  Vec2                       position;
  Vec2                       velocity;
  MobilityClass              mobility_class = MobilityClass::kWalking;
  ServiceType                service_type   = ServiceType::kEmbb;
  double                     bandwidth_weight = 1.0;
  std::optional<std::size_t> serving_gnb;
  /// Cell the UE was on before its link failed.
  std::optional<std::size_t> last_serving_gnb;
  std::vector<double>        ttt_timer_ms;
  std::optional<LastHandover> last_handover;

  bool connected() const noexcept
  {
    return serving_gnb.has_value();
  }

  double speed() const noexcept
  {
    return std::hypot(velocity.x, velocity.y);
  }

  bool operator==(UEState const &) const = default;
};

struct GnbState
{
  std::size_t id = 0;
  Vec2        position;
  double      txp_dbm       = 30.0;
  double      ret_deg       = 1.5;
  double      bits_served   = 0.0;
  double      energy_joules = 0.0;

  bool operator==(GnbState const &) const = default;
};

struct KpiReport
{
  double        energy_efficiency_bits_per_joule = 0.0;
  std::uint64_t link_failures      = 0;
  std::uint64_t total_handovers    = 0;
  std::uint64_t pingpong_handovers = 0;

  bool operator==(KpiReport const &) const = default;
};

/// Counters accrued during a single tick.
struct StepDelta
{
  std::uint64_t link_failures = 0;
  std::uint64_t handovers     = 0;
  std::uint64_t pingpongs     = 0;
  double        bits          = 0.0;
  double        joules        = 0.0;
};

enum class TraceEventKind
{
  kHandover,
  kLinkFailure,
  kReattach,
  kPingPong,
};

constexpr std::string_view to_string(TraceEventKind k) noexcept
{
  switch (k)
  {
  case TraceEventKind::kHandover:
    return "HO";
  case TraceEventKind::kLinkFailure:
    return "LF";
  case TraceEventKind::kReattach:
    return "REATTACH";
  case TraceEventKind::kPingPong:
    return "PP";
  }
  return "?";
}

struct TraceRow
{
  TimeMs                     t_ms = 0.0;
  std::size_t                ue_id = 0;
  std::optional<std::size_t> serving_gnb;
  double                     rsrp_dbm = 0.0;
  TraceEventKind             event    = TraceEventKind::kHandover;
};

struct SimState
{
  SimConfig             cfg;
  TimeMs                t_ms = 0.0;
  std::vector<GnbState> gnbs;
  std::vector<UEState>  ues;
  /// rsrp[ue][gnb] as of the last tick.
  std::vector<std::vector<double>> rsrp;

  std::uint64_t link_failures      = 0;
  std::uint64_t total_handovers    = 0;
  std::uint64_t pingpong_handovers = 0;
  StepDelta     last_step;

  bool                  trace_enabled = false;
  std::vector<TraceRow> trace;

  double total_bits() const noexcept
  {
    double b = 0.0;
    for (auto const &g : gnbs)
    {
      b += g.bits_served;
    }
    return b;
  }

  double total_joules() const noexcept
  {
    double j = 0.0;
    for (auto const &g : gnbs)
    {
      j += g.energy_joules;
    }
    return j;
  }

  double txp_dbm() const noexcept
  {
    return gnbs.front().txp_dbm;
  }
};

/// Antenna gain from remote electrical tilt: a linear penalty around the
/// optimal tilt.
inline double tilt_gain_db(double ret_deg, SimConfig const &cfg) noexcept
{
  return -cfg.ret_att_db_per_deg * std::abs(ret_deg - cfg.ret_opt_deg);
}

inline double path_loss_db(double distance_m, SimConfig const &cfg) noexcept
{
  double const d = std::max(distance_m, 1.0);
  return cfg.pl0_db + 10.0 * cfg.pathloss_exponent * std::log10(d);
}

inline double rsrp_dbm(double txp_dbm, double ret_deg, double distance_m, SimConfig const &cfg) noexcept
{
  return txp_dbm + tilt_gain_db(ret_deg, cfg) - path_loss_db(distance_m, cfg);
}

inline double rsrp(GnbState const &gnb, Vec2 ue_pos, SimConfig const &cfg) noexcept
{
  return rsrp_dbm(gnb.txp_dbm, gnb.ret_deg, distance(gnb.position, ue_pos), cfg);
}

/// Free-space loss at 1 m for a carrier, for checking pl0_db.
inline double free_space_loss_1m_db(double carrier_hz) noexcept
{
  constexpr double kSpeedOfLight = 299'792'458.0;
  return 20.0 * std::log10(4.0 * std::numbers::pi * carrier_hz / kSpeedOfLight);
}

namespace detail {

/// Largest-remainder apportionment of n items over shares summing to 1.
inline std::vector<std::size_t> apportion(std::vector<double> const &shares, std::size_t n)
{
  std::vector<std::size_t> counts(shares.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i)
  {
    double const exact = shares[i] * static_cast<double>(n);
    // The epsilon absorbs binary rounding such as 0.35 * 100 = 34.999...
    auto const   whole = static_cast<std::size_t>(std::floor(exact + 1e-9));
    counts[i]          = whole;
    assigned += whole;
    remainders.emplace_back(exact - static_cast<double>(whole), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](auto const &a, auto const &b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned)
  {
    ++counts[remainders[r % remainders.size()].second];
  }
  return counts;
}

inline std::optional<std::size_t> best_cell(std::span<double const> rsrp, double min_dbm)
{
  auto it = std::max_element(rsrp.begin(), rsrp.end());
  if (it == rsrp.end() || *it < min_dbm)
  {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - rsrp.begin());
}

}  // namespace detail

inline void refresh_rsrp(SimState &s)
{
  for (std::size_t u = 0; u < s.ues.size(); ++u)
  {
    for (std::size_t g = 0; g < s.gnbs.size(); ++g)
    {
      s.rsrp[u][g] = rsrp(s.gnbs[g], s.ues[u].position, s.cfg);
    }
  }
}

/// Sets every gNB's transmit power, clamped into the configured bounds.
inline void set_txp(SimState &s, double txp_dbm)
{
  double const v = s.cfg.txp_bounds_dbm.clamp(txp_dbm);
  for (auto &g : s.gnbs)
  {
    g.txp_dbm = v;
  }
}

inline SimState init_sim(SimConfig const &cfg, std::uint64_t seed)
{
  cfg.validate();
  Rng      rng(seed);
  SimState s;
  s.cfg = cfg;

  std::size_t const cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cfg.n_gnbs))));
  std::size_t const rows = (cfg.n_gnbs + cols - 1) / cols;
  for (std::size_t g = 0; g < cfg.n_gnbs; ++g)
  {
    GnbState gnb;
    gnb.id         = g;
    gnb.position.x = (static_cast<double>(g % cols) + 0.5) * cfg.area_width_m / static_cast<double>(cols);
    gnb.position.y = (static_cast<double>(g / cols) + 0.5) * cfg.area_height_m / static_cast<double>(rows);
    gnb.txp_dbm    = cfg.txp_default_dbm;
    gnb.ret_deg    = cfg.ret_deg;
    s.gnbs.push_back(gnb);
  }

  std::vector<double> mobility_shares;
  for (auto const &m : cfg.mobility_mix)
  {
    mobility_shares.push_back(m.share);
  }
  std::vector<double> service_shares;
  for (auto const &m : cfg.service_mix)
  {
    service_shares.push_back(m.share);
  }
  auto const mobility_counts = detail::apportion(mobility_shares, cfg.n_ues);
  auto const service_counts  = detail::apportion(service_shares, cfg.n_ues);

  std::vector<std::size_t> mobility_of;
  for (std::size_t i = 0; i < mobility_counts.size(); ++i)
  {
    mobility_of.insert(mobility_of.end(), mobility_counts[i], i);
  }
  std::vector<std::size_t> service_of;
  for (std::size_t i = 0; i < service_counts.size(); ++i)
  {
    service_of.insert(service_of.end(), service_counts[i], i);
  }
  rng.shuffle(mobility_of);
  rng.shuffle(service_of);

  for (std::size_t u = 0; u < cfg.n_ues; ++u)
  {
    auto const &mob = cfg.mobility_mix[mobility_of[u]];
    auto const &svc = cfg.service_mix[service_of[u]];
    UEState     ue;
    ue.id               = u;
    ue.mobility_class   = mob.mobility_class;
    ue.service_type     = svc.service;
    ue.bandwidth_weight = svc.bandwidth_weight;
    ue.position.x       = rng.uniform(0.0, cfg.area_width_m);
    ue.position.y       = rng.uniform(0.0, cfg.area_height_m);
    double const speed  = rng.uniform(mob.min_speed_mps, mob.max_speed_mps);
    double const angle  = rng.uniform(0.0, 2.0 * std::numbers::pi);
    ue.velocity         = {speed * std::cos(angle), speed * std::sin(angle)};
    ue.ttt_timer_ms.assign(cfg.n_gnbs, 0.0);
    s.ues.push_back(std::move(ue));
  }

  s.rsrp.assign(cfg.n_ues, std::vector<double>(cfg.n_gnbs, 0.0));
  refresh_rsrp(s);
  for (std::size_t u = 0; u < cfg.n_ues; ++u)
  {
    s.ues[u].serving_gnb = detail::best_cell(s.rsrp[u], cfg.rsrp_min_dbm);
  }
  return s;
}

/// Moves a coordinate by `delta` inside [0, extent], mirroring at the walls.
/// Returns true when the motion component has to be negated.
inline bool reflect(double &coord, double delta, double extent) noexcept
{
  coord += delta;
  bool flipped = false;
  while (coord < 0.0 || coord > extent)
  {
    coord   = coord < 0.0 ? -coord : 2.0 * extent - coord;
    flipped = !flipped;
  }
  return flipped;
}

inline void move_ue(UEState &ue, double dt_s, SimConfig const &cfg) noexcept
{
  if (reflect(ue.position.x, ue.velocity.x * dt_s, cfg.area_width_m))
  {
    ue.velocity.x = -ue.velocity.x;
  }
  if (reflect(ue.position.y, ue.velocity.y * dt_s, cfg.area_height_m))
  {
    ue.velocity.y = -ue.velocity.y;
  }
}

struct HandoverDecision
{
  std::optional<std::size_t> target;
};

/// A3 entry: neighbour n qualifies when rsrp_n + CIO > rsrp_serving + HYS and
/// n is itself above the service threshold. The condition must hold for TTT;
/// each tick in which it holds counts as one full step. The strongest
/// qualifying neighbour is chosen.
inline HandoverDecision evaluate_handover(UEState &ue, std::span<double const> measurements,
                                          SimConfig const &cfg)
{
  HandoverDecision d;
  if (!ue.serving_gnb)
  {
    return d;
  }
  std::size_t const s        = *ue.serving_gnb;
  double const      serving  = measurements[s];
  double            best_dbm = 0.0;
  for (std::size_t n = 0; n < measurements.size(); ++n)
  {
    if (n == s)
    {
      ue.ttt_timer_ms[n] = 0.0;
      continue;
    }
    bool const entering = measurements[n] + cfg.cio_db > serving + cfg.hys_db &&
                          measurements[n] >= cfg.rsrp_min_dbm;
    ue.ttt_timer_ms[n] = entering ? ue.ttt_timer_ms[n] + cfg.step_ms : 0.0;
    if (entering && ue.ttt_timer_ms[n] >= cfg.ttt_ms && (!d.target || measurements[n] > best_dbm))
    {
      d.target = n;
      best_dbm = measurements[n];
    }
  }
  return d;
}

/// Moves the UE to `target`, returning true for a ping-pong (back to the
/// cell it just left, within the window).
inline bool commit_handover(UEState &ue, std::size_t from, std::size_t target, TimeMs t,
                            SimConfig const &cfg)
{
  bool const pingpong = ue.last_handover && ue.last_handover->from_gnb == target &&
                        t - ue.last_handover->t_clock <= cfg.pingpong_window_ms;
  ue.serving_gnb   = target;
  ue.last_handover = LastHandover{from, t};
  std::fill(ue.ttt_timer_ms.begin(), ue.ttt_timer_ms.end(), 0.0);
  return pingpong;
}

/// One tick: move, measure, hand over, detect link failures and re-attach,
/// then account bits and energy. Every serving-cell change counts as a
/// handover, including re-attachment to a cell other than the one lost.
inline void step(SimState &s)
{
  auto const &cfg  = s.cfg;
  double const dt_s = cfg.step_ms / 1000.0;
  TimeMs const t    = s.t_ms + cfg.step_ms;
  StepDelta    delta;

  auto note = [&](UEState const &ue, TraceEventKind kind, double dbm) {
    if (s.trace_enabled)
    {
      s.trace.push_back(TraceRow{t, ue.id, ue.serving_gnb, dbm, kind});
    }
  };
  auto count_change = [&](UEState &ue, std::size_t from, std::size_t to) {
    ++delta.handovers;
    bool const pp = commit_handover(ue, from, to, t, cfg);
    note(ue, TraceEventKind::kHandover, s.rsrp[ue.id][to]);
    if (pp)
    {
      ++delta.pingpongs;
      note(ue, TraceEventKind::kPingPong, s.rsrp[ue.id][to]);
    }
  };

  for (auto &ue : s.ues)
  {
    move_ue(ue, dt_s, cfg);
  }
  refresh_rsrp(s);

  for (auto &ue : s.ues)
  {
    auto const &meas = s.rsrp[ue.id];
    if (ue.connected())
    {
      std::size_t const serving = *ue.serving_gnb;
      bool const gated = cfg.ho_threshold_dbm && meas[serving] >= *cfg.ho_threshold_dbm;
      if (gated)
      {
        std::fill(ue.ttt_timer_ms.begin(), ue.ttt_timer_ms.end(), 0.0);
      }
      else if (auto d = evaluate_handover(ue, meas, cfg); d.target)
      {
        count_change(ue, serving, *d.target);
      }

      std::size_t const now_serving = *ue.serving_gnb;
      if (meas[now_serving] < cfg.rsrp_min_dbm &&
          std::none_of(meas.begin(), meas.end(),
                       [&](double v) { return v >= cfg.rsrp_min_dbm; }))
      {
        ++delta.link_failures;
        note(ue, TraceEventKind::kLinkFailure, meas[now_serving]);
        ue.last_serving_gnb = now_serving;
        ue.serving_gnb.reset();
        std::fill(ue.ttt_timer_ms.begin(), ue.ttt_timer_ms.end(), 0.0);
      }
    }
    else if (auto best = detail::best_cell(meas, cfg.rsrp_min_dbm))
    {
      auto const previous = ue.last_serving_gnb;
      if (previous && *previous != *best)
      {
        count_change(ue, *previous, *best);
      }
      else
      {
        ue.serving_gnb = *best;
      }
      note(ue, TraceEventKind::kReattach, meas[*best]);
    }
  }

  for (auto const &ue : s.ues)
  {
    if (!ue.connected())
    {
      continue;
    }
    double const sinr = std::pow(10.0, (s.rsrp[ue.id][*ue.serving_gnb] - cfg.noise_floor_dbm) / 10.0);
    double const bits = cfg.ue_bandwidth_hz * ue.bandwidth_weight * std::log2(1.0 + sinr) * dt_s;
    s.gnbs[*ue.serving_gnb].bits_served += bits;
    delta.bits += bits;
  }
  for (auto &g : s.gnbs)
  {
    double const p_tx_w = std::pow(10.0, (g.txp_dbm - 30.0) / 10.0);
    double const joules = (cfg.p_fixed_w + cfg.amplifier_factor * p_tx_w) * dt_s;
    g.energy_joules += joules;
    delta.joules += joules;
  }

  s.link_failures += delta.link_failures;
  s.total_handovers += delta.handovers;
  s.pingpong_handovers += delta.pingpongs;
  s.last_step = delta;
  s.t_ms      = t;
}

inline KpiReport kpi_report(SimState const &s)
{
  if (!(s.t_ms > 0.0))
  {
    throw Error(ErrorCode::kInvalidArgument, "KPI report before any elapsed time");
  }
  KpiReport r;
  double const joules = s.total_joules();
  r.energy_efficiency_bits_per_joule = joules > 0.0 ? s.total_bits() / joules : 0.0;
  r.link_failures      = s.link_failures;
  r.total_handovers    = s.total_handovers;
  r.pingpong_handovers = s.pingpong_handovers;
  return r;
}

}  // namespace ric_cms

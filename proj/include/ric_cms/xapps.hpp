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

// The energy-saving and mobility-robustness xApps of the TXP experiment, and
// a stochastic event generator over an arbitrary conflict topology.

#include "ric_cms/common.hpp"
#include "ric_cms/conflict_model.hpp"
#include "ric_cms/detection.hpp"
#include "ric_cms/mitigation.hpp"
#include "ric_cms/rng.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace ric_cms {

inline XAppId const  kEsXApp{"ES"};
inline XAppId const  kMroXApp{"MRO"};
inline ParamId const kTxp{"TXP"};
inline KpiId const   kEnergyEfficiency{"energy_efficiency"};
inline KpiId const   kLinkFailures{"link_failures"};
inline KpiId const   kTotalHandovers{"total_handovers"};

/// KPIs aggregated over the trailing window an xApp looks at.
struct KpiView
{
  double        window_ms         = 0.0;
  double        energy_efficiency = 0.0;
  std::uint64_t link_failures     = 0;
  std::uint64_t handovers         = 0;

  double get(KpiId const &k) const
  {
    if (k == kEnergyEfficiency)
    {
      return energy_efficiency;
    }
    if (k == kLinkFailures)
    {
      return static_cast<double>(link_failures);
    }
    if (k == kTotalHandovers)
    {
      return static_cast<double>(handovers);
    }
    throw Error(ErrorCode::kUnknownId, "KPI " + k.str() + " is not observable in a view");
  }
};

enum class Trigger
{
  kAlways,
  kOnCondition,
};

struct Condition
{
  KpiId       kpi;
  std::string op = "<";
  double      value     = 0.0;
  double      window_ms = 5000.0;

  bool holds(KpiView const &view) const
  {
    double const x = view.get(kpi);
    if (op == "<")
    {
      return x < value;
    }
    if (op == "<=")
    {
      return x <= value;
    }
    if (op == ">")
    {
      return x > value;
    }
    if (op == ">=")
    {
      return x >= value;
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown condition operator " + op);
  }

  bool operator==(Condition const &) const = default;
};

struct XAppPolicy
{
  XAppId                   xapp;
  Trigger                  trigger       = Trigger::kAlways;
  double                   request_value = 0.0;
  std::optional<Condition> condition;

  bool operator==(XAppPolicy const &) const = default;

  void validate(Bounds bounds) const
  {
    if (!bounds.contains(request_value))
    {
      throw Error(ErrorCode::kInvalidConfig,
                  "request value of " + xapp.str() + " outside parameter bounds");
    }
    if (trigger == Trigger::kOnCondition && !condition)
    {
      throw Error(ErrorCode::kInvalidConfig, xapp.str() + ": ON_CONDITION policy without condition");
    }
  }
};

inline XAppPolicy es_always_policy()
{
  return {kEsXApp, Trigger::kAlways, 3.0, std::nullopt};
}

inline XAppPolicy mro_always_policy()
{
  return {kMroXApp, Trigger::kAlways, 50.0, std::nullopt};
}

/// Requests 3 dBm while windowed energy efficiency is below `ee_threshold`.
inline XAppPolicy es_conditional_policy(double ee_threshold, double window_ms = 5000.0)
{
  return {kEsXApp, Trigger::kOnCondition, 3.0,
          Condition{kEnergyEfficiency, "<", ee_threshold, window_ms}};
}

/// Requests 50 dBm once the window holds at least one link failure.
inline XAppPolicy mro_conditional_policy(double window_ms = 5000.0)
{
  return {kMroXApp, Trigger::kOnCondition, 50.0, Condition{kLinkFailures, ">=", 1.0, window_ms}};
}

inline std::optional<ParameterRequest> policy_request(XAppPolicy const &policy, KpiView const &view,
                                                      TimeMs t)
{
  if (policy.trigger == Trigger::kOnCondition && !policy.condition->holds(view))
  {
    return std::nullopt;
  }
  return ParameterRequest{policy.xapp, kTxp, policy.request_value, t};
}

inline std::optional<ParameterRequest> es_request(XAppPolicy const &policy, KpiView const &view,
                                                  TimeMs t)
{
  return policy_request(policy, view, t);
}

inline std::optional<ParameterRequest> mro_request(XAppPolicy const &policy, KpiView const &view,
                                                   TimeMs t)
{
  return policy_request(policy, view, t);
}

/// ES owns energy efficiency, MRO owns link failures and handovers; both
/// write TXP. Link failures are the SLA-sensitive KPI: any failure in a tick
/// is a violation.
inline std::vector<XAppDescriptor> es_mro_descriptors()
{
  XAppDescriptor es;
  es.id       = kEsXApp;
  es.icps     = {kTxp};
  es.kpis     = {KpiSpec{kEnergyEfficiency, Direction::kMaximize, std::nullopt, false}};
  es.priority = 1;

  XAppDescriptor mro;
  mro.id       = kMroXApp;
  mro.icps     = {kTxp};
  mro.kpis     = {KpiSpec{kLinkFailures, Direction::kMinimize, 0.0, true},
                  KpiSpec{kTotalHandovers, Direction::kMinimize, std::nullopt, false}};
  mro.priority = 1;
  return {es, mro};
}

using KindMix = std::map<VerdictKind, double>;

inline KindMix uniform_kind_mix()
{
  return {{VerdictKind::kNoConflict, 0.25},
          {VerdictKind::kDirect, 0.25},
          {VerdictKind::kIndirect, 0.25},
          {VerdictKind::kImplicit, 0.25}};
}

/// (instructing xApp, parameter it writes, degraded KPI)
using EventTuple = std::tuple<XAppId, ParamId, KpiId>;

/// Event universe of a topology split by conflict kind. Built from the ICP
/// sets, the static direct-conflict list and the parameter groups.
inline std::map<VerdictKind, std::vector<EventTuple>> tuples_by_kind(ConflictTopology const &t)
{
  std::map<VerdictKind, std::vector<EventTuple>> out;
  for (auto kind : kAllVerdictKinds)
  {
    out[kind];
  }

  std::set<EventTuple> direct;
  for (auto const &c : direct_conflicts(t))
  {
    for (auto const &a : c.xapps)
    {
      for (auto const &b : c.xapps)
      {
        if (a == b)
        {
          continue;
        }
        for (auto const &p : c.params)
        {
          for (auto const &k : t.xapp(b).kpis)
          {
            direct.emplace(a, p, k.id);
          }
        }
      }
    }
  }

  for (auto const &[x, desc] : t.xapps())
  {
    for (auto const &p : t.icps(x))
    {
      for (auto const &k : t.all_kpis())
      {
        EventTuple tuple{x, p, k};
        auto const &owner = t.owner(k);
        if (owner == x)
        {
          out[VerdictKind::kNoConflict].push_back(tuple);
        }
        else if (direct.contains(tuple))
        {
          out[VerdictKind::kDirect].push_back(tuple);
        }
        else if (t.group(k).contains(p))
        {
          out[VerdictKind::kIndirect].push_back(tuple);
        }
        else
        {
          out[VerdictKind::kImplicit].push_back(tuple);
        }
      }
    }
  }
  return out;
}

/// Draws `n` labelled change/degradation pairs. Each event's change precedes
/// its degradation by less than half the attribution window and follows the
/// previous event's degradation.
inline std::vector<LabeledEvent> gen_stochastic_events(ConflictTopology const &t, std::size_t n,
                                                       KindMix const &mix, std::uint64_t seed,
                                                       double attribution_window_ms = Ledger::kDefaultWindowMs)
{
  double total = 0.0;
  for (auto const &[kind, p] : mix)
  {
    if (p < 0.0)
    {
      throw Error(ErrorCode::kInvalidArgument, "negative kind probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
  {
    throw Error(ErrorCode::kInvalidArgument, "kind mix does not sum to 1");
  }

  auto const buckets = tuples_by_kind(t);
  for (auto const &[kind, p] : mix)
  {
    if (p > 0.0 && buckets.at(kind).empty())
    {
      throw Error(ErrorCode::kNoConsistentTuple,
                  "topology admits no " + std::string(to_string(kind)) + " event");
    }
  }

  Rng                       rng(seed);
  std::vector<LabeledEvent> events;
  events.reserve(n);
  TimeMs clock = 0.0;
  for (std::size_t i = 0; i < n; ++i)
  {
    double      u    = rng.uniform();
    VerdictKind kind = VerdictKind::kImplicit;
    for (auto k : kAllVerdictKinds)
    {
      auto it = mix.find(k);
      if (it == mix.end() || it->second <= 0.0)
      {
        continue;
      }
      kind = k;
      if (u < it->second)
      {
        break;
      }
      u -= it->second;
    }

    auto const &bucket     = buckets.at(kind);
    auto const &[x, p, k]  = bucket[rng.index(bucket.size())];
    auto const &spec       = t.kpi(k);
    double const threshold = spec.sla_threshold.value_or(1.0);
    double const margin    = rng.uniform(0.01, 1.0) * std::max(1.0, std::abs(threshold));

    LabeledEvent e;
    e.truth                 = kind;
    e.change.t_clock        = clock + rng.uniform(1.0, 100.0);
    e.change.xapp           = x;
    e.change.param          = p;
    e.change.old_value      = rng.uniform(0.0, 50.0);
    e.change.new_value      = rng.uniform(0.0, 50.0);
    e.degradation.t_clock   = e.change.t_clock + rng.uniform(0.0, 0.5 * attribution_window_ms);
    e.degradation.kpi       = k;
    e.degradation.threshold = threshold;
    e.degradation.observed  = spec.direction == Direction::kMaximize ? threshold - margin
                                                                     : threshold + margin;
    clock = e.degradation.t_clock;
    events.push_back(std::move(e));
  }
  return events;
}

}  // namespace ric_cms

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

// Rule-based conflict detector. Parameter writes (recent control parameter
// log) and SLA violations (KPI degradation log) are kept in a Ledger; each
// degradation is attributed to the latest write inside the attribution window
// and classified by four first-match rules.

#include "ric_cms/common.hpp"
#include "ric_cms/conflict_model.hpp"
#include "ric_cms/stats.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace ric_cms {

struct ChangeRecord
{
  TimeMs  t_clock = 0.0;
  XAppId  xapp;
  ParamId param;
  double  old_value = 0.0;
  double  new_value = 0.0;

  bool operator==(ChangeRecord const &) const = default;
};

struct DegradationEvent
{
  TimeMs t_clock = 0.0;
  KpiId  kpi;
  double observed  = 0.0;
  double threshold = 0.0;

  bool operator==(DegradationEvent const &) const = default;
};

enum class VerdictKind
{
  kNoConflict,
  kDirect,
  kIndirect,
  kImplicit,
};

inline constexpr VerdictKind kAllVerdictKinds[] = {VerdictKind::kNoConflict, VerdictKind::kDirect,
                                                   VerdictKind::kIndirect, VerdictKind::kImplicit};

constexpr std::string_view to_string(VerdictKind k) noexcept
{
  switch (k)
  {
  case VerdictKind::kNoConflict:
    return "NO_CONFLICT";
  case VerdictKind::kDirect:
    return "DIRECT";
  case VerdictKind::kIndirect:
    return "INDIRECT";
  case VerdictKind::kImplicit:
    return "IMPLICIT";
  }
  return "UNKNOWN";
}

struct ConflictVerdict
{
  VerdictKind            kind = VerdictKind::kNoConflict;
  KpiId                  degraded_kpi;
  XAppId                 owner_xapp;
  std::optional<XAppId>  instructing_xapp;
  std::optional<ParamId> conflicting_param;
  TimeMs                 t_detect = 0.0;

  bool operator==(ConflictVerdict const &) const = default;
};

class Ledger
{
public:
  static constexpr double kDefaultWindowMs = 1000.0;

  explicit Ledger(double attribution_window_ms = kDefaultWindowMs)
    : window_ms_(attribution_window_ms)
  {
    if (!(attribution_window_ms > 0.0))
    {
      throw Error(ErrorCode::kInvalidArgument, "attribution window must be positive");
    }
  }

  double attribution_window_ms() const noexcept
  {
    return window_ms_;
  }
  std::vector<ChangeRecord> const &changes() const noexcept
  {
    return changes_;
  }
  std::vector<DegradationEvent> const &degradations() const noexcept
  {
    return degradations_;
  }

  void record_change(ConflictTopology const &t, ChangeRecord c)
  {
    if (c.t_clock < 0.0)
    {
      throw Error(ErrorCode::kInvalidArgument, "negative t_clock");
    }
    if (!t.has_param(c.param))
    {
      throw Error(ErrorCode::kUnknownId, "change of unknown parameter " + c.param.str());
    }
    if (!changes_.empty() && c.t_clock < changes_.back().t_clock)
    {
      throw Error(ErrorCode::kClockRegression, "change at t=" + std::to_string(c.t_clock) +
                                                   " precedes ledger tail");
    }
    changes_.push_back(std::move(c));
  }

  /// Only violations reach the detector; a KPI on the satisfied side of its
  /// threshold is rejected.
  void record_degradation(ConflictTopology const &t, DegradationEvent d)
  {
    auto const &spec = t.kpi(d.kpi);
    if (!violates(spec.direction, d.observed, d.threshold))
    {
      throw Error(ErrorCode::kNotAViolation,
                  "KPI " + d.kpi.str() + " observed on the satisfied side of its threshold");
    }
    if (d.t_clock < 0.0)
    {
      throw Error(ErrorCode::kInvalidArgument, "negative t_clock");
    }
    if (!degradations_.empty() && d.t_clock < degradations_.back().t_clock)
    {
      throw Error(ErrorCode::kClockRegression, "degradation at t=" + std::to_string(d.t_clock) +
                                                   " precedes ledger tail");
    }
    degradations_.push_back(std::move(d));
  }

  /// Latest change with t in [t_clock - window, t_clock]; on equal
  /// timestamps the later insertion wins.
  ChangeRecord const *attribute(TimeMs t_clock) const
  {
    auto it = std::upper_bound(
        changes_.begin(), changes_.end(), t_clock,
        [](TimeMs t, ChangeRecord const &c) { return t < c.t_clock; });
    if (it == changes_.begin())
    {
      return nullptr;
    }
    auto const &c = *std::prev(it);
    if (c.t_clock < t_clock - window_ms_)
    {
      return nullptr;
    }
    return &c;
  }

private:
  double                        window_ms_;
  std::vector<ChangeRecord>     changes_;
  std::vector<DegradationEvent> degradations_;
};

/// Classifies one degradation. Pure: neither the ledger nor the topology is
/// touched. Throws kUnattributable when no change falls in the window.
inline ConflictVerdict classify(ConflictTopology const &t, Ledger const &l,
                                DegradationEvent const &d)
{
  auto const *change = l.attribute(d.t_clock);
  if (change == nullptr)
  {
    throw Error(ErrorCode::kUnattributable,
                "no parameter change within the attribution window of KPI " + d.kpi.str());
  }

  ConflictVerdict v;
  v.degraded_kpi      = d.kpi;
  v.owner_xapp        = t.owner(d.kpi);
  v.instructing_xapp  = change->xapp;
  v.conflicting_param = change->param;
  v.t_detect          = d.t_clock;

  auto const &owner = v.owner_xapp;
  auto const &instr = change->xapp;
  auto const &p     = change->param;

  if (instr == owner)
  {
    v.kind = VerdictKind::kNoConflict;
  }
  else if (t.writes(owner, p) && t.writes(instr, p))
  {
    v.kind = VerdictKind::kDirect;
  }
  else if (t.group(d.kpi).contains(p))
  {
    v.kind = VerdictKind::kIndirect;
  }
  else
  {
    v.kind = VerdictKind::kImplicit;
  }
  return v;
}

/// As classify; an IMPLICIT verdict also promotes (param, kpi) into the
/// topology so the same pattern is INDIRECT from then on.
inline std::pair<ConflictVerdict, ConflictTopology> classify_and_learn(ConflictTopology const &t,
                                                                       Ledger const           &l,
                                                                       DegradationEvent const &d)
{
  auto verdict = classify(t, l, d);
  if (verdict.kind == VerdictKind::kImplicit)
  {
    return {verdict, promote_implicit(t, *verdict.conflicting_param, d.kpi)};
  }
  return {verdict, t};
}

/// A change/degradation pair with the kind the generator intended.
struct LabeledEvent
{
  ChangeRecord     change;
  DegradationEvent degradation;
  VerdictKind      truth = VerdictKind::kNoConflict;
};

struct KindStats
{
  std::size_t count     = 0;
  std::size_t correct   = 0;
  double      accuracy  = 0.0;
  double      mean_us   = 0.0;
  double      median_us = 0.0;
  double      p99_us    = 0.0;
};

struct LatencyStats
{
  /// Keyed by ground-truth kind; kinds absent from the stream are absent here.
  std::map<VerdictKind, KindStats> by_kind;
  /// Every per-event classify latency, in stream order.
  std::vector<double> latencies_us;

  double overall_median_us() const
  {
    return median(latencies_us);
  }
};

/// Replays a labelled stream through a fresh ledger and times classify()
/// alone; ledger ingestion is outside the measured span.
inline LatencyStats bench_detection(ConflictTopology const &t, std::span<LabeledEvent const> events,
                                    double attribution_window_ms = Ledger::kDefaultWindowMs)
{
  if (events.empty())
  {
    throw Error(ErrorCode::kEmptyInput, "empty event stream");
  }

  using Clock = std::chrono::steady_clock;
  Ledger                                   ledger(attribution_window_ms);
  std::map<VerdictKind, std::vector<double>> per_kind;
  LatencyStats                             out;
  out.latencies_us.reserve(events.size());

  for (auto const &e : events)
  {
    ledger.record_change(t, e.change);
    ledger.record_degradation(t, e.degradation);

    auto const start   = Clock::now();
    auto const verdict = classify(t, ledger, e.degradation);
    auto const stop    = Clock::now();

    double const us = std::chrono::duration<double, std::micro>(stop - start).count();
    out.latencies_us.push_back(us);
    per_kind[e.truth].push_back(us);
    auto &ks = out.by_kind[e.truth];
    ++ks.count;
    if (verdict.kind == e.truth)
    {
      ++ks.correct;
    }
  }

  for (auto &[kind, ks] : out.by_kind)
  {
    auto &lat    = per_kind[kind];
    ks.accuracy  = static_cast<double>(ks.correct) / static_cast<double>(ks.count);
    ks.mean_us   = mean(lat);
    std::sort(lat.begin(), lat.end());
    ks.median_us = quantile_sorted(lat, 0.5);
    ks.p99_us    = quantile_sorted(lat, 0.99);
  }
  return out;
}

inline LatencyStats bench_detection(ConflictTopology const &t, std::vector<LabeledEvent> const &events,
                                    double attribution_window_ms = Ledger::kDefaultWindowMs)
{
  return bench_detection(t, std::span<LabeledEvent const>(events), attribution_window_ms);
}

}  // namespace ric_cms

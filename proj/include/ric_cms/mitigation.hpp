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

#include "ric_cms/common.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ric_cms {

enum class Strategy
{
  kNc,
  kSbd,
  kPEs,
  kPMro,
  kQacm,
};

inline constexpr Strategy kAllStrategies[] = {Strategy::kNc, Strategy::kSbd, Strategy::kPEs,
                                              Strategy::kPMro, Strategy::kQacm};

constexpr std::string_view to_string(Strategy s) noexcept
{
  switch (s)
  {
  case Strategy::kNc:
    return "NC";
  case Strategy::kSbd:
    return "SBD";
  case Strategy::kPEs:
    return "P-ES";
  case Strategy::kPMro:
    return "P-MRO";
  case Strategy::kQacm:
    return "QACM";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view text)
{
  std::string s;
  for (char c : text)
  {
    s.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (auto st : kAllStrategies)
  {
    std::string name;
    for (char c : to_string(st))
    {
      name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (name == s)
    {
      return st;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown strategy: " + std::string(text));
}

struct Bounds
{
  double min = 0.0;
  double max = 0.0;

  bool contains(double v) const noexcept
  {
    return v >= min && v <= max;
  }
  double clamp(double v) const noexcept
  {
    return std::clamp(v, min, max);
  }
  bool operator==(Bounds const &) const = default;
};

struct ParameterRequest
{
  XAppId  xapp;
  ParamId param;
  double  value   = 0.0;
  TimeMs  t_clock = 0.0;

  bool operator==(ParameterRequest const &) const = default;
};

/// Piecewise-linear curve, clamped outside its first and last breakpoints.
class PiecewiseLinear
{
public:
  PiecewiseLinear() = default;
  explicit PiecewiseLinear(std::vector<std::pair<double, double>> points)
    : points_(std::move(points))
  {
    if (points_.size() < 2)
    {
      throw Error(ErrorCode::kInvalidArgument, "a response curve needs at least 2 breakpoints");
    }
    for (std::size_t i = 1; i < points_.size(); ++i)
    {
      if (!(points_[i].first > points_[i - 1].first))
      {
        throw Error(ErrorCode::kInvalidArgument, "curve breakpoints must strictly increase");
      }
    }
  }

  std::vector<std::pair<double, double>> const &points() const noexcept
  {
    return points_;
  }

  double operator()(double v) const
  {
    if (v <= points_.front().first)
    {
      return points_.front().second;
    }
    if (v >= points_.back().first)
    {
      return points_.back().second;
    }
    auto hi = std::upper_bound(points_.begin(), points_.end(), v,
                               [](double x, auto const &pt) { return x < pt.first; });
    auto lo = std::prev(hi);
    if (v == lo->first)
    {
      return lo->second;
    }
    double const f = (v - lo->first) / (hi->first - lo->first);
    return lo->second + f * (hi->second - lo->second);
  }

  bool operator==(PiecewiseLinear const &) const = default;

private:
  std::vector<std::pair<double, double>> points_;
};

struct KpiResponseModel
{
  KpiId           kpi;
  Direction       direction = Direction::kMaximize;
  double          threshold = 0.0;
  PiecewiseLinear curve;

  bool operator==(KpiResponseModel const &) const = default;
};

/// Contents of a response-model file: every model for one contested
/// parameter plus its search grid.
struct ResponseModelSet
{
  ParamId                       param;
  Bounds                        bounds;
  double                        grid_step = 1.0;
  std::vector<KpiResponseModel> models;

  bool operator==(ResponseModelSet const &) const = default;
};

struct MitigationDecision
{
  ParamId  param;
  double   value    = 0.0;
  Strategy strategy = Strategy::kNc;
  bool     satisfied_all = false;

  bool operator==(MitigationDecision const &) const = default;
};

struct MitigationContext
{
  /// SBD reset values.
  std::map<ParamId, double> defaults;
  /// Per priority strategy, the priority of each xApp (higher wins).
  std::map<Strategy, std::map<XAppId, unsigned>> priorities;
  std::map<ParamId, ResponseModelSet>            response_models;
  /// Requests and defaults are clamped into these when present.
  std::map<ParamId, Bounds> bounds;
};

/// Per-KPI satisfaction in [0, 1]: 1 once the prediction meets the QoS
/// mandate, otherwise the ratio that measures how close it comes.
inline double satisfaction(Direction direction, double predicted, double threshold)
{
  double ratio = 0.0;
  if (direction == Direction::kMaximize)
  {
    if (threshold == 0.0)
    {
      throw Error(ErrorCode::kInvalidArgument, "MAXIMIZE KPI with zero threshold");
    }
    ratio = predicted / threshold;
  }
  else
  {
    if (predicted == 0.0)
    {
      return threshold >= 0.0 ? 1.0 : 0.0;
    }
    ratio = threshold / predicted;
  }
  if (!(ratio > 0.0))
  {
    return 0.0;
  }
  return std::min(1.0, ratio);
}

/// Welfare = product of capped satisfactions, in model order.
inline double welfare(std::span<KpiResponseModel const> models, double v)
{
  double w = 1.0;
  for (auto const &m : models)
  {
    w *= satisfaction(m.direction, m.curve(v), m.threshold);
  }
  return w;
}

struct QacmResult
{
  double value         = 0.0;
  bool   satisfied_all = false;
  double welfare       = 0.0;
};

/// Exhaustive scan of {v_min, v_min + step, ...} up to v_max for the largest
/// welfare; the first (smallest) maximiser wins ties.
inline QacmResult qacm_optimize(std::span<ParameterRequest const> /*requests*/,
                                std::span<KpiResponseModel const> models, Bounds bounds,
                                double grid_step)
{
  if (models.empty())
  {
    throw Error(ErrorCode::kMissingContext, "QACM needs at least one KPI response model");
  }
  if (!(grid_step > 0.0))
  {
    throw Error(ErrorCode::kInvalidArgument, "grid step must be positive");
  }
  if (!(bounds.max >= bounds.min))
  {
    throw Error(ErrorCode::kEmptyInput, "empty QACM grid: bounds out of order");
  }
  for (auto const &m : models)
  {
    if (m.direction == Direction::kMaximize && m.threshold == 0.0)
    {
      throw Error(ErrorCode::kInvalidArgument,
                  "MAXIMIZE KPI " + m.kpi.str() + " with zero threshold");
    }
  }

  auto const n = static_cast<std::size_t>(std::floor((bounds.max - bounds.min) / grid_step + 1e-9));
  QacmResult best;
  best.welfare = -1.0;
  for (std::size_t i = 0; i <= n; ++i)
  {
    double const v = bounds.min + static_cast<double>(i) * grid_step;
    double const w = welfare(models, v);
    if (w > best.welfare)
    {
      best.welfare = w;
      best.value   = v;
    }
  }
  best.satisfied_all = std::all_of(models.begin(), models.end(), [&](KpiResponseModel const &m) {
    return satisfaction(m.direction, m.curve(best.value), m.threshold) == 1.0;
  });
  return best;
}

/// Resolves a batch of requests for one parameter.
inline MitigationDecision mitigate(std::span<ParameterRequest const> requests, Strategy strategy,
                                   MitigationContext const &ctx)
{
  if (requests.empty())
  {
    throw Error(ErrorCode::kEmptyInput, "no requests to mitigate");
  }
  auto const &param = requests.front().param;
  for (auto const &r : requests)
  {
    if (r.param != param)
    {
      throw Error(ErrorCode::kMixedParameters, "requests target different parameters");
    }
  }

  std::optional<Bounds> bounds;
  if (auto it = ctx.bounds.find(param); it != ctx.bounds.end())
  {
    bounds = it->second;
  }
  auto clamp = [&](double v) { return bounds ? bounds->clamp(v) : v; };

  MitigationDecision d;
  d.param    = param;
  d.strategy = strategy;

  switch (strategy)
  {
  case Strategy::kNc:
  {
    // Latest request wins; on equal timestamps the later list entry.
    auto const *latest = &requests.front();
    for (auto const &r : requests)
    {
      if (r.t_clock >= latest->t_clock)
      {
        latest = &r;
      }
    }
    d.value = clamp(latest->value);
    break;
  }
  case Strategy::kSbd:
  {
    auto it = ctx.defaults.find(param);
    if (it == ctx.defaults.end())
    {
      throw Error(ErrorCode::kMissingContext, "no default for parameter " + param.str());
    }
    d.value = clamp(it->second);
    break;
  }
  case Strategy::kPEs:
  case Strategy::kPMro:
  {
    auto it = ctx.priorities.find(strategy);
    if (it == ctx.priorities.end())
    {
      throw Error(ErrorCode::kMissingContext,
                  "no priorities configured for " + std::string(to_string(strategy)));
    }
    auto const priority_of = [&](XAppId const &x) -> long {
      auto p = it->second.find(x);
      return p == it->second.end() ? -1L : static_cast<long>(p->second);
    };
    auto const *winner = &requests.front();
    for (auto const &r : requests)
    {
      auto const pr = priority_of(r.xapp);
      auto const pw = priority_of(winner->xapp);
      if (pr > pw || (pr == pw && r.t_clock >= winner->t_clock))
      {
        winner = &r;
      }
    }
    d.value = clamp(winner->value);
    break;
  }
  case Strategy::kQacm:
  {
    auto it = ctx.response_models.find(param);
    if (it == ctx.response_models.end())
    {
      throw Error(ErrorCode::kMissingContext, "no response models for parameter " + param.str());
    }
    auto const &set = it->second;
    auto const  res = qacm_optimize(requests, set.models, set.bounds, set.grid_step);
    d.value         = clamp(res.value);
    d.satisfied_all = res.satisfied_all;
    break;
  }
  }
  return d;
}

inline MitigationDecision mitigate(std::vector<ParameterRequest> const &requests, Strategy strategy,
                                   MitigationContext const &ctx)
{
  return mitigate(std::span<ParameterRequest const>(requests), strategy, ctx);
}

}  // namespace ric_cms

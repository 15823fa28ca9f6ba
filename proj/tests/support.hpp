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

// Random instance generators and brute-force oracles shared by the unit and
// acceptance suites. The oracles deliberately avoid the library's own
// algorithms: they work from the raw descriptors with plain loops.

#include "ric_cms/conflict_model.hpp"
#include "ric_cms/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ric_cms::testing {

using Gen = std::mt19937_64;

inline int uniform_int(Gen &g, int lo, int hi)
{
  return std::uniform_int_distribution<int>(lo, hi)(g);
}

inline double uniform_real(Gen &g, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// Up to `max_x` xApps, `max_p` parameters, `max_k` KPIs. Every xApp owns at
/// least one KPI, so the xApp count never exceeds the KPI count.
inline std::vector<XAppDescriptor> random_descriptors(Gen &g, int max_x = 10, int max_p = 12, int max_k = 8)
{
  int const n_k = uniform_int(g, 1, max_k);
  int const n_x = uniform_int(g, 1, std::min(max_x, n_k));
  int const n_p = uniform_int(g, 1, max_p);

  std::vector<int> owner(static_cast<std::size_t>(n_k));
  for (int k = 0; k < n_k; ++k)
  {
    owner[static_cast<std::size_t>(k)] = k < n_x ? k : uniform_int(g, 0, n_x - 1);
  }
  std::shuffle(owner.begin(), owner.end(), g);

  std::vector<XAppDescriptor> out(static_cast<std::size_t>(n_x));
  for (int x = 0; x < n_x; ++x)
  {
    auto &d    = out[static_cast<std::size_t>(x)];
    d.id       = XAppId("x" + std::to_string(x));
    d.priority = static_cast<unsigned>(uniform_int(g, 0, 3));
    std::vector<int> params(static_cast<std::size_t>(n_p));
    for (int p = 0; p < n_p; ++p)
    {
      params[static_cast<std::size_t>(p)] = p;
    }
    std::shuffle(params.begin(), params.end(), g);
    params.resize(static_cast<std::size_t>(uniform_int(g, 1, std::min(n_p, 4))));
    for (int p : params)
    {
      d.icps.emplace_back("p" + std::to_string(p));
    }
  }
  for (int k = 0; k < n_k; ++k)
  {
    auto &d = out[static_cast<std::size_t>(owner[static_cast<std::size_t>(k)])];
    d.kpis.push_back(KpiSpec{KpiId("k" + std::to_string(k)),
                             uniform_int(g, 0, 1) ? Direction::kMaximize : Direction::kMinimize, 1.0, true});
  }
  return out;
}

/// P_k^G by brute force over (xApp, parameter, KPI) triples.
inline std::map<std::string, std::set<std::string>> oracle_groups(std::vector<XAppDescriptor> const &ds)
{
  std::set<std::string> params;
  std::set<std::string> kpis;
  for (auto const &d : ds)
  {
    for (auto const &p : d.icps)
    {
      params.insert(p.str());
    }
    for (auto const &k : d.kpis)
    {
      kpis.insert(k.id.str());
    }
  }
  std::map<std::string, std::set<std::string>> groups;
  for (auto const &k : kpis)
  {
    groups[k];
    for (auto const &p : params)
    {
      for (auto const &d : ds)
      {
        bool const writes = std::any_of(d.icps.begin(), d.icps.end(), [&](auto const &q) { return q.str() == p; });
        bool const owns = std::any_of(d.kpis.begin(), d.kpis.end(), [&](auto const &s) { return s.id.str() == k; });
        if (writes && owns)
        {
          groups[k].insert(p);
        }
      }
    }
  }
  return groups;
}

inline std::map<std::string, std::set<std::string>> groups_of(ConflictTopology const &t)
{
  std::map<std::string, std::set<std::string>> out;
  for (auto const &[k, ps] : t.param_groups())
  {
    auto &g = out[k.str()];
    for (auto const &p : ps)
    {
      g.insert(p.str());
    }
  }
  return out;
}

/// Unordered pairs with a non-empty ICP intersection, by nested scan.
inline std::set<std::pair<std::pair<std::string, std::string>, std::set<std::string>>>
oracle_direct(std::vector<XAppDescriptor> const &ds)
{
  std::set<std::pair<std::pair<std::string, std::string>, std::set<std::string>>> out;
  for (std::size_t i = 0; i < ds.size(); ++i)
  {
    for (std::size_t j = 0; j < ds.size(); ++j)
    {
      if (i == j)
      {
        continue;
      }
      std::set<std::string> shared;
      for (auto const &p : ds[i].icps)
      {
        for (auto const &q : ds[j].icps)
        {
          if (p == q)
          {
            shared.insert(p.str());
          }
        }
      }
      if (!shared.empty())
      {
        auto a = ds[i].id.str();
        auto b = ds[j].id.str();
        out.insert({{std::min(a, b), std::max(a, b)}, shared});
      }
    }
  }
  return out;
}

/// Random piecewise-linear model set over [0, 50].
inline std::vector<KpiResponseModel> random_models(Gen &g)
{
  int const                     n = uniform_int(g, 1, 4);
  std::vector<KpiResponseModel> models;
  for (int m = 0; m < n; ++m)
  {
    KpiResponseModel km;
    km.kpi       = KpiId("k" + std::to_string(m));
    km.direction = uniform_int(g, 0, 1) ? Direction::kMaximize : Direction::kMinimize;
    int const                              bps = uniform_int(g, 2, 6);
    std::set<double>                       xs{0.0, 50.0};
    while (static_cast<int>(xs.size()) < bps)
    {
      xs.insert(std::round(uniform_real(g, 0.0, 50.0) * 4.0) / 4.0);
    }
    std::vector<std::pair<double, double>> pts;
    for (double x : xs)
    {
      // Mostly integers so exact ties and exact threshold hits occur.
      double y = uniform_int(g, 0, 3) == 0 ? uniform_real(g, 0.0, 20.0) : uniform_int(g, 0, 20);
      pts.emplace_back(x, y);
    }
    km.curve     = PiecewiseLinear(std::move(pts));
    km.threshold = static_cast<double>(uniform_int(g, 1, 15));
    if (km.direction == Direction::kMinimize && uniform_int(g, 0, 4) == 0)
    {
      km.threshold = 0.0;
    }
    models.push_back(std::move(km));
  }
  return models;
}

/// Linear scan for the enclosing segment, then the usual two-point formula.
inline double oracle_interp(std::vector<std::pair<double, double>> const &pts, double v)
{
  if (v <= pts.front().first)
  {
    return pts.front().second;
  }
  if (v >= pts.back().first)
  {
    return pts.back().second;
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
  {
    auto const &[x0, y0] = pts[i];
    auto const &[x1, y1] = pts[i + 1];
    if (v == x0)
    {
      return y0;
    }
    if (v > x0 && v < x1)
    {
      double const f = (v - x0) / (x1 - x0);
      return y0 + f * (y1 - y0);
    }
  }
  return pts.back().second;
}

/// Independent grid scan: satisfaction written out from its definition,
/// welfare as a product, ties to the first grid point.
inline std::pair<double, double> oracle_qacm(std::vector<KpiResponseModel> const &models, double lo, double hi,
                                             double step)
{
  auto sat = [](KpiResponseModel const &m, double y) {
    double r;
    if (m.direction == Direction::kMaximize)
    {
      r = y / m.threshold;
    }
    else if (y == 0.0)
    {
      return m.threshold >= 0.0 ? 1.0 : 0.0;
    }
    else
    {
      r = m.threshold / y;
    }
    if (r <= 0.0)
    {
      return 0.0;
    }
    return r > 1.0 ? 1.0 : r;
  };
  double best_v = lo;
  double best_w = -1.0;
  for (int i = 0; lo + i * step <= hi + 1e-9; ++i)
  {
    double const v = lo + i * step;
    double       w = 1.0;
    for (auto const &m : models)
    {
      w *= sat(m, oracle_interp(m.curve.points(), v));
    }
    if (w > best_w)
    {
      best_w = w;
      best_v = v;
    }
  }
  return {best_v, best_w};
}

}  // namespace ric_cms::testing

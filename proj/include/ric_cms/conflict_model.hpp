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

// Conflict topology of the xApps hosted in one Near-RT-RIC: which control
// parameters every xApp writes (X-P graph), which parameters influence which
// KPIs (K-P graph) and the static direct/indirect conflicts that follow.

#include "ric_cms/common.hpp"

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ric_cms {

struct KpiSpec
{
  KpiId                 id;
  Direction             direction = Direction::kMaximize;
  std::optional<double> sla_threshold;
  bool                  sla_sensitive = false;

  bool operator==(KpiSpec const &) const = default;
};

struct XAppDescriptor
{
  XAppId               id;
  std::vector<ParamId> icps;
  std::vector<KpiSpec> kpis;
  unsigned             priority = 0;

  bool operator==(XAppDescriptor const &) const = default;

  void validate() const
  {
    if (id.empty())
    {
      throw Error(ErrorCode::kInvalidArgument, "xApp descriptor without id");
    }
    if (icps.empty())
    {
      throw Error(ErrorCode::kInvalidArgument, "xApp " + id.str() + " declares no ICPs");
    }
    if (kpis.empty())
    {
      throw Error(ErrorCode::kInvalidArgument, "xApp " + id.str() + " declares no KPIs");
    }
    std::set<ParamId> seen_params;
    for (auto const &p : icps)
    {
      if (!seen_params.insert(p).second)
      {
        throw Error(ErrorCode::kDuplicateId,
                    "xApp " + id.str() + " lists ICP " + p.str() + " twice");
      }
    }
    std::set<KpiId> seen_kpis;
    for (auto const &k : kpis)
    {
      if (!seen_kpis.insert(k.id).second)
      {
        throw Error(ErrorCode::kDuplicateId,
                    "xApp " + id.str() + " lists KPI " + k.id.str() + " twice");
      }
      if (k.sla_sensitive && !k.sla_threshold)
      {
        throw Error(ErrorCode::kInvalidArgument,
                    "SLA-sensitive KPI " + k.id.str() + " has no threshold");
      }
    }
  }
};

enum class StaticConflictKind
{
  kDirect,
  kIndirect,
};

struct StaticConflict
{
  StaticConflictKind   kind = StaticConflictKind::kDirect;
  std::set<XAppId>     xapps;
  std::set<ParamId>    params;
  std::optional<KpiId> kpi;

  auto operator<=>(StaticConflict const &) const = default;
};

/// Edge of the derived P-P graph: two parameters that influence at least one
/// common KPI, labelled with those KPIs.
struct ParamPairEdge
{
  ParamId         first;
  ParamId         second;
  std::set<KpiId> common_kpis;

  auto operator<=>(ParamPairEdge const &) const = default;
};

class ConflictTopology
{
public:
  using XAppMap   = std::map<XAppId, XAppDescriptor>;
  using ParamSet  = std::set<ParamId>;
  using KpiSet    = std::set<KpiId>;
  using XpEdgeSet = std::set<std::pair<XAppId, ParamId>>;
  using KpEdgeSet = std::set<std::pair<KpiId, ParamId>>;

  ConflictTopology() = default;

  XAppMap const &xapps() const noexcept
  {
    return xapps_;
  }
  ParamSet const &all_params() const noexcept
  {
    return all_params_;
  }
  KpiSet const &all_kpis() const noexcept
  {
    return all_kpis_;
  }
  std::map<ParamId, KpiSet> const &param_to_kpis() const noexcept
  {
    return param_to_kpis_;
  }
  std::map<KpiId, ParamSet> const &param_groups() const noexcept
  {
    return param_groups_;
  }
  XpEdgeSet const &xp_edges() const noexcept
  {
    return xp_edges_;
  }
  KpEdgeSet const &kp_edges() const noexcept
  {
    return kp_edges_;
  }

  bool has_xapp(XAppId const &x) const
  {
    return xapps_.contains(x);
  }
  bool has_param(ParamId const &p) const
  {
    return all_params_.contains(p);
  }
  bool has_kpi(KpiId const &k) const
  {
    return all_kpis_.contains(k);
  }

  XAppDescriptor const &xapp(XAppId const &x) const
  {
    auto it = xapps_.find(x);
    if (it == xapps_.end())
    {
      throw Error(ErrorCode::kUnknownId, "unknown xApp " + x.str());
    }
    return it->second;
  }

  /// I_x as an ordered set.
  ParamSet const &icps(XAppId const &x) const
  {
    auto it = icp_sets_.find(x);
    if (it == icp_sets_.end())
    {
      throw Error(ErrorCode::kUnknownId, "unknown xApp " + x.str());
    }
    return it->second;
  }

  bool writes(XAppId const &x, ParamId const &p) const
  {
    return xp_edges_.contains({x, p});
  }

  XAppId const &owner(KpiId const &k) const
  {
    auto it = kpi_owner_.find(k);
    if (it == kpi_owner_.end())
    {
      throw Error(ErrorCode::kUnknownId, "unknown KPI " + k.str());
    }
    return it->second;
  }

  KpiSpec const &kpi(KpiId const &k) const
  {
    auto const &desc = xapp(owner(k));
    auto it = std::find_if(desc.kpis.begin(), desc.kpis.end(),
                           [&](KpiSpec const &s) { return s.id == k; });
    return *it;
  }

  /// P_k^G. Empty for a KPI that no parameter influences.
  ParamSet const &group(KpiId const &k) const
  {
    static ParamSet const kEmpty;
    auto it = param_groups_.find(k);
    return it == param_groups_.end() ? kEmpty : it->second;
  }

  /// xApps whose ICP set contains `p`.
  std::set<XAppId> writers(ParamId const &p) const
  {
    std::set<XAppId> out;
    for (auto const &[x, p2] : xp_edges_)
    {
      if (p2 == p)
      {
        out.insert(x);
      }
    }
    return out;
  }

  bool operator==(ConflictTopology const &) const = default;

private:
  friend ConflictTopology build_topology(std::span<XAppDescriptor const>);
  friend ConflictTopology add_kp_edge(ConflictTopology, KpiId const &, ParamId const &);

  XAppMap                    xapps_;
  std::map<XAppId, ParamSet> icp_sets_;
  std::map<KpiId, XAppId>    kpi_owner_;
  ParamSet                   all_params_;
  KpiSet                     all_kpis_;
  std::map<ParamId, KpiSet>  param_to_kpis_;
  std::map<KpiId, ParamSet>  param_groups_;
  XpEdgeSet                  xp_edges_;
  KpEdgeSet                  kp_edges_;
};

/// Parameter grouping: every ICP of an xApp influences every KPI that xApp
/// owns; P_k^G is the inverse of that relation. Input order is irrelevant.
inline ConflictTopology build_topology(std::span<XAppDescriptor const> descriptors)
{
  ConflictTopology t;
  for (auto const &d : descriptors)
  {
    d.validate();
    if (!t.xapps_.emplace(d.id, d).second)
    {
      throw Error(ErrorCode::kDuplicateId, "duplicate xApp id " + d.id.str());
    }
    for (auto const &k : d.kpis)
    {
      auto [it, inserted] = t.kpi_owner_.emplace(k.id, d.id);
      if (!inserted)
      {
        throw Error(ErrorCode::kOwnershipConflict, "KPI " + k.id.str() + " owned by both " +
                                                       it->second.str() + " and " + d.id.str());
      }
    }
  }

  for (auto const &[x, d] : t.xapps_)
  {
    auto &icp_set = t.icp_sets_[x];
    for (auto const &p : d.icps)
    {
      icp_set.insert(p);
      t.all_params_.insert(p);
      t.xp_edges_.emplace(x, p);
      auto &kpis = t.param_to_kpis_[p];
      for (auto const &k : d.kpis)
      {
        kpis.insert(k.id);
      }
    }
    for (auto const &k : d.kpis)
    {
      t.all_kpis_.insert(k.id);
      t.param_groups_[k.id];
    }
  }

  for (auto const &[p, kpis] : t.param_to_kpis_)
  {
    for (auto const &k : kpis)
    {
      t.param_groups_[k].insert(p);
      t.kp_edges_.emplace(k, p);
    }
  }
  return t;
}

inline ConflictTopology build_topology(std::vector<XAppDescriptor> const &descriptors)
{
  return build_topology(std::span<XAppDescriptor const>(descriptors));
}

/// Adds one K-P edge. Shared by implicit promotion and declared extra edges.
inline ConflictTopology add_kp_edge(ConflictTopology t, KpiId const &k, ParamId const &p)
{
  if (!t.has_param(p))
  {
    throw Error(ErrorCode::kUnknownId, "unknown parameter " + p.str());
  }
  if (!t.has_kpi(k))
  {
    throw Error(ErrorCode::kUnknownId, "unknown KPI " + k.str());
  }
  if (t.param_groups_[k].contains(p))
  {
    throw Error(ErrorCode::kRedundantPromotion,
                "parameter " + p.str() + " already in the group of " + k.str());
  }
  t.param_groups_[k].insert(p);
  t.kp_edges_.emplace(k, p);
  t.param_to_kpis_[p].insert(k);
  return t;
}

/// Records that `p` was observed to influence `k` during operation; an
/// implicit conflict becomes an indirect one from here on.
inline ConflictTopology promote_implicit(ConflictTopology const &t, ParamId const &p,
                                         KpiId const &k)
{
  return add_kp_edge(t, k, p);
}

/// Applies K-P edges declared in a topology file on top of the grouping
/// output. Edges already produced by the grouping are skipped.
inline ConflictTopology with_declared_kp_edges(ConflictTopology t,
                                               std::vector<std::pair<KpiId, ParamId>> const &edges)
{
  for (auto const &[k, p] : edges)
  {
    if (t.has_kpi(k) && t.group(k).contains(p))
    {
      continue;
    }
    t = add_kp_edge(std::move(t), k, p);
  }
  return t;
}

/// One DIRECT entry per unordered xApp pair with intersecting ICP sets.
inline std::vector<StaticConflict> direct_conflicts(ConflictTopology const &t)
{
  std::vector<StaticConflict> out;
  auto const                 &xapps = t.xapps();
  for (auto i = xapps.begin(); i != xapps.end(); ++i)
  {
    auto const &a = t.icps(i->first);
    for (auto j = std::next(i); j != xapps.end(); ++j)
    {
      auto const       &b = t.icps(j->first);
      std::set<ParamId> shared;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::inserter(shared, shared.end()));
      if (!shared.empty())
      {
        out.push_back(StaticConflict{StaticConflictKind::kDirect,
                                     {i->first, j->first},
                                     std::move(shared),
                                     std::nullopt});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// A KPI whose parameter group holds a parameter its owner does not write is
/// in indirect conflict with every writer of that parameter. Entries with the
/// same (KPI, xApp set) are merged.
inline std::vector<StaticConflict> indirect_conflicts(ConflictTopology const &t)
{
  std::map<std::pair<KpiId, std::set<XAppId>>, std::set<ParamId>> merged;
  for (auto const &[k, group] : t.param_groups())
  {
    auto const &owner      = t.owner(k);
    auto const &owner_icps = t.icps(owner);
    for (auto const &p : group)
    {
      if (owner_icps.contains(p))
      {
        continue;
      }
      auto xapps = t.writers(p);
      xapps.insert(owner);
      merged[{k, std::move(xapps)}].insert(p);
    }
  }

  std::vector<StaticConflict> out;
  out.reserve(merged.size());
  for (auto &[key, params] : merged)
  {
    out.push_back(
        StaticConflict{StaticConflictKind::kIndirect, key.second, std::move(params), key.first});
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// P-P graph: parameter pairs sharing a KPI.
inline std::vector<ParamPairEdge> param_pair_edges(ConflictTopology const &t)
{
  std::vector<ParamPairEdge> out;
  auto const                &p2k = t.param_to_kpis();
  for (auto i = p2k.begin(); i != p2k.end(); ++i)
  {
    for (auto j = std::next(i); j != p2k.end(); ++j)
    {
      std::set<KpiId> common;
      std::set_intersection(i->second.begin(), i->second.end(), j->second.begin(),
                            j->second.end(), std::inserter(common, common.end()));
      if (!common.empty())
      {
        out.push_back(ParamPairEdge{i->first, j->first, std::move(common)});
      }
    }
  }
  return out;
}

/// The five-xApp reference configuration, including the declared (k41, p2)
/// and (k42, p2) edges that place p2 in the groups of x4's KPIs.
inline std::vector<XAppDescriptor> reference_descriptors()
{
  auto make = [](char const *id, std::vector<char const *> icps, std::vector<char const *> kpis,
                 unsigned priority) {
    XAppDescriptor d;
    d.id       = XAppId(id);
    d.priority = priority;
    for (auto p : icps)
    {
      d.icps.emplace_back(p);
    }
    for (auto k : kpis)
    {
      d.kpis.push_back(KpiSpec{KpiId(k), Direction::kMaximize, 1.0, true});
    }
    return d;
  };
  return {
      make("x1", {"p1", "p2"}, {"k1"}, 1),
      make("x2", {"p1", "p2", "p3"}, {"k2"}, 1),
      make("x3", {"p1", "p4"}, {"k3"}, 1),
      make("x4", {"p5", "p6"}, {"k41", "k42"}, 1),
      make("x5", {"p7", "p8"}, {"k5"}, 1),
  };
}

inline std::vector<std::pair<KpiId, ParamId>> reference_declared_edges()
{
  return {{KpiId("k41"), ParamId("p2")}, {KpiId("k42"), ParamId("p2")}};
}

inline ConflictTopology reference_topology()
{
  return with_declared_kp_edges(build_topology(reference_descriptors()), reference_declared_edges());
}

}  // namespace ric_cms

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

// File formats: topology, response-model, policy and scenario JSON; result,
// trace and graph CSV.

#include "ric_cms/conflict_model.hpp"
#include "ric_cms/harness.hpp"
#include "ric_cms/mitigation.hpp"
#include "ric_cms/ran_sim.hpp"
#include "ric_cms/xapps.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace ric_cms {

using Json = nlohmann::json;

namespace io_detail {

[[noreturn]] inline void bad(std::string const &what)
{
  throw Error(ErrorCode::kInvalidConfig, what);
}

inline Json const &require(Json const &j, char const *key)
{
  if (!j.is_object() || !j.contains(key))
  {
    bad(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

template <typename T>
T get(Json const &j, char const *key)
{
  try
  {
    return require(j, key).get<T>();
  }
  catch (nlohmann::json::exception const &e)
  {
    bad(std::string("field \"") + key + "\": " + e.what());
  }
}

inline void reject_unknown(Json const &j, std::set<std::string> const &known, std::string const &where)
{
  for (auto const &[k, v] : j.items())
  {
    if (!known.contains(k))
    {
      bad("unknown field \"" + k + "\" in " + where);
    }
  }
}

inline Bounds bounds_from(Json const &j)
{
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
  {
    bad("bounds must be [min, max]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

/// Shortest text that reads back to the same double.
inline std::string fmt_double(double v)
{
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision)
  {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v)
    {
      break;
    }
  }
  return buf;
}

/// Whole-string strtod; unlike std::stod it accepts subnormals.
inline double parse_double(std::string const &text)
{
  char        *end = nullptr;
  double const v   = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
  {
    throw std::invalid_argument("not a number: " + text);
  }
  return v;
}

template <typename E, std::size_t N>
E parse_enum(std::string_view text, E const (&all)[N], char const *what)
{
  for (auto e : all)
  {
    if (to_string(e) == text)
    {
      return e;
    }
  }
  bad(std::string("unknown ") + what + " \"" + std::string(text) + "\"");
}

inline constexpr MobilityClass kAllMobility[] = {MobilityClass::kWalking, MobilityClass::kCycling,
                                                 MobilityClass::kDriving};
inline constexpr ServiceType   kAllServices[] = {ServiceType::kEmbb, ServiceType::kUrllc,
                                                 ServiceType::kMmtc};

}  // namespace io_detail

inline Json read_json_file(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  try
  {
    return Json::parse(in);
  }
  catch (nlohmann::json::parse_error const &e)
  {
    throw Error(ErrorCode::kInvalidConfig, path.string() + ": " + e.what());
  }
}

inline void write_text_file(std::filesystem::path const &path, std::string const &text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
  {
    throw Error(ErrorCode::kIo, "cannot write " + path.string());
  }
}

// ---- topology --------------------------------------------------------------

struct TopologyFile
{
  std::vector<XAppDescriptor>            xapps;
  std::vector<std::pair<KpiId, ParamId>> extra_kp_edges;
};

inline TopologyFile topology_file_from_json(Json const &j)
{
  using namespace io_detail;
  reject_unknown(j, {"xapps", "extra_kp_edges"}, "topology");
  TopologyFile f;
  auto const  &xs = require(j, "xapps");
  if (!xs.is_array())
  {
    bad("\"xapps\" must be an array");
  }
  for (auto const &jx : xs)
  {
    reject_unknown(jx, {"id", "priority", "icps", "kpis"}, "xapp");
    XAppDescriptor d;
    d.id       = XAppId(get<std::string>(jx, "id"));
    d.priority = jx.contains("priority") ? get<unsigned>(jx, "priority") : 0u;
    for (auto const &p : get<std::vector<std::string>>(jx, "icps"))
    {
      d.icps.emplace_back(p);
    }
    for (auto const &jk : require(jx, "kpis"))
    {
      reject_unknown(jk, {"id", "direction", "sla_threshold", "sla_sensitive"}, "kpi");
      KpiSpec k;
      k.id        = KpiId(get<std::string>(jk, "id"));
      k.direction = parse_direction(get<std::string>(jk, "direction"));
      if (jk.contains("sla_threshold") && !jk.at("sla_threshold").is_null())
      {
        k.sla_threshold = get<double>(jk, "sla_threshold");
      }
      k.sla_sensitive = jk.contains("sla_sensitive") && get<bool>(jk, "sla_sensitive");
      d.kpis.push_back(std::move(k));
    }
    f.xapps.push_back(std::move(d));
  }
  if (j.contains("extra_kp_edges"))
  {
    for (auto const &e : j.at("extra_kp_edges"))
    {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      {
        bad("extra_kp_edges entries must be [kpi, param]");
      }
      f.extra_kp_edges.emplace_back(KpiId(e[0].get<std::string>()), ParamId(e[1].get<std::string>()));
    }
  }
  return f;
}

inline Json to_json(TopologyFile const &f)
{
  Json xs = Json::array();
  for (auto const &d : f.xapps)
  {
    Json kpis = Json::array();
    for (auto const &k : d.kpis)
    {
      Json jk = {{"id", k.id.str()}, {"direction", to_string(k.direction)}, {"sla_sensitive", k.sla_sensitive}};
      jk["sla_threshold"] = k.sla_threshold ? Json(*k.sla_threshold) : Json(nullptr);
      kpis.push_back(std::move(jk));
    }
    Json icps = Json::array();
    for (auto const &p : d.icps)
    {
      icps.push_back(p.str());
    }
    xs.push_back({{"id", d.id.str()}, {"priority", d.priority}, {"icps", icps}, {"kpis", kpis}});
  }
  Json edges = Json::array();
  for (auto const &[k, p] : f.extra_kp_edges)
  {
    edges.push_back({k.str(), p.str()});
  }
  return {{"xapps", xs}, {"extra_kp_edges", edges}};
}

inline ConflictTopology topology_from_file(TopologyFile const &f)
{
  return with_declared_kp_edges(build_topology(f.xapps), f.extra_kp_edges);
}

inline ConflictTopology load_topology(std::filesystem::path const &path)
{
  return topology_from_file(topology_file_from_json(read_json_file(path)));
}

/// X-P, K-P and P-P edge lists as CSV text.
struct GraphCsv
{
  std::string xp;
  std::string kp;
  std::string pp;
};

inline GraphCsv graph_csv(ConflictTopology const &t)
{
  GraphCsv g;
  g.xp = "xapp,param\n";
  for (auto const &[x, p] : t.xp_edges())
  {
    g.xp += x.str() + "," + p.str() + "\n";
  }
  g.kp = "kpi,param\n";
  for (auto const &[k, p] : t.kp_edges())
  {
    g.kp += k.str() + "," + p.str() + "\n";
  }
  g.pp = "param_a,param_b,common_kpis\n";
  for (auto const &e : param_pair_edges(t))
  {
    std::string ks;
    for (auto const &k : e.common_kpis)
    {
      ks += (ks.empty() ? "" : ";") + k.str();
    }
    g.pp += e.first.str() + "," + e.second.str() + "," + ks + "\n";
  }
  return g;
}

inline void write_graph_csvs(ConflictTopology const &t, std::filesystem::path const &dir)
{
  std::filesystem::create_directories(dir);
  auto const g = graph_csv(t);
  write_text_file(dir / "xp_edges.csv", g.xp);
  write_text_file(dir / "kp_edges.csv", g.kp);
  write_text_file(dir / "pp_edges.csv", g.pp);
}

// ---- response models -------------------------------------------------------

inline ResponseModelSet response_models_from_json(Json const &j)
{
  using namespace io_detail;
  reject_unknown(j, {"param", "bounds", "grid_step", "models", "metadata"}, "response-model file");
  ResponseModelSet s;
  s.param     = ParamId(get<std::string>(j, "param"));
  s.bounds    = bounds_from(require(j, "bounds"));
  s.grid_step = get<double>(j, "grid_step");
  for (auto const &jm : require(j, "models"))
  {
    reject_unknown(jm, {"kpi", "direction", "threshold", "curve"}, "model");
    KpiResponseModel m;
    m.kpi       = KpiId(get<std::string>(jm, "kpi"));
    m.direction = parse_direction(get<std::string>(jm, "direction"));
    m.threshold = get<double>(jm, "threshold");
    m.curve     = PiecewiseLinear(get<std::vector<std::pair<double, double>>>(jm, "curve"));
    s.models.push_back(std::move(m));
  }
  if (s.models.empty())
  {
    bad("response-model file has no models");
  }
  return s;
}

inline Json to_json(ResponseModelSet const &s)
{
  Json models = Json::array();
  for (auto const &m : s.models)
  {
    Json curve = Json::array();
    for (auto const &[v, y] : m.curve.points())
    {
      curve.push_back({v, y});
    }
    models.push_back({{"kpi", m.kpi.str()},
                      {"direction", to_string(m.direction)},
                      {"threshold", m.threshold},
                      {"curve", curve}});
  }
  return {{"param", s.param.str()},
          {"bounds", {s.bounds.min, s.bounds.max}},
          {"grid_step", s.grid_step},
          {"models", models}};
}

inline ResponseModelSet load_response_models(std::filesystem::path const &path)
{
  return response_models_from_json(read_json_file(path));
}

// ---- policies --------------------------------------------------------------

inline XAppPolicy policy_from_json(Json const &j)
{
  using namespace io_detail;
  reject_unknown(j, {"xapp", "trigger", "request_value", "condition"}, "policy");
  XAppPolicy p;
  p.xapp = XAppId(get<std::string>(j, "xapp"));
  auto const trigger = get<std::string>(j, "trigger");
  if (trigger == "ALWAYS")
  {
    p.trigger = Trigger::kAlways;
  }
  else if (trigger == "ON_CONDITION")
  {
    p.trigger = Trigger::kOnCondition;
  }
  else
  {
    bad("unknown trigger \"" + trigger + "\"");
  }
  p.request_value = get<double>(j, "request_value");
  if (j.contains("condition") && !j.at("condition").is_null())
  {
    auto const &jc = j.at("condition");
    reject_unknown(jc, {"kpi", "op", "value", "window_ms"}, "condition");
    Condition c;
    c.kpi   = KpiId(get<std::string>(jc, "kpi"));
    c.op    = get<std::string>(jc, "op");
    c.value = get<double>(jc, "value");
    if (jc.contains("window_ms"))
    {
      c.window_ms = get<double>(jc, "window_ms");
    }
    if (c.op != "<" && c.op != "<=" && c.op != ">" && c.op != ">=")
    {
      bad("unknown condition operator \"" + c.op + "\"");
    }
    p.condition = c;
  }
  return p;
}

inline Json to_json(XAppPolicy const &p)
{
  Json j = {{"xapp", p.xapp.str()},
            {"trigger", p.trigger == Trigger::kAlways ? "ALWAYS" : "ON_CONDITION"},
            {"request_value", p.request_value}};
  if (p.condition)
  {
    j["condition"] = {{"kpi", p.condition->kpi.str()},
                      {"op", p.condition->op},
                      {"value", p.condition->value},
                      {"window_ms", p.condition->window_ms}};
  }
  return j;
}

// ---- scenario --------------------------------------------------------------

/// Fields present in `j` override `base`; unknown fields are an error.
inline SimConfig sim_config_from_json(Json const &j, SimConfig base = {})
{
  using namespace io_detail;
  if (!j.is_object())
  {
    bad("scenario config must be an object");
  }
  static std::set<std::string> const known = {
      "n_gnbs", "n_ues", "area_width_m", "area_height_m", "carrier_freq_hz", "step_ms",
      "duration_min", "rsrp_min_dbm", "ho_threshold_dbm", "txp_default_dbm", "txp_bounds_dbm",
      "cio_db", "hys_db", "ttt_ms", "ret_deg", "adjust_interval_ms", "pingpong_window_ms",
      "mobility_mix", "service_mix", "pl0_db", "pathloss_exponent", "ret_opt_deg",
      "ret_att_db_per_deg", "noise_floor_dbm", "ue_bandwidth_hz", "p_fixed_w", "amplifier_factor"};
  reject_unknown(j, known, "scenario config");

  auto num = [&](char const *key, double &field) {
    if (j.contains(key))
    {
      field = get<double>(j, key);
    }
  };
  auto count = [&](char const *key, std::size_t &field) {
    if (j.contains(key))
    {
      field = get<std::size_t>(j, key);
    }
  };
  SimConfig c = std::move(base);
  count("n_gnbs", c.n_gnbs);
  count("n_ues", c.n_ues);
  num("area_width_m", c.area_width_m);
  num("area_height_m", c.area_height_m);
  num("carrier_freq_hz", c.carrier_freq_hz);
  num("step_ms", c.step_ms);
  num("duration_min", c.duration_min);
  num("rsrp_min_dbm", c.rsrp_min_dbm);
  if (j.contains("ho_threshold_dbm"))
  {
    auto const &v = j.at("ho_threshold_dbm");
    c.ho_threshold_dbm = v.is_null() ? std::nullopt : std::optional<double>(get<double>(j, "ho_threshold_dbm"));
  }
  num("txp_default_dbm", c.txp_default_dbm);
  if (j.contains("txp_bounds_dbm"))
  {
    c.txp_bounds_dbm = bounds_from(j.at("txp_bounds_dbm"));
  }
  num("cio_db", c.cio_db);
  num("hys_db", c.hys_db);
  num("ttt_ms", c.ttt_ms);
  num("ret_deg", c.ret_deg);
  num("adjust_interval_ms", c.adjust_interval_ms);
  num("pingpong_window_ms", c.pingpong_window_ms);
  if (j.contains("mobility_mix"))
  {
    c.mobility_mix.clear();
    for (auto const &m : j.at("mobility_mix"))
    {
      reject_unknown(m, {"class", "share", "min_speed_mps", "max_speed_mps"}, "mobility_mix");
      c.mobility_mix.push_back({parse_enum(get<std::string>(m, "class"), kAllMobility, "mobility class"),
                                get<double>(m, "share"), get<double>(m, "min_speed_mps"),
                                get<double>(m, "max_speed_mps")});
    }
  }
  if (j.contains("service_mix"))
  {
    c.service_mix.clear();
    for (auto const &s : j.at("service_mix"))
    {
      reject_unknown(s, {"service", "share", "bandwidth_weight"}, "service_mix");
      c.service_mix.push_back({parse_enum(get<std::string>(s, "service"), kAllServices, "service type"),
                               get<double>(s, "share"),
                               s.contains("bandwidth_weight") ? get<double>(s, "bandwidth_weight") : 1.0});
    }
  }
  num("pl0_db", c.pl0_db);
  num("pathloss_exponent", c.pathloss_exponent);
  num("ret_opt_deg", c.ret_opt_deg);
  num("ret_att_db_per_deg", c.ret_att_db_per_deg);
  num("noise_floor_dbm", c.noise_floor_dbm);
  num("ue_bandwidth_hz", c.ue_bandwidth_hz);
  num("p_fixed_w", c.p_fixed_w);
  num("amplifier_factor", c.amplifier_factor);
  c.validate();
  return c;
}

inline Json to_json(SimConfig const &c)
{
  Json mob = Json::array();
  for (auto const &m : c.mobility_mix)
  {
    mob.push_back({{"class", to_string(m.mobility_class)},
                   {"share", m.share},
                   {"min_speed_mps", m.min_speed_mps},
                   {"max_speed_mps", m.max_speed_mps}});
  }
  Json svc = Json::array();
  for (auto const &s : c.service_mix)
  {
    svc.push_back({{"service", to_string(s.service)}, {"share", s.share}, {"bandwidth_weight", s.bandwidth_weight}});
  }
  return {{"n_gnbs", c.n_gnbs},
          {"n_ues", c.n_ues},
          {"area_width_m", c.area_width_m},
          {"area_height_m", c.area_height_m},
          {"carrier_freq_hz", c.carrier_freq_hz},
          {"step_ms", c.step_ms},
          {"duration_min", c.duration_min},
          {"rsrp_min_dbm", c.rsrp_min_dbm},
          {"ho_threshold_dbm", c.ho_threshold_dbm ? Json(*c.ho_threshold_dbm) : Json(nullptr)},
          {"txp_default_dbm", c.txp_default_dbm},
          {"txp_bounds_dbm", {c.txp_bounds_dbm.min, c.txp_bounds_dbm.max}},
          {"cio_db", c.cio_db},
          {"hys_db", c.hys_db},
          {"ttt_ms", c.ttt_ms},
          {"ret_deg", c.ret_deg},
          {"adjust_interval_ms", c.adjust_interval_ms},
          {"pingpong_window_ms", c.pingpong_window_ms},
          {"mobility_mix", mob},
          {"service_mix", svc},
          {"pl0_db", c.pl0_db},
          {"pathloss_exponent", c.pathloss_exponent},
          {"ret_opt_deg", c.ret_opt_deg},
          {"ret_att_db_per_deg", c.ret_att_db_per_deg},
          {"noise_floor_dbm", c.noise_floor_dbm},
          {"ue_bandwidth_hz", c.ue_bandwidth_hz},
          {"p_fixed_w", c.p_fixed_w},
          {"amplifier_factor", c.amplifier_factor}};
}

// ---- results ---------------------------------------------------------------

inline constexpr char const *kResultsHeader =
    "strategy,rep,seed,energy_efficiency_bits_per_joule,link_failures,total_handovers,pingpong_handovers";

inline std::string results_csv(ExperimentResult const &r)
{
  std::string out = std::string(kResultsHeader) + "\n";
  for (auto const &rec : r.records)
  {
    out += std::string(to_string(rec.strategy)) + "," + std::to_string(rec.rep) + "," +
           std::to_string(rec.seed) + "," + io_detail::fmt_double(rec.report.energy_efficiency_bits_per_joule) +
           "," + std::to_string(rec.report.link_failures) + "," + std::to_string(rec.report.total_handovers) +
           "," + std::to_string(rec.report.pingpong_handovers) + "\n";
  }
  return out;
}

inline ExperimentResult parse_results_csv(std::string const &text)
{
  std::istringstream in(text);
  std::string        line;
  if (!std::getline(in, line) || line != kResultsHeader)
  {
    throw Error(ErrorCode::kInvalidConfig, "results CSV header mismatch");
  }
  ExperimentResult r;
  std::size_t      lineno = 1;
  while (std::getline(in, line))
  {
    ++lineno;
    if (line.empty())
    {
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream        ss(line);
    for (std::string cell; std::getline(ss, cell, ',');)
    {
      cells.push_back(cell);
    }
    if (cells.size() != 7)
    {
      throw Error(ErrorCode::kInvalidConfig, "results CSV line " + std::to_string(lineno) + ": expected 7 cells");
    }
    try
    {
      ReplicaRecord rec;
      rec.strategy                               = parse_strategy(cells[0]);
      rec.rep                                    = std::stoull(cells[1]);
      rec.seed                                   = std::stoull(cells[2]);
      rec.report.energy_efficiency_bits_per_joule = io_detail::parse_double(cells[3]);
      rec.report.link_failures                   = std::stoull(cells[4]);
      rec.report.total_handovers                 = std::stoull(cells[5]);
      rec.report.pingpong_handovers              = std::stoull(cells[6]);
      r.records.push_back(rec);
    }
    catch (std::logic_error const &)
    {
      throw Error(ErrorCode::kInvalidConfig, "results CSV line " + std::to_string(lineno) + ": bad number");
    }
  }
  return r;
}

inline Json to_json(BoxPlotStats const &stats)
{
  Json j = Json::object();
  for (auto const &[strategy, by_kpi] : stats)
  {
    Json s = Json::object();
    for (auto const &[kpi, b] : by_kpi)
    {
      s[kpi] = {{"min", b.min}, {"q1", b.q1}, {"median", b.median}, {"q3", b.q3},
                {"max", b.max}, {"mean", b.mean}, {"n", b.n}};
    }
    j[std::string(to_string(strategy))] = std::move(s);
  }
  return j;
}

inline Json to_json(DetectionTally const &d)
{
  Json verdicts = Json::object();
  for (auto k : kAllVerdictKinds)
  {
    auto it = d.verdicts.find(k);
    verdicts[std::string(to_string(k))] = it == d.verdicts.end() ? 0 : it->second;
  }
  return {{"verdicts", verdicts},
          {"unattributed", d.unattributed},
          {"conflicts", d.conflicts},
          {"mitigations", d.mitigations}};
}

inline std::string trace_csv(std::vector<TraceRow> const &rows)
{
  std::string out = "t_ms,ue_id,serving_gnb,rsrp_dbm,event\n";
  for (auto const &r : rows)
  {
    out += io_detail::fmt_double(r.t_ms) + "," + std::to_string(r.ue_id) + "," +
           (r.serving_gnb ? std::to_string(*r.serving_gnb) : std::string()) + "," +
           io_detail::fmt_double(r.rsrp_dbm) + "," + std::string(to_string(r.event)) + "\n";
  }
  return out;
}

inline std::string to_text(Json const &j)
{
  return j.dump(2) + "\n";
}

}  // namespace ric_cms

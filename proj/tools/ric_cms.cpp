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

#include "ric_cms/conflict_model.hpp"
#include "ric_cms/detection.hpp"
#include "ric_cms/harness.hpp"
#include "ric_cms/io.hpp"
#include "ric_cms/xapps.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ric_cms;

namespace {

std::string quoted(std::string const &s)
{
  return Json(s).dump();
}

int fail(ErrorCode code, std::string const &message)
{
  std::cerr << "error: code=" << to_string(code) << " message=" << quoted(message) << "\n";
  return 1;
}

// ---- topology ----------------------------------------------------------------

struct TopologyArgs
{
  std::string input;
  std::string emit_graphs;
};

Json topology_report(ConflictTopology const &t)
{
  Json groups = Json::object();
  for (auto const &[k, ps] : t.param_groups())
  {
    Json arr = Json::array();
    for (auto const &p : ps)
    {
      arr.push_back(p.str());
    }
    groups[k.str()] = arr;
  }
  auto conflicts = [](std::vector<StaticConflict> const &cs) {
    Json out = Json::array();
    for (auto const &c : cs)
    {
      Json xs = Json::array();
      for (auto const &x : c.xapps)
      {
        xs.push_back(x.str());
      }
      Json ps = Json::array();
      for (auto const &p : c.params)
      {
        ps.push_back(p.str());
      }
      Json j = {{"xapps", xs}, {"params", ps}};
      if (c.kpi)
      {
        j["kpi"] = c.kpi->str();
      }
      out.push_back(std::move(j));
    }
    return out;
  };
  return {{"param_groups", groups},
          {"direct_conflicts", conflicts(direct_conflicts(t))},
          {"indirect_conflicts", conflicts(indirect_conflicts(t))}};
}

int run_topology(TopologyArgs const &a)
{
  auto const t = load_topology(a.input);
  if (!a.emit_graphs.empty())
  {
    write_graph_csvs(t, a.emit_graphs);
  }
  std::cout << to_text(topology_report(t));
  return 0;
}

// ---- detect-bench --------------------------------------------------------------

struct DetectArgs
{
  std::string   topology = "reference";
  std::size_t   events   = 10'000;
  std::uint64_t seed     = 1;
  double        window   = Ledger::kDefaultWindowMs;
  std::string   out;
};

int run_detect(DetectArgs const &a)
{
  auto const t      = a.topology == "reference" ? reference_topology() : load_topology(a.topology);
  auto const events = gen_stochastic_events(t, a.events, uniform_kind_mix(), a.seed, a.window);
  auto const stats  = bench_detection(t, events, a.window);

  Json j = Json::object();
  for (auto const &[kind, ks] : stats.by_kind)
  {
    j[std::string(to_string(kind))] = {{"count", ks.count},
                                       {"accuracy", ks.accuracy},
                                       {"mean_us", ks.mean_us},
                                       {"median_us", ks.median_us},
                                       {"p99_us", ks.p99_us}};
  }
  auto const text = to_text(j);
  if (a.out.empty())
  {
    std::cout << text;
  }
  else
  {
    write_text_file(a.out, text);
  }
  return 0;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs
{
  std::string                config;
  std::string                strategies = "nc,sbd,p-es,p-mro,qacm";
  std::optional<std::size_t> reps;
  std::uint64_t              seed   = 1;
  std::string                preset = "desk";
  std::string                out    = "results";
  std::string                qacm_models;
  std::vector<std::string>   policies;
  std::size_t                calibration_seeds = 20;
  unsigned                   threads           = 0;
  std::optional<std::size_t> trace_rep;
};

std::vector<Strategy> parse_strategy_list(std::string const &text)
{
  std::vector<Strategy> out;
  std::stringstream     ss(text);
  for (std::string item; std::getline(ss, item, ',');)
  {
    auto const s = parse_strategy(item);
    if (std::find(out.begin(), out.end(), s) != out.end())
    {
      throw Error(ErrorCode::kInvalidArgument, "strategy listed twice: " + item);
    }
    out.push_back(s);
  }
  if (out.empty())
  {
    throw Error(ErrorCode::kInvalidArgument, "no strategies given");
  }
  return out;
}

int run_simulate(SimulateArgs const &a)
{
  ExperimentConfig cfg;
  if (a.preset == "desk")
  {
    cfg = desk_preset();
  }
  else if (a.preset == "paper")
  {
    cfg = paper_preset();
  }
  else
  {
    throw Error(ErrorCode::kInvalidArgument, "unknown preset " + a.preset);
  }
  if (!a.config.empty())
  {
    cfg.sim = sim_config_from_json(read_json_file(a.config), cfg.sim);
  }
  if (a.reps)
  {
    cfg.reps = *a.reps;
  }
  cfg.base_seed  = a.seed;
  cfg.strategies = parse_strategy_list(a.strategies);
  cfg.threads    = a.threads;
  for (auto const &path : a.policies)
  {
    auto const p = policy_from_json(read_json_file(path));
    if (p.xapp == kEsXApp)
    {
      cfg.es = p;
    }
    else if (p.xapp == kMroXApp)
    {
      cfg.mro = p;
    }
    else
    {
      throw Error(ErrorCode::kUnknownId, "policy for unknown xApp " + p.xapp.str());
    }
  }

  bool const   wants_qacm = std::find(cfg.strategies.begin(), cfg.strategies.end(), Strategy::kQacm) !=
                            cfg.strategies.end();
  Json         qacm_meta  = nullptr;
  ExperimentRun run;
  std::optional<ResponseModelSet> models;
  if (wants_qacm && a.qacm_models.empty())
  {
    auto derived = run_experiment_deriving_qacm(cfg, a.calibration_seeds);
    run          = std::move(derived.run);
    models       = derived.models;
    qacm_meta    = {{"source", "derived"},
                    {"threshold_rule", "median of the owning xApp's priority baseline"},
                    {"calibration_seeds", a.calibration_seeds},
                    {"thresholds",
                     {{"energy_efficiency", derived.thresholds.energy_efficiency},
                      {"link_failures", derived.thresholds.link_failures},
                      {"total_handovers", derived.thresholds.total_handovers}}}};
  }
  else
  {
    if (!a.qacm_models.empty())
    {
      models    = load_response_models(a.qacm_models);
      cfg.qacm  = models;
      qacm_meta = {{"source", "file"}, {"path", a.qacm_models}};
    }
    run = run_experiment(cfg);
  }

  fs::create_directories(a.out);
  write_text_file(fs::path(a.out) / "results.csv", results_csv(run.result));

  Json detection = Json::object();
  for (auto const &[s, d] : run.detection)
  {
    detection[std::string(to_string(s))] = to_json(d);
  }
  Json strategies = Json::array();
  for (auto s : cfg.strategies)
  {
    strategies.push_back(to_string(s));
  }
  Json summary = {{"preset", a.preset},
                  {"reps", cfg.reps},
                  {"base_seed", cfg.base_seed},
                  {"strategies", strategies},
                  {"sim", to_json(cfg.sim)},
                  {"policies", {to_json(cfg.es), to_json(cfg.mro)}},
                  {"box_stats", to_json(summarize(run.result))},
                  {"detection", detection},
                  {"qacm", qacm_meta}};
  write_text_file(fs::path(a.out) / "summary.json", to_text(summary));
  if (models)
  {
    auto j = to_json(*models);
    if (qacm_meta.is_object())
    {
      j["metadata"] = qacm_meta;
    }
    write_text_file(fs::path(a.out) / "qacm_models.json", to_text(j));
  }

  if (a.trace_rep)
  {
    if (*a.trace_rep >= cfg.reps)
    {
      throw Error(ErrorCode::kInvalidArgument, "trace replica outside 0..reps-1");
    }
    if (models)
    {
      cfg.qacm = models;
    }
    for (auto s : cfg.strategies)
    {
      auto const o    = run_replica(cfg, s, *a.trace_rep, true);
      auto const name = "trace_" + std::string(to_string(s)) + "_" + std::to_string(*a.trace_rep) + ".csv";
      write_text_file(fs::path(a.out) / name, trace_csv(o.trace));
    }
  }

  std::cout << to_text(summary["box_stats"]);
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"xApp conflict management: topology analysis, detection benchmark, mitigation experiments"};
  app.require_subcommand(1);

  TopologyArgs topo;
  auto        *cmd_topo = app.add_subcommand("topology", "Build the conflict model of a topology file");
  cmd_topo->add_option("--input", topo.input, "Topology JSON")->required()->check(CLI::ExistingFile);
  cmd_topo->add_option("--emit-graphs", topo.emit_graphs, "Directory for X-P, K-P and P-P edge CSVs");

  DetectArgs det;
  auto      *cmd_det = app.add_subcommand("detect-bench", "Classify a labelled stochastic event stream");
  cmd_det->add_option("--topology", det.topology, "Topology JSON, or reference")->capture_default_str();
  cmd_det->add_option("--events", det.events, "Number of events")->capture_default_str()->check(CLI::PositiveNumber);
  cmd_det->add_option("--seed", det.seed, "RNG seed")->capture_default_str();
  cmd_det->add_option("--window-ms", det.window, "Attribution window")->capture_default_str();
  cmd_det->add_option("--out", det.out, "Output stats JSON (stdout when omitted)");

  SimulateArgs sim;
  auto        *cmd_sim = app.add_subcommand("simulate", "Run the TXP mitigation experiment");
  cmd_sim->add_option("--config", sim.config, "Scenario JSON overriding the preset's simulator fields")
      ->check(CLI::ExistingFile);
  cmd_sim->add_option("--strategies", sim.strategies, "Comma-separated subset of nc,sbd,p-es,p-mro,qacm")
      ->capture_default_str();
  cmd_sim->add_option("--reps", sim.reps, "Replicas per strategy (overrides the preset)");
  cmd_sim->add_option("--seed", sim.seed, "Base seed; replica r uses seed + r")->capture_default_str();
  cmd_sim->add_option("--preset", sim.preset, "desk (50 x 2 min) or paper (500 x 10 min)")
      ->capture_default_str()
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd_sim->add_option("--out", sim.out, "Output directory")->capture_default_str();
  cmd_sim->add_option("--qacm-models", sim.qacm_models, "Response-model JSON; derived when omitted")
      ->check(CLI::ExistingFile);
  cmd_sim->add_option("--policy", sim.policies, "xApp policy JSON (repeatable)")->check(CLI::ExistingFile);
  cmd_sim->add_option("--calibration-seeds", sim.calibration_seeds, "Worlds per TXP value when deriving models")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd_sim->add_option("--threads", sim.threads, "Worker threads, 0 = all cores")->capture_default_str();
  cmd_sim->add_option("--trace-rep", sim.trace_rep, "Also write per-strategy event traces of this replica");

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const &e)
  {
    if (e.get_exit_code() == 0)
    {
      return app.exit(e);
    }
    std::cerr << "error: code=invalid_argument message=" << quoted(e.what()) << "\n";
    return 2;
  }

  try
  {
    if (*cmd_topo)
    {
      return run_topology(topo);
    }
    if (*cmd_det)
    {
      return run_detect(det);
    }
    return run_simulate(sim);
  }
  catch (Error const &e)
  {
    return fail(e.code(), e.what());
  }
  catch (fs::filesystem_error const &e)
  {
    return fail(ErrorCode::kIo, e.what());
  }
  catch (std::exception const &e)
  {
    return fail(ErrorCode::kInvalidArgument, e.what());
  }
}

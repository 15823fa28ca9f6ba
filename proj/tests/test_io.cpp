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

#include "ric_cms/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <limits>

using namespace ric_cms;

namespace {

std::filesystem::path data_dir()
{
  char const *d = std::getenv("RIC_CMS_TEST_DATA");
  return d ? std::filesystem::path(d) : std::filesystem::path("tests/data");
}

ErrorCode code_of(auto &&fn)
{
  try
  {
    fn();
  }
  catch (Error const &e)
  {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(TopologyIo, ReferenceFileMatchesBuiltIn)
{
  auto const t    = load_topology(data_dir() / "reference_topology.json");
  auto const want = reference_topology();
  EXPECT_EQ(t.param_groups(), want.param_groups());
  EXPECT_EQ(t.xp_edges(), want.xp_edges());
  EXPECT_EQ(t.kp_edges(), want.kp_edges());
  EXPECT_EQ(direct_conflicts(t), direct_conflicts(want));
  EXPECT_EQ(indirect_conflicts(t), indirect_conflicts(want));
}

TEST(TopologyIo, RoundTrip)
{
  TopologyFile f{reference_descriptors(), reference_declared_edges()};
  auto const   back = topology_file_from_json(Json::parse(to_text(to_json(f))));
  EXPECT_EQ(to_json(back), to_json(f));
  EXPECT_EQ(topology_from_file(back).param_groups(), reference_topology().param_groups());
}

TEST(TopologyIo, UnknownFieldsRejected)
{
  auto j      = to_json(TopologyFile{reference_descriptors(), {}});
  j["colour"] = "blue";
  EXPECT_EQ(code_of([&] { topology_file_from_json(j); }), ErrorCode::kInvalidConfig);
  auto k                       = to_json(TopologyFile{reference_descriptors(), {}});
  k["xapps"][0]["kpis"][0]["w"] = 1;
  EXPECT_EQ(code_of([&] { topology_file_from_json(k); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([] { topology_file_from_json(Json::object()); }), ErrorCode::kInvalidConfig);
}

TEST(TopologyIo, MissingFileIsIoError)
{
  EXPECT_EQ(code_of([] { load_topology("/nonexistent/topology.json"); }), ErrorCode::kIo);
}

TEST(GraphCsv, ReferenceEdges)
{
  auto const g = graph_csv(reference_topology());
  EXPECT_EQ(g.xp.rfind("xapp,param\n", 0), 0u);
  EXPECT_NE(g.xp.find("x2,p3\n"), std::string::npos);
  EXPECT_EQ(g.kp.rfind("kpi,param\n", 0), 0u);
  EXPECT_NE(g.kp.find("k41,p2\n"), std::string::npos);
  EXPECT_NE(g.kp.find("k42,p2\n"), std::string::npos);
  EXPECT_EQ(g.pp.rfind("param_a,param_b,common_kpis\n", 0), 0u);
  EXPECT_NE(g.pp.find("p1,p2,k1;k2\n"), std::string::npos);
  // 11 X-P edges plus the header.
  EXPECT_EQ(std::count(g.xp.begin(), g.xp.end(), '\n'), 12);
}

TEST(ResponseModelsIo, RoundTrip)
{
  ResponseModelSet s;
  s.param     = kTxp;
  s.bounds    = {0, 50};
  s.grid_step = 1.0;
  s.models    = {{kEnergyEfficiency, Direction::kMaximize, 2.5, PiecewiseLinear({{0, 1}, {50, 3.25}})},
                 {kLinkFailures, Direction::kMinimize, 0.0, PiecewiseLinear({{0, 9}, {20, 0.1}, {50, 0}})}};
  auto j        = to_json(s);
  j["metadata"] = {{"source", "test"}};
  EXPECT_EQ(response_models_from_json(Json::parse(to_text(j))), s);
  j["extra"] = 1;
  EXPECT_EQ(code_of([&] { response_models_from_json(j); }), ErrorCode::kInvalidConfig);
}

TEST(PolicyIo, FileAndRoundTrip)
{
  auto const p = policy_from_json(read_json_file(data_dir() / "es_conditional_policy.json"));
  EXPECT_EQ(p, es_conditional_policy(1.0e6));
  EXPECT_EQ(policy_from_json(to_json(p)), p);
  EXPECT_EQ(policy_from_json(to_json(mro_always_policy())), mro_always_policy());

  auto bad       = to_json(p);
  bad["trigger"] = "SOMETIMES";
  EXPECT_EQ(code_of([&] { policy_from_json(bad); }), ErrorCode::kInvalidConfig);
  auto op                = to_json(p);
  op["condition"]["op"] = "!=";
  EXPECT_EQ(code_of([&] { policy_from_json(op); }), ErrorCode::kInvalidConfig);
}

TEST(SimConfigIo, OverridesAndRoundTrip)
{
  auto const c = sim_config_from_json(read_json_file(data_dir() / "short_scenario.json"));
  EXPECT_EQ(c.duration_min, 0.1);
  EXPECT_EQ(c.n_ues, 40u);
  EXPECT_EQ(c.n_gnbs, SimConfig{}.n_gnbs);
  EXPECT_EQ(sim_config_from_json(to_json(c)), c);
  EXPECT_EQ(sim_config_from_json(Json::parse(to_text(to_json(SimConfig{})))), SimConfig{});
}

TEST(SimConfigIo, Errors)
{
  EXPECT_EQ(code_of([] { sim_config_from_json(Json{{"nope", 1}}); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([] { sim_config_from_json(Json{{"n_gnbs", 0}}); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([] { sim_config_from_json(Json::array()); }), ErrorCode::kInvalidConfig);
}

TEST(ResultsCsv, RoundTripIsExact)
{
  ExperimentResult r;
  r.records = {{Strategy::kNc, 0, 1, {312384.80000000005, 11605, 32, 0}},
               {Strategy::kQacm, 7, 8, {1.0 / 3.0, 0, 0, 0}},
               {Strategy::kPMro, 2, 3, {std::numeric_limits<double>::denorm_min(), 1, 2, 3}}};
  auto const text = results_csv(r);
  EXPECT_EQ(text.substr(0, text.find('\n')), kResultsHeader);
  EXPECT_EQ(parse_results_csv(text), r);
  EXPECT_EQ(results_csv(parse_results_csv(text)), text);
}

TEST(ResultsCsv, Malformed)
{
  EXPECT_EQ(code_of([] { parse_results_csv("a,b\n"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([] { parse_results_csv(std::string(kResultsHeader) + "\nNC,0,1,2\n"); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([] { parse_results_csv(std::string(kResultsHeader) + "\nNC,x,1,2,3,4,5\n"); }),
            ErrorCode::kInvalidConfig);
}

TEST(TraceCsv, HeaderAndRows)
{
  SimConfig c;
  c.duration_min = 0.01;
  auto s         = init_sim(c, 3);
  s.trace_enabled = true;
  step(s);
  auto const text = trace_csv(s.trace);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t_ms,ue_id,serving_gnb,rsrp_dbm,event");
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), s.trace.size() + 1);
}

TEST(SummaryJson, DetectionTallyListsEveryKind)
{
  DetectionTally d;
  d.verdicts[VerdictKind::kDirect] = 4;
  auto const j = to_json(d);
  EXPECT_EQ(j["verdicts"]["DIRECT"], 4);
  EXPECT_EQ(j["verdicts"]["IMPLICIT"], 0);
  EXPECT_EQ(j["verdicts"].size(), 4u);
}

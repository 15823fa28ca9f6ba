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

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.
//
//   acceptance [--cli <path to ric-cms>] [--work <scratch dir>] [--only N]

#include "support.hpp"

#include "ric_cms/harness.hpp"
#include "ric_cms/io.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace ric_cms;
namespace fs = std::filesystem;

namespace {

using Clock    = std::chrono::steady_clock;
using ParamSet = ConflictTopology::ParamSet;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome
{
  bool        pass = false;
  std::string detail;
};

std::string fmt(char const *f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1 ---------------------------------------------------------------------

Outcome reference_golden()
{
  auto const t0 = Clock::now();
  auto const t  = build_topology(reference_descriptors());

  std::map<KpiId, ParamSet> const groups{
      {KpiId("k1"), {ParamId("p1"), ParamId("p2")}},
      {KpiId("k2"), {ParamId("p1"), ParamId("p2"), ParamId("p3")}},
      {KpiId("k3"), {ParamId("p1"), ParamId("p4")}},
      {KpiId("k41"), {ParamId("p5"), ParamId("p6")}},
      {KpiId("k42"), {ParamId("p5"), ParamId("p6")}},
      {KpiId("k5"), {ParamId("p7"), ParamId("p8")}},
  };
  std::set<std::pair<std::set<XAppId>, ParamSet>> direct;
  for (auto const &c : direct_conflicts(t))
  {
    direct.emplace(c.xapps, c.params);
  }
  std::set<std::pair<std::set<XAppId>, ParamSet>> const want{
      {{XAppId("x1"), XAppId("x2")}, {ParamId("p1"), ParamId("p2")}},
      {{XAppId("x1"), XAppId("x3")}, {ParamId("p1")}},
      {{XAppId("x2"), XAppId("x3")}, {ParamId("p1")}},
  };
  double const s = seconds_since(t0);
  bool const   ok = t.param_groups() == groups && direct == want && direct_conflicts(t).size() == 3;
  return {ok && s < 1.0, fmt("groups %s, direct pairs %zu/3, %.4f s", t.param_groups() == groups ? "exact" : "differ",
                            direct.size(), s)};
}

// ---- 2 and 3 ----------------------------------------------------------------

LatencyStats const &detection_run(double *elapsed = nullptr)
{
  static double       secs = 0.0;
  static LatencyStats stats = [] {
    auto const t0     = Clock::now();
    auto const t      = reference_topology();
    auto const events = gen_stochastic_events(t, 10'000, uniform_kind_mix(), 1);
    auto       out    = bench_detection(t, events);
    secs              = seconds_since(t0);
    return out;
  }();
  if (elapsed)
  {
    *elapsed = secs;
  }
  return stats;
}

Outcome detection_accuracy()
{
  double     secs  = 0.0;
  auto const &st   = detection_run(&secs);
  bool        ok   = st.by_kind.size() == 4;
  std::string kinds;
  std::size_t total = 0;
  for (auto const &[k, ks] : st.by_kind)
  {
    ok = ok && ks.correct == ks.count;
    total += ks.count;
    kinds += fmt(" %s=%zu/%zu", std::string(to_string(k)).c_str(), ks.correct, ks.count);
  }
  ok = ok && total == 10'000;
  return {ok && secs < 10.0, fmt("%zu events,%s, %.2f s", total, kinds.c_str(), secs)};
}

Outcome detection_latency()
{
  double const med = detection_run().overall_median_us();
  return {med <= 1000.0, fmt("median classify latency %.3f us (limit 1000 us)", med)};
}

// ---- 4 ---------------------------------------------------------------------

Outcome grouping_oracle()
{
  auto const         t0 = Clock::now();
  testing::Gen       g(2026);
  int                matches = 0;
  for (int i = 0; i < 100; ++i)
  {
    auto const ds = testing::random_descriptors(g, 10, 12, 8);
    if (testing::groups_of(build_topology(ds)) == testing::oracle_groups(ds))
    {
      ++matches;
    }
  }
  double const s = seconds_since(t0);
  return {matches == 100 && s < 5.0, fmt("%d/100 topologies match, %.3f s", matches, s)};
}

// ---- 5 ---------------------------------------------------------------------

Outcome qacm_oracle()
{
  testing::Gen g(4242);
  int          matches  = 0;
  int          feasible = 0;
  int          feasible_ok = 0;
  for (int i = 0; i < 1000; ++i)
  {
    auto const models = testing::random_models(g);
    auto const r      = qacm_optimize({}, models, {0.0, 50.0}, 1.0);
    auto const [v, w] = testing::oracle_qacm(models, 0.0, 50.0, 1.0);
    if (r.value == v && std::abs(r.welfare - w) <= 1e-12)
    {
      ++matches;
    }
    if (w == 1.0)
    {
      ++feasible;
      if (r.satisfied_all && r.welfare == 1.0)
      {
        ++feasible_ok;
      }
    }
  }
  return {matches == 1000 && feasible_ok == feasible && feasible > 0,
          fmt("%d/1000 argmax match, feasibility preferred on %d/%d", matches, feasible_ok, feasible)};
}

// ---- 6 ---------------------------------------------------------------------

Outcome mitigation_ordering()
{
  auto const t0  = Clock::now();
  auto const run = run_experiment_deriving_qacm(desk_preset());
  auto const st  = summarize(run.run.result);
  double const s = seconds_since(t0);

  auto med = [&](Strategy k, char const *col) { return st.at(k).at(col).median; };
  char const *ee = "energy_efficiency_bits_per_joule";
  char const *lf = "link_failures";
  char const *ho = "total_handovers";
  using enum Strategy;

  bool const a = med(kQacm, ee) > med(kPEs, ee) && med(kQacm, ee) > med(kNc, ee) && med(kQacm, ee) > med(kSbd, ee) &&
                 med(kQacm, ee) > med(kPMro, ee);
  bool b = med(kQacm, lf) <= med(kPMro, lf);
  bool c = med(kQacm, ho) <= med(kPMro, ho);
  for (auto other : {kNc, kSbd, kPEs})
  {
    b = b && med(kQacm, lf) < med(other, lf) && med(kPMro, lf) < med(other, lf);
    c = c && med(kPMro, ho) < med(other, ho);
  }
  bool const d = med(kQacm, lf) <= 0.9 * med(kNc, lf) && med(kQacm, ho) < med(kNc, ho);

  std::string detail = fmt("a=%s b=%s c=%s d=%s, %.1f s;", a ? "ok" : "NO", b ? "ok" : "NO", c ? "ok" : "NO",
                           d ? "ok" : "NO", s);
  for (auto k : {kNc, kSbd, kPEs, kPMro, kQacm})
  {
    detail += fmt(" %s[EE %.4g LF %.4g HO %.4g]", std::string(to_string(k)).c_str(), med(k, ee), med(k, lf),
                  med(k, ho));
  }
  return {a && b && c && d && s < 600.0, detail};
}

// ---- 7 ---------------------------------------------------------------------

std::string slurp(fs::path const &p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(std::string const &cli, fs::path const &work)
{
  if (cli.empty())
  {
    return {false, "no --cli given"};
  }
  fs::create_directories(work);
  auto run_once = [&](char const *name, char const *threads) {
    fs::path const out = work / name;
    fs::remove_all(out);
    std::string const cmd = "\"" + cli + "\" simulate --preset desk --reps 4 --seed 7 --strategies nc,sbd,p-es,p-mro,qacm" +
                            " --calibration-seeds 3 --threads " + threads + " --trace-rep 0 --out \"" + out.string() +
                            "\" > \"" + (out.string() + ".stdout") + "\"";
    return std::system(cmd.c_str()) == 0;
  };
  if (!run_once("run_a", "1") || !run_once("run_b", "0"))
  {
    return {false, "simulate exited nonzero"};
  }
  std::size_t compared  = 0;
  std::size_t identical = 0;
  for (auto const &e : fs::directory_iterator(work / "run_a"))
  {
    auto const ext = e.path().extension();
    if (ext != ".csv" && ext != ".json")
    {
      continue;
    }
    ++compared;
    auto const other = work / "run_b" / e.path().filename();
    if (fs::exists(other) && slurp(e.path()) == slurp(other))
    {
      ++identical;
    }
  }
  std::size_t const in_b = static_cast<std::size_t>(
      std::distance(fs::directory_iterator(work / "run_b"), fs::directory_iterator{}));
  bool const ok = compared >= 3 && identical == compared && in_b == compared;
  return {ok, fmt("%zu/%zu output files byte-identical across two runs", identical, compared)};
}

// ---- 8 ---------------------------------------------------------------------

Outcome implicit_learning()
{
  auto       t = reference_topology();
  Ledger     l;
  std::string seq;
  int        implicit = 0;
  int        indirect = 0;
  for (int i = 0; i < 20; ++i)
  {
    double const base = 2000.0 * i;
    l.record_change(t, {base, XAppId("x1"), ParamId("p1"), 0.0, 1.0});
    DegradationEvent const d{base + 10.0, KpiId("k5"), 0.0, 1.0};
    l.record_degradation(t, d);
    auto [verdict, next] = classify_and_learn(t, l, d);
    t                    = std::move(next);
    implicit += verdict.kind == VerdictKind::kImplicit;
    indirect += verdict.kind == VerdictKind::kIndirect;
    if (i == 0 && verdict.kind != VerdictKind::kImplicit)
    {
      return {false, "first verdict was " + std::string(to_string(verdict.kind))};
    }
  }
  return {implicit == 1 && indirect == 19, fmt("IMPLICIT x%d then INDIRECT x%d over 20 events", implicit, indirect)};
}

}  // namespace

int main(int argc, char **argv)
{
  std::string cli;
  fs::path    work = fs::temp_directory_path() / "ric_cms_acceptance";
  int         only = 0;
  for (int i = 1; i + 1 < argc; i += 2)
  {
    std::string const k = argv[i];
    if (k == "--cli")
    {
      cli = argv[i + 1];
    }
    else if (k == "--work")
    {
      work = argv[i + 1];
    }
    else if (k == "--only")
    {
      only = std::atoi(argv[i + 1]);
    }
  }

  std::vector<std::pair<char const *, std::function<Outcome()>>> const criteria{
      {"taxonomy golden", reference_golden},
      {"detection accuracy", detection_accuracy},
      {"detection latency", detection_latency},
      {"grouping oracle", grouping_oracle},
      {"qacm argmax oracle", qacm_oracle},
      {"mitigation ordering", mitigation_ordering},
      {"determinism", [&] { return determinism(cli, work); }},
      {"implicit learning", implicit_learning},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i)
  {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1)
    {
      continue;
    }
    Outcome o;
    try
    {
      o = criteria[i].second();
    }
    catch (std::exception const &e)
    {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}

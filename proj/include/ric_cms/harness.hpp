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

// Experiment orchestration: seeded replicas per strategy wiring the xApps,
// the detector and the mitigator into the RAN simulator, plus QACM model
// calibration and box-plot aggregation.

#include "ric_cms/common.hpp"
#include "ric_cms/conflict_model.hpp"
#include "ric_cms/detection.hpp"
#include "ric_cms/mitigation.hpp"
#include "ric_cms/ran_sim.hpp"
#include "ric_cms/stats.hpp"
#include "ric_cms/xapps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace ric_cms {

struct ExperimentConfig
{
  SimConfig             sim;
  std::vector<Strategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::size_t           reps      = 500;
  std::uint64_t         base_seed = 1;
  std::optional<ResponseModelSet> qacm;
  XAppPolicy                      es  = es_always_policy();
  XAppPolicy                      mro = mro_always_policy();
  /// Offset of the MRO request inside each adjustment interval.
  double mro_offset_ms = 100.0;
  /// How long the conflict manager collects requests on a contested
  /// parameter before resolving them.
  double collect_window_ms = 100.0;
  double attribution_window_ms = Ledger::kDefaultWindowMs;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;

  /// `require_models` = false when the QACM models are derived later.
  void validate(bool require_models = true) const
  {
    sim.validate();
    if (reps == 0)
    {
      throw Error(ErrorCode::kInvalidConfig, "reps must be at least 1");
    }
    if (strategies.empty())
    {
      throw Error(ErrorCode::kInvalidConfig, "no strategies selected");
    }
    es.validate(sim.txp_bounds_dbm);
    mro.validate(sim.txp_bounds_dbm);
    if (!(mro_offset_ms >= 0.0 && mro_offset_ms < sim.adjust_interval_ms))
    {
      throw Error(ErrorCode::kInvalidConfig, "MRO offset must lie inside the adjustment interval");
    }
    if (std::find(strategies.begin(), strategies.end(), Strategy::kQacm) != strategies.end() && require_models &&
        !qacm)
    {
      throw Error(ErrorCode::kMissingContext, "QACM selected without response models");
    }
  }
};

/// Desk preset: 50 replicas of 2 simulated minutes. Paper preset: 500 of 10.
inline ExperimentConfig desk_preset()
{
  ExperimentConfig cfg;
  cfg.reps             = 50;
  cfg.sim.duration_min = 2.0;
  return cfg;
}

inline ExperimentConfig paper_preset()
{
  ExperimentConfig cfg;
  cfg.reps             = 500;
  cfg.sim.duration_min = 10.0;
  return cfg;
}

struct ReplicaRecord
{
  Strategy      strategy = Strategy::kNc;
  std::size_t   rep      = 0;
  std::uint64_t seed     = 0;
  KpiReport     report;

  bool operator==(ReplicaRecord const &) const = default;
};

struct ExperimentResult
{
  std::vector<ReplicaRecord> records;

  bool operator==(ExperimentResult const &) const = default;
};

/// Detector output over one replica.
struct DetectionTally
{
  std::map<VerdictKind, std::uint64_t> verdicts;
  std::uint64_t unattributed   = 0;
  std::uint64_t conflicts      = 0;  ///< request batches with >1 writer
  std::uint64_t mitigations    = 0;  ///< values written by the strategy

  DetectionTally &operator+=(DetectionTally const &o)
  {
    for (auto const &[k, n] : o.verdicts)
    {
      verdicts[k] += n;
    }
    unattributed += o.unattributed;
    conflicts += o.conflicts;
    mitigations += o.mitigations;
    return *this;
  }
};

struct ReplicaOutcome
{
  ReplicaRecord        record;
  DetectionTally       detection;
  std::vector<double>  txp_after_interval;  ///< TXP at the end of every interval
  std::vector<TraceRow> trace;
};

struct ExperimentRun
{
  ExperimentResult                   result;
  std::map<Strategy, DetectionTally> detection;
};

inline MitigationContext mitigation_context(ExperimentConfig const &cfg)
{
  MitigationContext ctx;
  ctx.defaults[kTxp] = cfg.sim.txp_default_dbm;
  ctx.bounds[kTxp]   = cfg.sim.txp_bounds_dbm;
  ctx.priorities[Strategy::kPEs]  = {{kEsXApp, 2}, {kMroXApp, 1}};
  ctx.priorities[Strategy::kPMro] = {{kEsXApp, 1}, {kMroXApp, 2}};
  if (cfg.qacm)
  {
    ctx.response_models[cfg.qacm->param] = *cfg.qacm;
  }
  return ctx;
}

namespace detail {

/// Trailing-window KPI accumulator fed once per tick.
class KpiWindow
{
public:
  explicit KpiWindow(double window_ms)
    : window_ms_(window_ms)
  {}

  void push(TimeMs t, StepDelta const &d)
  {
    ticks_.push_back({t, d});
    while (!ticks_.empty() && ticks_.front().t <= t - window_ms_)
    {
      ticks_.pop_front();
    }
  }

  KpiView view() const
  {
    KpiView v;
    v.window_ms = window_ms_;
    double bits = 0.0;
    double joules = 0.0;
    for (auto const &e : ticks_)
    {
      v.link_failures += e.d.link_failures;
      v.handovers += e.d.handovers;
      bits += e.d.bits;
      joules += e.d.joules;
    }
    v.energy_efficiency = joules > 0.0 ? bits / joules : 0.0;
    return v;
  }

private:
  struct Entry
  {
    TimeMs    t;
    StepDelta d;
  };
  double            window_ms_;
  std::deque<Entry> ticks_;
};

/// Near-RT-RIC side of the loop: takes xApp requests, writes the parameter
/// (directly, or through the mitigation strategy once a contested batch
/// closes), and keeps the detector's ledger.
class ConflictManager
{
public:
  ConflictManager(ConflictTopology topology, Strategy strategy, MitigationContext ctx,
                  double attribution_window_ms, double collect_window_ms)
    : topology_(std::move(topology))
    , strategy_(strategy)
    , ctx_(std::move(ctx))
    , ledger_(attribution_window_ms)
    , collect_window_ms_(collect_window_ms)
  {
    for (auto const &c : direct_conflicts(topology_))
    {
      contested_.insert(c.params.begin(), c.params.end());
    }
  }

  void submit(ParameterRequest const &req, SimState &s)
  {
    auto &batch = batches_[req.param];
    if (batch.requests.empty())
    {
      batch.opened = req.t_clock;
    }
    batch.requests.push_back(req);

    if (strategy_ == Strategy::kNc || !contested_.contains(req.param))
    {
      // No arbitration: the request is written as it arrives.
      if (distinct_writers(batch) > 1)
      {
        ++tally_.conflicts;
      }
      write(req.xapp, req.param, req.value, req.t_clock, s);
    }
  }

  /// Resolves held batches whose collection window has elapsed at `t`.
  void flush(TimeMs t, SimState &s)
  {
    for (auto &[param, batch] : batches_)
    {
      if (batch.requests.empty() || t < batch.opened + collect_window_ms_)
      {
        continue;
      }
      if (strategy_ != Strategy::kNc && contested_.contains(param))
      {
        if (distinct_writers(batch) > 1)
        {
          ++tally_.conflicts;
          auto const decision = mitigate(batch.requests, strategy_, ctx_);
          ++tally_.mitigations;
          write(instructing_xapp(batch, decision.value), param, decision.value, t, s);
        }
        else
        {
          auto const &r = batch.requests.back();
          write(r.xapp, param, r.value, t, s);
        }
      }
      batch.requests.clear();
    }
  }

  /// SLA check on the last tick; every violation goes to the detector.
  void observe(SimState const &s)
  {
    for (auto const &[x, desc] : topology_.xapps())
    {
      for (auto const &k : desc.kpis)
      {
        if (!k.sla_sensitive || k.id != kLinkFailures)
        {
          continue;
        }
        double const observed = static_cast<double>(s.last_step.link_failures);
        if (!violates(k.direction, observed, *k.sla_threshold))
        {
          continue;
        }
        DegradationEvent d{s.t_ms, k.id, observed, *k.sla_threshold};
        ledger_.record_degradation(topology_, d);
        try
        {
          auto const verdict = classify(topology_, ledger_, d);
          ++tally_.verdicts[verdict.kind];
        }
        catch (Error const &e)
        {
          if (e.code() != ErrorCode::kUnattributable)
          {
            throw;
          }
          ++tally_.unattributed;
        }
      }
    }
  }

  DetectionTally const &tally() const noexcept
  {
    return tally_;
  }
  Ledger const &ledger() const noexcept
  {
    return ledger_;
  }

private:
  struct Batch
  {
    TimeMs                        opened = 0.0;
    std::vector<ParameterRequest> requests;
  };

  static std::size_t distinct_writers(Batch const &b)
  {
    std::set<XAppId> xs;
    for (auto const &r : b.requests)
    {
      xs.insert(r.xapp);
    }
    return xs.size();
  }

  /// The write is logged under the latest request asking for the value that
  /// was applied, or under the latest request when none did.
  static XAppId instructing_xapp(Batch const &b, double value)
  {
    for (auto it = b.requests.rbegin(); it != b.requests.rend(); ++it)
    {
      if (it->value == value)
      {
        return it->xapp;
      }
    }
    return b.requests.back().xapp;
  }

  void write(XAppId const &xapp, ParamId const &param, double value, TimeMs t, SimState &s)
  {
    if (param != kTxp)
    {
      throw Error(ErrorCode::kUnknownId, "simulator has no parameter " + param.str());
    }
    double const old = s.txp_dbm();
    set_txp(s, value);
    ledger_.record_change(topology_, ChangeRecord{t, xapp, param, old, s.txp_dbm()});
  }

  ConflictTopology            topology_;
  Strategy                    strategy_;
  MitigationContext           ctx_;
  Ledger                      ledger_;
  double                      collect_window_ms_;
  std::set<ParamId>           contested_;
  std::map<ParamId, Batch>    batches_;
  DetectionTally              tally_;
};

inline double policy_window_ms(XAppPolicy const &p)
{
  return p.condition ? p.condition->window_ms : 5000.0;
}

}  // namespace detail

/// One seeded replica of one strategy.
inline ReplicaOutcome run_replica(ExperimentConfig const &cfg, Strategy strategy, std::size_t rep,
                                  bool with_trace = false)
{
  std::uint64_t const seed = cfg.base_seed + rep;
  SimState            s    = init_sim(cfg.sim, seed);
  s.trace_enabled          = with_trace;

  detail::ConflictManager cms(build_topology(es_mro_descriptors()), strategy,
                              mitigation_context(cfg), cfg.attribution_window_ms,
                              cfg.collect_window_ms);
  detail::KpiWindow es_window(detail::policy_window_ms(cfg.es));
  detail::KpiWindow mro_window(detail::policy_window_ms(cfg.mro));

  ReplicaOutcome out;
  auto const     steps    = cfg.sim.total_steps();
  double const   interval = cfg.sim.adjust_interval_ms;
  for (std::size_t k = 0; k < steps; ++k)
  {
    TimeMs const t   = s.t_ms;
    double const pos = std::fmod(t, interval);
    if (std::abs(pos) < 1e-9)
    {
      if (auto r = es_request(cfg.es, es_window.view(), t))
      {
        cms.submit(*r, s);
      }
    }
    if (std::abs(pos - cfg.mro_offset_ms) < 1e-9)
    {
      if (auto r = mro_request(cfg.mro, mro_window.view(), t))
      {
        cms.submit(*r, s);
      }
    }
    cms.flush(t, s);

    step(s);
    cms.observe(s);
    es_window.push(s.t_ms, s.last_step);
    mro_window.push(s.t_ms, s.last_step);

    if (std::abs(std::fmod(s.t_ms, interval)) < 1e-9)
    {
      out.txp_after_interval.push_back(s.txp_dbm());
    }
  }

  out.record    = ReplicaRecord{strategy, rep, seed, kpi_report(s)};
  out.detection = cms.tally();
  out.trace     = std::move(s.trace);
  return out;
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn &&fn)
{
  unsigned const workers =
      std::max(1u, std::min<unsigned>(threads ? threads : std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(n)));
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr        failure;
  std::mutex                failure_mutex;
  std::vector<std::thread>  pool;
  for (unsigned w = 0; w < workers; ++w)
  {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++)
      {
        try
        {
          fn(i);
        }
        catch (...)
        {
          std::lock_guard lock(failure_mutex);
          if (!failure)
          {
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto &t : pool)
  {
    t.join();
  }
  if (failure)
  {
    std::rethrow_exception(failure);
  }
}

}  // namespace detail

/// Runs every (strategy, replica) pair. Replica r of every strategy uses seed
/// base_seed + r. Records are ordered by strategy (as configured), then rep.
inline ExperimentRun run_experiment(ExperimentConfig const &cfg)
{
  cfg.validate();
  std::size_t const           n = cfg.strategies.size() * cfg.reps;
  std::vector<ReplicaOutcome> outcomes(n);
  detail::parallel_for(n, cfg.threads, [&](std::size_t i) {
    outcomes[i] = run_replica(cfg, cfg.strategies[i / cfg.reps], i % cfg.reps);
  });

  ExperimentRun run;
  for (auto &o : outcomes)
  {
    run.result.records.push_back(o.record);
    run.detection[o.record.strategy] += o.detection;
  }
  return run;
}

struct QacmThresholds
{
  double energy_efficiency = 0.0;
  double link_failures     = 0.0;
  double total_handovers   = 0.0;
};

/// Median KPIs of a baseline replica set.
inline QacmThresholds derive_qacm_thresholds(std::vector<KpiReport> const &baseline)
{
  if (baseline.empty())
  {
    throw Error(ErrorCode::kEmptyInput, "empty baseline");
  }
  std::vector<double> ee;
  std::vector<double> lf;
  std::vector<double> ho;
  for (auto const &r : baseline)
  {
    ee.push_back(r.energy_efficiency_bits_per_joule);
    lf.push_back(static_cast<double>(r.link_failures));
    ho.push_back(static_cast<double>(r.total_handovers));
  }
  return {median(ee), median(lf), median(ho)};
}

inline std::vector<KpiReport> reports_of(ExperimentResult const &result, Strategy strategy)
{
  std::vector<KpiReport> out;
  for (auto const &r : result.records)
  {
    if (r.strategy == strategy)
    {
      out.push_back(r.report);
    }
  }
  return out;
}

/// Mean KPIs with TXP held fixed at every grid value for the whole run.
struct ResponseCurves
{
  std::vector<double> txp_dbm;
  std::vector<double> energy_efficiency;
  std::vector<double> link_failures;
  std::vector<double> total_handovers;
};

inline ResponseCurves calibrate_response_curves(SimConfig const &sim, std::vector<std::uint64_t> const &seeds,
                                                double grid_step, unsigned threads = 0)
{
  if (seeds.empty())
  {
    throw Error(ErrorCode::kEmptyInput, "calibration needs at least one seed");
  }
  sim.validate();
  auto const bounds = sim.txp_bounds_dbm;
  auto const n = static_cast<std::size_t>(std::floor((bounds.max - bounds.min) / grid_step + 1e-9)) + 1;

  std::vector<KpiReport> reports(n * seeds.size());
  detail::parallel_for(reports.size(), threads, [&](std::size_t i) {
    double const v = bounds.min + static_cast<double>(i / seeds.size()) * grid_step;
    SimState     s = init_sim(sim, seeds[i % seeds.size()]);
    set_txp(s, v);
    for (std::size_t k = 0, steps = sim.total_steps(); k < steps; ++k)
    {
      step(s);
    }
    reports[i] = kpi_report(s);
  });

  ResponseCurves c;
  for (std::size_t g = 0; g < n; ++g)
  {
    std::vector<double> ee;
    std::vector<double> lf;
    std::vector<double> ho;
    for (std::size_t j = 0; j < seeds.size(); ++j)
    {
      auto const &r = reports[g * seeds.size() + j];
      ee.push_back(r.energy_efficiency_bits_per_joule);
      lf.push_back(static_cast<double>(r.link_failures));
      ho.push_back(static_cast<double>(r.total_handovers));
    }
    c.txp_dbm.push_back(bounds.min + static_cast<double>(g) * grid_step);
    c.energy_efficiency.push_back(mean(ee));
    c.link_failures.push_back(mean(lf));
    c.total_handovers.push_back(mean(ho));
  }
  return c;
}

inline ResponseModelSet build_qacm_models(ResponseCurves const &curves, QacmThresholds const &thr,
                                          Bounds bounds, double grid_step)
{
  auto curve = [&](std::vector<double> const &ys) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < ys.size(); ++i)
    {
      pts.emplace_back(curves.txp_dbm[i], ys[i]);
    }
    return PiecewiseLinear(std::move(pts));
  };
  ResponseModelSet set;
  set.param     = kTxp;
  set.bounds    = bounds;
  set.grid_step = grid_step;
  set.models    = {
      KpiResponseModel{kEnergyEfficiency, Direction::kMaximize, thr.energy_efficiency,
                       curve(curves.energy_efficiency)},
      KpiResponseModel{kLinkFailures, Direction::kMinimize, thr.link_failures,
                       curve(curves.link_failures)},
      KpiResponseModel{kTotalHandovers, Direction::kMinimize, thr.total_handovers,
                       curve(curves.total_handovers)},
  };
  return set;
}

/// Calibration seeds sit far from the replica seeds so the response curves
/// are fitted on worlds the experiment never replays.
inline constexpr std::uint64_t kCalibrationSeedOffset = 1'000'003;

inline std::vector<std::uint64_t> calibration_seeds(std::uint64_t base_seed, std::size_t n)
{
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < n; ++i)
  {
    seeds.push_back(base_seed + kCalibrationSeedOffset + i);
  }
  return seeds;
}

/// Each KPI's threshold is the median its owner's priority baseline reaches:
/// EE from P-ES, link failures and handovers from P-MRO.
inline QacmThresholds owner_priority_thresholds(ExperimentResult const &baselines)
{
  auto const es  = derive_qacm_thresholds(reports_of(baselines, Strategy::kPEs));
  auto const mro = derive_qacm_thresholds(reports_of(baselines, Strategy::kPMro));
  return {es.energy_efficiency, mro.link_failures, mro.total_handovers};
}

struct DerivedQacmRun
{
  ExperimentRun    run;
  ResponseModelSet models;
  QacmThresholds   thresholds;
};

/// Runs the configured strategies when QACM has no model file: the priority
/// baselines run first (also when not requested, without being reported),
/// the curves come from a static-TXP sweep, then QACM runs on the result.
inline DerivedQacmRun run_experiment_deriving_qacm(ExperimentConfig cfg, std::size_t n_calibration_seeds = 20,
                                                   double grid_step = 1.0)
{
  cfg.validate(false);
  ExperimentConfig base = cfg;
  base.qacm.reset();
  base.strategies.clear();
  for (auto s : cfg.strategies)
  {
    if (s != Strategy::kQacm)
    {
      base.strategies.push_back(s);
    }
  }
  for (auto s : {Strategy::kPEs, Strategy::kPMro})
  {
    if (std::find(base.strategies.begin(), base.strategies.end(), s) == base.strategies.end())
    {
      base.strategies.push_back(s);
    }
  }
  auto const baselines = run_experiment(base);

  DerivedQacmRun out;
  out.thresholds = owner_priority_thresholds(baselines.result);
  auto const curves = calibrate_response_curves(cfg.sim, calibration_seeds(cfg.base_seed, n_calibration_seeds),
                                                grid_step, cfg.threads);
  out.models = build_qacm_models(curves, out.thresholds, cfg.sim.txp_bounds_dbm, grid_step);

  ExperimentRun qacm_run;
  if (std::find(cfg.strategies.begin(), cfg.strategies.end(), Strategy::kQacm) != cfg.strategies.end())
  {
    ExperimentConfig q = cfg;
    q.strategies = {Strategy::kQacm};
    q.qacm       = out.models;
    qacm_run     = run_experiment(q);
  }

  for (auto s : cfg.strategies)
  {
    auto const &src = s == Strategy::kQacm ? qacm_run : baselines;
    for (auto const &r : src.result.records)
    {
      if (r.strategy == s)
      {
        out.run.result.records.push_back(r);
      }
    }
    if (auto it = src.detection.find(s); it != src.detection.end())
    {
      out.run.detection[s] = it->second;
    }
  }
  return out;
}

struct BoxStats
{
  double      min    = 0.0;
  double      q1     = 0.0;
  double      median = 0.0;
  double      q3     = 0.0;
  double      max    = 0.0;
  double      mean   = 0.0;
  std::size_t n      = 0;

  bool operator==(BoxStats const &) const = default;
};

inline BoxStats box_stats(std::vector<double> sample)
{
  if (sample.empty())
  {
    throw Error(ErrorCode::kEmptyInput, "box statistics of an empty sample");
  }
  std::sort(sample.begin(), sample.end());
  BoxStats b;
  b.min    = sample.front();
  b.q1     = quantile_sorted(sample, 0.25);
  b.median = quantile_sorted(sample, 0.5);
  b.q3     = quantile_sorted(sample, 0.75);
  b.max    = sample.back();
  b.mean   = mean(sample);
  b.n      = sample.size();
  return b;
}

inline constexpr char const *kKpiColumns[] = {"energy_efficiency_bits_per_joule", "link_failures",
                                              "total_handovers", "pingpong_handovers"};

inline double kpi_value(KpiReport const &r, std::string_view column)
{
  if (column == "energy_efficiency_bits_per_joule")
  {
    return r.energy_efficiency_bits_per_joule;
  }
  if (column == "link_failures")
  {
    return static_cast<double>(r.link_failures);
  }
  if (column == "total_handovers")
  {
    return static_cast<double>(r.total_handovers);
  }
  if (column == "pingpong_handovers")
  {
    return static_cast<double>(r.pingpong_handovers);
  }
  throw Error(ErrorCode::kUnknownId, "unknown KPI column " + std::string(column));
}

/// Box statistics per (strategy, KPI column).
using BoxPlotStats = std::map<Strategy, std::map<std::string, BoxStats>>;

inline BoxPlotStats summarize(ExperimentResult const &result)
{
  std::map<Strategy, std::vector<KpiReport>> by_strategy;
  for (auto const &r : result.records)
  {
    by_strategy[r.strategy].push_back(r.report);
  }
  BoxPlotStats out;
  for (auto const &[strategy, reports] : by_strategy)
  {
    for (auto const *col : kKpiColumns)
    {
      std::vector<double> sample;
      for (auto const &r : reports)
      {
        sample.push_back(kpi_value(r, col));
      }
      out[strategy][col] = box_stats(std::move(sample));
    }
  }
  return out;
}

}  // namespace ric_cms

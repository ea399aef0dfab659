#include "gdf/cli.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>

#include "gdf/baselines.hpp"
#include "gdf/ctrl_centralized.hpp"
#include "gdf/ctrl_distributed.hpp"
#include "gdf/errors.hpp"
#include "gdf/logstore.hpp"
#include "text_util.hpp"

namespace gdf::cli {

namespace {

using text::fmt_double;

SlaSpec effective_sla(const TransferSpec& spec, const std::string& controller,
                      const SolutionCache* cache, double link_bw, size_t n_transfers) {
  if (controller == "maxth") {
    if (!cache) throw ConfigError("controller 'maxth' needs a cache");
    const auto& part = cache->partition(SlaKind::ThroughputGuarantee);
    return SlaSpec{SlaKind::ThroughputGuarantee, part.levels.back(), 0};
  }
  if (controller == "minpow") {
    if (!cache) throw ConfigError("controller 'minpow' needs a cache");
    const auto& part = cache->partition(SlaKind::TotalEnergyCap);
    return SlaSpec{SlaKind::TotalEnergyCap, part.levels.front(), 0};
  }
  if (spec.sla) return *spec.sla;
  // Centralized runs without explicit SLAs fall back to an even Type-T split.
  return SlaSpec{SlaKind::ThroughputGuarantee,
                 0.5 * link_bw / static_cast<double>(std::max<size_t>(1, n_transfers)), 0};
}

SlaKind required_kind(const std::string& controller) {
  if (controller == "typeT" || controller == "maxth") return SlaKind::ThroughputGuarantee;
  if (controller == "typeE" || controller == "minpow") return SlaKind::TotalEnergyCap;
  return SlaKind::InstantPowerCap;  // typeP
}

}  // namespace

RunOutcome execute(Scenario scenario, const std::string& controller,
                   const SolutionCache* cache, uint64_t seed, bool opportunistic) {
  static const char* known[] = {"maxth", "minpow", "typeT",  "typeE",      "typeP",
                                "htee",  "static", "single", "centralized"};
  if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
        return controller == k;
      }) == std::end(known))
    throw ConfigError("unknown controller '" + controller + "'");

  RunOutcome out;
  SimWorld world = make_world(scenario, seed);
  std::vector<SimWorld::Hook> hooks;
  std::deque<HteeState> htee_states;
  std::vector<std::unique_ptr<DistributedTuner>> tuners;
  std::unique_ptr<CentralScheduler> scheduler;

  const bool adaptive = controller == "maxth" || controller == "minpow" ||
                        controller == "typeT" || controller == "typeE" ||
                        controller == "typeP";
  if ((adaptive || controller == "centralized") && !cache)
    throw ConfigError("controller '" + controller + "' needs a cache");

  for (const auto& spec : scenario.transfers) {
    if (controller == "single") {
      hooks.push_back(single_stream(spec.id));
      out.slas.try_emplace(spec.id);
    } else if (controller == "static") {
      out.slas.try_emplace(spec.id);  // scenario params, no actions
    } else if (controller == "htee") {
      HteeState& state = htee_states.emplace_back();
      hooks.push_back(htee_hook(state, spec.id));
      out.slas.try_emplace(spec.id);
    } else if (adaptive) {
      const SlaSpec sla = effective_sla(spec, controller, cache,
                                        scenario.link.bandwidth,
                                        scenario.transfers.size());
      if ((controller == "typeT" || controller == "typeE" || controller == "typeP") &&
          (!spec.sla || spec.sla->kind != required_kind(controller)))
        throw ConfigError("transfer '" + spec.id + "': controller '" + controller +
                          "' requires a matching sla_kind");
      TunerConfig cfg;
      cfg.sla = sla;
      cfg.cluster = spec.cluster;
      cfg.epsilon = sla.epsilon;
      cfg.opportunistic = opportunistic && spec.opportunistic;
      cfg.data_total = spec.workload.total_bytes_nominal();
      auto tuner = std::make_unique<DistributedTuner>(
          spec.id, cfg, *cache, scenario.link, world.power_model(),
          world.util_synthesis());
      world.apply_params(spec.id, tuner->current());
      hooks.push_back(tuner->hook());
      tuners.push_back(std::move(tuner));
      out.slas[spec.id] = sla;
    }
  }

  if (controller == "centralized") {
    scheduler = std::make_unique<CentralScheduler>(*cache, scenario.link.bandwidth);
    for (const auto& spec : scenario.transfers) {
      const SlaSpec sla = effective_sla(spec, controller, cache,
                                        scenario.link.bandwidth,
                                        scenario.transfers.size());
      scheduler->queue().push_back(
          Request{spec.id, spec.src, spec.dst, sla, spec.workload, spec.cluster});
      out.slas[spec.id] = sla;
    }
    hooks.push_back(scheduler->hook());
  }

  out.result = world.run(scenario.duration, hooks);

  // Utilization over the ticks where the managed transfers were active.
  double util_sum = 0;
  int util_ticks = 0;
  for (const auto& obs : out.result.trace) {
    const bool any = std::any_of(obs.transfers.begin(), obs.transfers.end(),
                                 [](const TransferObservation& t) { return t.active; });
    if (!any) continue;
    util_sum += obs.link_utilization;
    ++util_ticks;
  }
  out.utilization = util_ticks > 0 ? util_sum / util_ticks : 0;

  // SLA-violation fraction of control intervals, per transfer.
  std::map<std::string, double> joules, bytes, active_s;
  std::map<std::string, int> active_ticks, violations;
  for (const auto& obs : out.result.trace) {
    for (const auto& t : obs.transfers) {
      if (!t.active) continue;
      const SlaSpec sla = out.slas[t.id];
      joules[t.id] += t.watts * obs.tick;
      bytes[t.id] += t.throughput / 8.0 * obs.tick;
      active_s[t.id] += obs.tick;
      active_ticks[t.id] += 1;
      if (!(sla.value > 0)) continue;
      const double eps = sla.epsilon > 0 ? sla.epsilon : 0.05 * sla.value;
      bool violated = false;
      switch (sla.kind) {
        case SlaKind::ThroughputGuarantee:
          // Running mean since start: shortfalls can be repaid by banked
          // surplus, so transient dips only count while the mean lags.
          violated = bytes[t.id] * 8.0 / active_s[t.id] < sla.value - eps;
          break;
        case SlaKind::TotalEnergyCap:
          violated = joules[t.id] > sla.value;
          break;
        case SlaKind::InstantPowerCap:
          violated = t.watts > sla.value + eps;
          break;
      }
      if (violated) violations[t.id] += 1;
    }
  }
  for (const auto& spec : scenario.transfers) {
    const int n = active_ticks[spec.id];
    out.violation_fraction[spec.id] =
        n > 0 ? static_cast<double>(violations[spec.id]) / n : 0;
  }

  if (scheduler) out.ledger_snapshot = scheduler->ledger().snapshot();
  out.scenario = std::move(scenario);
  return out;
}

void cmd_analyze(const AnalyzeArgs& args, std::ostream& report) {
  LogBatch batch = ingest(args.logs_path);
  AnalyzeConfig cfg;
  cfg.max_clusters = args.clusters;
  cfg.sla_levels = args.sla_levels;
  AnalyzeOutput out = analyze(batch, cfg);

  std::ofstream os(args.out_path, std::ios::binary);
  if (!os) throw ConfigError("cannot write cache '" + args.out_path + "'");
  out.cache.save(os);

  const auto& cost = out.cache.cost();
  report << "records=" << batch.records.size()
         << " clusters=" << out.clusters.clusters.size()
         << " entries=" << out.cache.size()
         << " analysis_seconds=" << fmt_double(cost.analysis_seconds)
         << " analysis_joules=" << fmt_double(cost.analysis_joules) << "\n";
}

void cmd_run(const RunArgs& args, std::ostream& report) {
  Scenario sc = load_scenario(args.scenario_path);
  SolutionCache cache;
  bool have_cache = false;
  if (!args.cache_path.empty()) {
    std::ifstream is(args.cache_path, std::ios::binary);
    if (!is) throw ConfigError("cannot open cache '" + args.cache_path + "'");
    cache = SolutionCache::load(is);
    have_cache = true;
  }
  RunOutcome out = execute(std::move(sc), args.controller,
                           have_cache ? &cache : nullptr, args.seed,
                           args.opportunistic);

  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);

  std::ofstream trace(fs::path(args.out_dir) / "trace.csv", std::ios::binary);
  trace << "time,id,throughput,queuing_delay,packet_loss_rate,watts,cc,p,pp,bs\n";
  for (const auto& obs : out.result.trace)
    for (const auto& t : obs.transfers) {
      if (!t.active) continue;
      trace << fmt_double(obs.time) << ',' << t.id << ',' << fmt_double(t.throughput)
            << ',' << fmt_double(t.queuing_delay) << ','
            << fmt_double(t.packet_loss_rate) << ',' << fmt_double(t.watts) << ','
            << t.params.cc << ',' << t.params.p << ',' << t.params.pp << ','
            << t.params.bs << '\n';
    }

  std::ofstream summary(fs::path(args.out_dir) / "summary.csv", std::ios::binary);
  summary << "id,bytes,seconds,mean_throughput,joules,efficiency,violation_fraction\n";
  for (const auto& s : out.result.summaries) {
    const EnergyAccount& e = out.result.energy.at(s.id);
    summary << s.id << ',' << fmt_double(s.bytes) << ',' << fmt_double(s.seconds)
            << ',' << fmt_double(s.mean_throughput) << ',' << fmt_double(s.joules)
            << ',' << fmt_double(e.efficiency()) << ','
            << fmt_double(out.violation_fraction[s.id]) << '\n';
  }

  save(out.result.log, (fs::path(args.out_dir) / "transfer.log").string());

  if (!out.ledger_snapshot.empty()) {
    std::ofstream ledger(fs::path(args.out_dir) / "ledger.txt", std::ios::binary);
    ledger << out.ledger_snapshot;
  }

  for (const auto& s : out.result.summaries)
    report << s.id << " mean_throughput=" << fmt_double(s.mean_throughput)
           << " joules=" << fmt_double(s.joules)
           << " violation_fraction=" << fmt_double(out.violation_fraction[s.id])
           << "\n";
  report << "utilization=" << fmt_double(out.utilization) << "\n";
}

void cmd_fairness(const FairnessArgs& args, std::ostream& report) {
  Scenario sc = load_scenario(args.scenario_path);
  if (sc.transfers.size() < 2) throw ConfigError("fairness needs at least 2 transfers");
  SolutionCache cache;
  bool have_cache = false;
  if (!args.cache_path.empty()) {
    std::ifstream is(args.cache_path, std::ios::binary);
    if (!is) throw ConfigError("cannot open cache '" + args.cache_path + "'");
    cache = SolutionCache::load(is);
    have_cache = true;
  }
  RunOutcome out = execute(std::move(sc), args.controller,
                           have_cache ? &cache : nullptr, args.seed, true);

  double sum = 0, sum_sq = 0;
  const auto n = static_cast<double>(out.result.summaries.size());
  for (const auto& s : out.result.summaries) {
    sum += s.mean_throughput;
    sum_sq += s.mean_throughput * s.mean_throughput;
  }
  const double jain = sum_sq > 0 ? sum * sum / (n * sum_sq) : 1.0;
  report << "utilization=" << fmt_double(out.utilization)
         << " jain=" << fmt_double(jain) << "\n";
}

void cmd_sla_report(const SlaReportArgs& args, std::ostream& report) {
  Scenario base = load_scenario(args.scenario_path);
  std::ifstream is(args.cache_path, std::ios::binary);
  if (!is) throw ConfigError("cannot open cache '" + args.cache_path + "'");
  const SolutionCache cache = SolutionCache::load(is);

  const SlaKind kind = sla_kind_from_char(args.kind);
  const auto& part = cache.partition(kind);

  int lo = 0, hi = 0;
  const auto dash = args.levels.find('-');
  if (dash == std::string::npos) {
    lo = hi = static_cast<int>(text::parse_int(args.levels));
  } else {
    lo = static_cast<int>(text::parse_int(args.levels.substr(0, dash)));
    hi = static_cast<int>(text::parse_int(args.levels.substr(dash + 1)));
  }
  if (lo > hi) throw ConfigError("bad level range '" + args.levels + "'");

  const std::string controller = kind == SlaKind::ThroughputGuarantee ? "typeT"
                                 : kind == SlaKind::TotalEnergyCap    ? "typeE"
                                                                      : "typeP";
  report << "level,target,achieved,joules,violation_pct,status\n";
  for (int level = lo; level <= hi; ++level) {
    const bool in_range = level >= 0 && level < static_cast<int>(part.levels.size());
    bool cached = false;
    if (in_range)
      for (const auto& spec : base.transfers)
        for (LoadBucket b : {LoadBucket::Low, LoadBucket::Median, LoadBucket::High})
          if (cache.contains(CacheKey{spec.cluster, kind, level, b})) cached = true;
    if (!cached) {
      report << level << ','
             << (in_range ? fmt_double(part.levels[static_cast<size_t>(level)]) : "nan")
             << ",nan,nan,nan,infeasible\n";
      continue;
    }
    const double target = part.levels[static_cast<size_t>(level)];
    Scenario sc = base;
    for (auto& spec : sc.transfers) spec.sla = SlaSpec{kind, target, 0};
    RunOutcome out = execute(std::move(sc), controller, &cache, args.seed,
                             args.opportunistic);

    double joules = 0, thr_sum = 0, watts_peak = 0, violation_sum = 0;
    for (const auto& s : out.result.summaries) {
      joules += s.joules;
      thr_sum += s.mean_throughput;
      violation_sum += out.violation_fraction[s.id];
    }
    for (const auto& obs : out.result.trace)
      for (const auto& t : obs.transfers)
        if (t.active) watts_peak = std::max(watts_peak, t.watts);
    const double achieved = kind == SlaKind::ThroughputGuarantee ? thr_sum
                            : kind == SlaKind::TotalEnergyCap    ? joules
                                                                 : watts_peak;
    const double violation_pct =
        100.0 * violation_sum / static_cast<double>(out.result.summaries.size());
    report << level << ',' << fmt_double(target) << ',' << fmt_double(achieved) << ','
           << fmt_double(joules) << ',' << fmt_double(violation_pct) << ",ok\n";
  }
}

}  // namespace gdf::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "gdf/offline.hpp"
#include "gdf/scenario.hpp"
#include "gdf/simnet.hpp"

namespace gdf::cli {

struct AnalyzeArgs {
  std::string logs_path;
  std::string out_path;
  int clusters = 4;
  int sla_levels = 10;
};

/// ingest -> clean -> estimate -> cluster -> fit -> partition -> solve-all;
/// writes the cache and prints the deterministic cost report.
void cmd_analyze(const AnalyzeArgs& args, std::ostream& report);

struct RunArgs {
  std::string scenario_path;
  std::string controller;  // maxth minpow typeT typeE typeP htee static single centralized
  std::string cache_path;  // required for adaptive controllers
  std::string out_dir;
  uint64_t seed = 0;       // 0: scenario seed
  bool opportunistic = true;
};

void cmd_run(const RunArgs& args, std::ostream& report);

struct FairnessArgs {
  std::string scenario_path;
  std::string controller;
  std::string cache_path;
  uint64_t seed = 0;
};

/// Aggregate link utilization plus the Jain index over per-transfer mean
/// throughputs.
void cmd_fairness(const FairnessArgs& args, std::ostream& report);

struct SlaReportArgs {
  std::string scenario_path;
  std::string cache_path;
  char kind = 'T';
  std::string levels;  // "lo-hi" or a single index into the cached partition
  uint64_t seed = 0;
  bool opportunistic = true;
};

/// Per-level CSV: target, achieved value, energy, violation percentage.
void cmd_sla_report(const SlaReportArgs& args, std::ostream& report);

/// Shared runner: builds the world, attaches the controller, runs, and
/// derives utilization and per-transfer SLA-violation fractions.
struct RunOutcome {
  Scenario scenario;
  RunResult result;
  double utilization = 0;  // mean link utilization over active ticks
  std::map<std::string, double> violation_fraction;
  std::map<std::string, SlaSpec> slas;  // effective SLA per transfer
  std::string ledger_snapshot;          // centralized controller only
};

RunOutcome execute(Scenario scenario, const std::string& controller,
                   const SolutionCache* cache, uint64_t seed, bool opportunistic);

}  // namespace gdf::cli

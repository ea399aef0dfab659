#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gdf/domain.hpp"
#include "gdf/simnet.hpp"

namespace gdf {

struct TransferSpec {
  std::string id;
  std::string src = "a";
  std::string dst = "b";
  Workload workload;
  ParamSet params;
  double start = 0;
  std::optional<SlaSpec> sla;
  int cluster = 0;
  bool opportunistic = true;
};

/// Everything needed to reconstruct one simulation run: link, timing, power
/// and utilization constants, transfers, and scripted external flows.
struct Scenario {
  LinkSpec link;
  uint64_t seed = 1;
  double tick = 1.0;
  double duration = 120;
  double loss_factor = 2.0;
  std::optional<PowerModel> power;
  UtilSynthesis util;
  std::vector<TransferSpec> transfers;
  std::vector<ExternalFlow> flows;
};

/// INI-style scenario file: [link] / [sim] / [power] / [util] and repeatable
/// [transfer] / [flow] sections of key = value lines. Unknown keys are
/// ConfigError; '#' starts a comment.
Scenario parse_scenario(std::istream& is);
Scenario load_scenario(const std::string& path);

/// Builds the world from a scenario. The GDF_TICK environment variable, when
/// set, overrides the tick length; `seed_override`, when nonzero, overrides
/// the scenario seed.
SimWorld make_world(const Scenario& sc, uint64_t seed_override = 0);

}  // namespace gdf

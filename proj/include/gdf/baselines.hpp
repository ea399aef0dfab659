#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gdf/ctrl_distributed.hpp"
#include "gdf/domain.hpp"
#include "gdf/simnet.hpp"

namespace gdf {

/// Additive channel search: hold each odd cc for a dwell period, record the
/// throughput-per-joule ratio, then commit the best level for the rest of the
/// run. No adaptation after commit.
struct HteeState {
  enum class Phase { Searching, Committed };

  int current_cc = 1;
  int limit = 7;
  int dwell_ticks = 5;
  Phase phase = Phase::Searching;
  std::vector<std::pair<int, double>> ratio_table;  // (cc, mean T/E ratio)

  int ticks_at_level = 0;
  double sum_throughput = 0;
  double sum_watts = 0;
  int p = 1;
  int pp = 1;
};

Action htee_on_tick(HteeState& state, const std::string& id,
                    const TickObservation& obs);

/// Hook form of the search for driving a simulation directly.
SimWorld::Hook htee_hook(HteeState& state, const std::string& id);

/// Fixed-parameter transfer: never acts.
SimWorld::Hook static_params(const std::string& id, const ParamSet& params);

/// cc = p = pp = 1, never acts.
SimWorld::Hook single_stream(const std::string& id);

}  // namespace gdf

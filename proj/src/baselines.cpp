#include "gdf/baselines.hpp"

#include <algorithm>

namespace gdf {

Action htee_on_tick(HteeState& state, const std::string& id,
                    const TickObservation& obs) {
  Action noop{obs.time, id, ActionType::NoOp,
              ParamSet{state.current_cc, state.p, state.pp, 0}, -1, "htee"};
  if (state.phase == HteeState::Phase::Committed) return noop;

  const TransferObservation* self = obs.self(id);
  if (!self || !self->active || self->finished) return noop;

  if (state.ticks_at_level == 0 && state.ratio_table.empty() &&
      state.current_cc == 1) {
    // First tick of the search: make sure the world runs the schedule's start.
    ParamSet params{state.current_cc, state.p, state.pp, self->params.bs};
    state.ticks_at_level = 1;
    state.sum_throughput = self->throughput;
    state.sum_watts = self->watts;
    return Action{obs.time, id, ActionType::SetParams, params, -1, "htee-level"};
  }

  state.ticks_at_level += 1;
  state.sum_throughput += self->throughput;
  state.sum_watts += self->watts;
  if (state.ticks_at_level < state.dwell_ticks) return noop;

  const double joules = state.sum_watts * obs.tick;
  const double ratio = joules > 0 ? state.sum_throughput * obs.tick / joules : 0;
  state.ratio_table.emplace_back(state.current_cc, ratio);
  state.ticks_at_level = 0;
  state.sum_throughput = 0;
  state.sum_watts = 0;

  if (state.current_cc + 2 <= state.limit) {
    state.current_cc += 2;
    ParamSet params{state.current_cc, state.p, state.pp, self->params.bs};
    return Action{obs.time, id, ActionType::SetParams, params, -1, "htee-level"};
  }

  // All levels visited: commit the first maximum of the ratio table.
  auto best = std::max_element(
      state.ratio_table.begin(), state.ratio_table.end(),
      [](const auto& a, const auto& b) { return a.second < b.second; });
  state.current_cc = best->first;
  state.phase = HteeState::Phase::Committed;
  ParamSet params{state.current_cc, state.p, state.pp, self->params.bs};
  return Action{obs.time, id, ActionType::SetParams, params, -1, "htee-commit"};
}

SimWorld::Hook htee_hook(HteeState& state, const std::string& id) {
  return [&state, id](SimWorld& world, const TickObservation& obs) {
    Action a = htee_on_tick(state, id, obs);
    if (a.type == ActionType::SetParams) world.apply_params(id, a.params);
  };
}

SimWorld::Hook static_params(const std::string& id, const ParamSet& params) {
  bool applied = false;
  return [id, params, applied](SimWorld& world, const TickObservation&) mutable {
    if (!applied) {
      ParamSet p = params;
      if (p.bs <= 0) p.bs = world.params_of(id).bs;  // keep the configured buffer
      world.apply_params(id, p);
      applied = true;
    }
  };
}

SimWorld::Hook single_stream(const std::string& id) {
  return static_params(id, ParamSet{1, 1, 1, 0});
}

}  // namespace gdf

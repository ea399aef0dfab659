#pragma once

#include <span>
#include <string>
#include <vector>

#include "gdf/domain.hpp"
#include "gdf/offline.hpp"
#include "gdf/simnet.hpp"

namespace gdf {

enum class ActionType { SetParams, SetGroup, Backoff, NoOp };

struct Action {
  double time = 0;
  std::string id;
  ActionType type = ActionType::NoOp;
  ParamSet params;
  int group_index = -1;
  std::string reason;
  ResourceGroup group;  // applied on SetGroup

  Action() = default;
  Action(double time_, std::string id_, ActionType type_, ParamSet params_,
         int group_index_, std::string reason_, ResourceGroup group_ = {})
      : time(time_),
        id(std::move(id_)),
        type(type_),
        params(params_),
        group_index(group_index_),
        reason(std::move(reason_)),
        group(group_) {}
};

std::string action_line(const Action& a);

/// Five-step cgroup-style ladder: cpu caps 0.2 .. 1.0 with proportional NIC
/// caps.
std::vector<ResourceGroup> resource_group_ladder(double link_bw);

struct PipeliningPlan {
  std::vector<int> pp_per_process;
  std::vector<size_t> slow_processes;  // below half the median process rate
};

/// Reallocates the total pipelining budget cc*pp proportionally to observed
/// per-process throughput; every process keeps at least one slot.
PipeliningPlan redistribute_pipelining(int cc, int pp,
                                       std::span<const double> per_process_throughput);

struct TunerConfig {
  SlaSpec sla;
  ParamLimits limits;
  int cluster = 0;
  double epsilon = 0;            // 0: 5% of the SLA target
  int dwell_ticks = 3;           // queuing-delay trigger dwell
  double buffer_horizon = 60;    // seconds; credit capacity = epsilon * this
  bool opportunistic = true;
  bool invert_qdelay_trigger = false;
  double qdelay_factor = 1.5;
  double loss_threshold = 0.01;
  double expected_qdelay = 0;    // 0: link rtt
  double data_total = 0;         // bytes; Type-E efficiency target input
};

/// Per-transfer online tuner: SLA-specific dynamic tuning with AIMD limits,
/// multiplicative back-off, opportunistic increase/decrease, and pipelining
/// redistribution. One instance per transfer; no cross-transfer state.
class DistributedTuner {
 public:
  DistributedTuner(std::string transfer_id, TunerConfig config, const SolutionCache& cache,
                   const LinkSpec& link, const PowerModel& power,
                   const UtilSynthesis& util);

  const ParamSet& current() const { return current_; }
  int group_index() const { return group_index_; }
  const ParamLimits& limits() const { return limits_; }
  double throughput_buffer() const { return throughput_buffer_; }
  const std::vector<Action>& action_log() const { return log_; }

  std::vector<Action> on_tick(const TickObservation& obs);

  /// Simulation hook that applies this tuner's actions to the world.
  SimWorld::Hook hook();

 private:
  struct LimitUpdate {
    bool reduced = false;
  };

  LimitUpdate back_off(const TransferObservation& self);
  void raise_limits();
  Action set_params(double t, const ParamSet& params, const std::string& reason);
  Action set_group(double t, int index, const std::string& reason);
  Action set_throttle(double t, double nic_cap, const std::string& reason);
  bool try_lookup(SlaKind kind, double target, Solution& out) const;
  int pick_power_group(double watts_cap) const;
  double estimate_group_watts(const ResourceGroup& g, int cc, int p) const;

  std::string id_;
  TunerConfig cfg_;
  const SolutionCache& cache_;
  LinkSpec link_;
  PowerModel power_;
  UtilSynthesis util_;
  std::vector<ResourceGroup> ladder_;

  ParamLimits limits_;       // mutable copy; cc/p limits move with AIMD
  ParamSet current_;
  int group_index_ = 0;
  Solution cached_solution_;
  double energy_spent_ = 0;
  double data_done_ = 0;
  double throughput_buffer_ = 0;  // bits*s credit above the SLA target
  bool throttled_ = false;        // NIC cap pinned at the SLA target
  double t_goal_ = 0;
  int qdelay_dwell_ = 0;
  int efficient_streak_ = 0;
  std::vector<Action> log_;
};

}  // namespace gdf

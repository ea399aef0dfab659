#include "gdf/ctrl_distributed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gdf/errors.hpp"
#include "text_util.hpp"

namespace gdf {

std::string action_line(const Action& a) {
  const char* act = "noop";
  switch (a.type) {
    case ActionType::SetParams: act = "setparams"; break;
    case ActionType::SetGroup: act = "setgroup"; break;
    case ActionType::Backoff: act = "backoff"; break;
    case ActionType::NoOp: act = "noop"; break;
  }
  std::string out = "t=" + text::fmt_double(a.time) + " id=" + a.id + " act=" + act +
                    " cc=" + std::to_string(a.params.cc) + " p=" + std::to_string(a.params.p) +
                    " pp=" + std::to_string(a.params.pp) +
                    " grp=" + std::to_string(a.group_index) + " reason=" + a.reason;
  return out;
}

std::vector<ResourceGroup> resource_group_ladder(double link_bw) {
  std::vector<ResourceGroup> ladder;
  for (int i = 1; i <= 5; ++i) {
    const double frac = 0.2 * i;
    ladder.push_back(ResourceGroup{frac, frac * link_bw});
  }
  return ladder;
}

PipeliningPlan redistribute_pipelining(int cc, int pp,
                                       std::span<const double> per_process_throughput) {
  if (cc < 1 || pp < 1 || per_process_throughput.size() != static_cast<size_t>(cc))
    throw ConfigError("redistribute_pipelining: bad arguments");
  PipeliningPlan plan;
  plan.pp_per_process.assign(cc, 1);
  const int budget = cc * pp;
  int extra = budget - cc;

  double total = std::accumulate(per_process_throughput.begin(),
                                 per_process_throughput.end(), 0.0);
  std::vector<double> weight(cc, 1.0 / cc);
  if (total > 0)
    for (int i = 0; i < cc; ++i) weight[i] = per_process_throughput[i] / total;

  // Largest-remainder apportionment of the extra slots.
  std::vector<double> share(cc);
  int assigned = 0;
  for (int i = 0; i < cc; ++i) {
    share[i] = weight[i] * extra;
    plan.pp_per_process[i] += static_cast<int>(std::floor(share[i]));
    assigned += static_cast<int>(std::floor(share[i]));
  }
  std::vector<int> order(cc);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = share[a] - std::floor(share[a]);
    const double rb = share[b] - std::floor(share[b]);
    if (ra != rb) return ra > rb;
    return weight[a] > weight[b];
  });
  for (int i = 0; i < extra - assigned; ++i) plan.pp_per_process[order[i % cc]] += 1;

  std::vector<double> sorted(per_process_throughput.begin(), per_process_throughput.end());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (int i = 0; i < cc; ++i)
    if (per_process_throughput[i] < 0.5 * median)
      plan.slow_processes.push_back(static_cast<size_t>(i));
  return plan;
}

DistributedTuner::DistributedTuner(std::string transfer_id, TunerConfig config,
                                   const SolutionCache& cache, const LinkSpec& link,
                                   const PowerModel& power, const UtilSynthesis& util)
    : id_(std::move(transfer_id)),
      cfg_(std::move(config)),
      cache_(cache),
      link_(link),
      power_(power),
      util_(util),
      ladder_(resource_group_ladder(link.bandwidth)),
      limits_(cfg_.limits) {
  if (!try_lookup(cfg_.sla.kind, cfg_.sla.value, cached_solution_))
    throw Infeasible("no cached solution for the requested level");
  current_ = cached_solution_.params;
  current_.cc = std::min(current_.cc, limits_.cc_limit);
  current_.p = std::min(current_.p, limits_.p_limit);
  t_goal_ = cfg_.sla.kind == SlaKind::ThroughputGuarantee ? cfg_.sla.value
                                                          : cached_solution_.predicted_T;
  switch (cfg_.sla.kind) {
    case SlaKind::ThroughputGuarantee:
      group_index_ = static_cast<int>(ladder_.size()) - 1;
      break;
    case SlaKind::TotalEnergyCap:
      group_index_ = static_cast<int>(ladder_.size()) / 2;  // median group
      break;
    case SlaKind::InstantPowerCap:
      group_index_ = pick_power_group(cfg_.sla.value);  // fixed for the run
      break;
  }
}

double DistributedTuner::estimate_group_watts(const ResourceGroup& g, int cc, int p) const {
  double thr_p = link_.bandwidth / cc;
  if (g.nic_cap > 0) thr_p = std::min(thr_p, g.nic_cap / cc);
  const double cpu_room = (g.cpu_cap - util_.c0 - util_.c2 * p) / util_.c1;
  thr_p = std::min(thr_p, std::max(0.0, cpu_room) * link_.bandwidth);
  const Utilization u = synthesize_utilization(util_, thr_p, p, link_.bandwidth, g.cpu_cap);
  PowerModel no_intercept = power_;
  no_intercept.intercept = 0;
  return power_.intercept + cc * predict_power(no_intercept, u);
}

int DistributedTuner::pick_power_group(double watts_cap) const {
  for (int i = static_cast<int>(ladder_.size()) - 1; i >= 0; --i) {
    if (estimate_group_watts(ladder_[i], cached_solution_.params.cc,
                             cached_solution_.params.p) <= watts_cap)
      return i;
  }
  return 0;
}

bool DistributedTuner::try_lookup(SlaKind kind, double target, Solution& out) const {
  const auto& part = cache_.partition(kind);
  int level = cache_.level_for_value(kind, target);
  // Throughput targets relax downward; energy/power budgets relax upward.
  const int step = kind == SlaKind::ThroughputGuarantee ? -1 : 1;
  const int n = static_cast<int>(part.levels.size());
  LoadBucket bucket = LoadBucket::Median;
  for (; level >= 0 && level < n; level += step) {
    const CacheKey key{cfg_.cluster, kind, level, bucket};
    if (cache_.contains(key)) {
      out = cache_.lookup(key);
      return true;
    }
  }
  return false;
}

void DistributedTuner::raise_limits() {
  limits_.cc_limit = std::min(cfg_.limits.cc_limit, limits_.cc_limit + cfg_.limits.alpha_cc);
  limits_.p_limit = std::min(cfg_.limits.p_limit, limits_.p_limit + cfg_.limits.alpha_p);
}

DistributedTuner::LimitUpdate DistributedTuner::back_off(const TransferObservation& self) {
  LimitUpdate update;
  const double expected = cfg_.expected_qdelay > 0 ? cfg_.expected_qdelay : link_.rtt;
  const bool q_trigger = cfg_.invert_qdelay_trigger
                             ? self.queuing_delay > expected * cfg_.qdelay_factor
                             : self.queuing_delay < expected / cfg_.qdelay_factor;
  qdelay_dwell_ = q_trigger ? qdelay_dwell_ + 1 : 0;
  if (qdelay_dwell_ >= cfg_.dwell_ticks) {
    const int reduced = std::max(1, static_cast<int>(std::floor(limits_.p_limit * cfg_.limits.beta1)));
    if (reduced < limits_.p_limit) update.reduced = true;
    limits_.p_limit = reduced;
    qdelay_dwell_ = 0;
  }
  if (self.packet_loss_rate > cfg_.loss_threshold) {
    const int reduced = std::max(1, static_cast<int>(std::floor(limits_.cc_limit * cfg_.limits.beta2)));
    if (reduced < limits_.cc_limit) update.reduced = true;
    limits_.cc_limit = reduced;
  }
  return update;
}

Action DistributedTuner::set_params(double t, const ParamSet& params,
                                    const std::string& reason) {
  current_ = params;
  current_.cc = std::clamp(current_.cc, 1, limits_.cc_limit);
  current_.p = std::clamp(current_.p, 1, limits_.p_limit);
  current_.pp = std::clamp(current_.pp, 1, limits_.pp_max);
  return Action{t, id_, ActionType::SetParams, current_, group_index_, reason};
}

Action DistributedTuner::set_group(double t, int index, const std::string& reason) {
  group_index_ = index;
  return Action{t,     id_,    ActionType::SetGroup, current_,
                index, reason, ladder_[static_cast<size_t>(index)]};
}

Action DistributedTuner::set_throttle(double t, double nic_cap, const std::string& reason) {
  throttled_ = nic_cap > 0;
  ResourceGroup g = ladder_[static_cast<size_t>(group_index_)];
  if (nic_cap > 0) g.nic_cap = nic_cap;
  return Action{t, id_, ActionType::SetGroup, current_, group_index_, reason, g};
}

std::vector<Action> DistributedTuner::on_tick(const TickObservation& obs) {
  std::vector<Action> actions;
  const TransferObservation* self = obs.self(id_);
  if (!self || !self->active || self->finished) return actions;

  const double t = obs.time;
  const double tick = obs.tick;
  energy_spent_ += self->watts * tick;
  data_done_ = self->bytes_done;

  const double t_cur = self->throughput;
  const double eps = cfg_.epsilon > 0
                         ? cfg_.epsilon
                         : 0.05 * (cfg_.sla.kind == SlaKind::ThroughputGuarantee
                                       ? cfg_.sla.value
                                       : std::max(1.0, cached_solution_.predicted_T));
  const double buffer_cap = eps * cfg_.buffer_horizon;
  const ParamSet before = current_;

  auto emit_lookup = [&](SlaKind kind, double target, const std::string& reason) {
    Solution sol;
    if (!try_lookup(kind, target, sol)) {
      actions.push_back(Action{t, id_, ActionType::NoOp, current_, group_index_,
                               "infeasible"});
      return;
    }
    if (cfg_.sla.kind == SlaKind::TotalEnergyCap &&
        sol.predicted_E > cfg_.sla.value - energy_spent_) {
      actions.push_back(
          Action{t, id_, ActionType::NoOp, current_, group_index_, "budget"});
      return;
    }
    cached_solution_ = sol;
    Action a = set_params(t, sol.params, reason);
    if (!(current_ == before)) actions.push_back(a);
  };

  switch (cfg_.sla.kind) {
    case SlaKind::ThroughputGuarantee: {
      if (t_cur < cfg_.sla.value - eps) {
        // Shortfall: release the target throttle and chase the debt.
        throughput_buffer_ =
            std::max(0.0, throughput_buffer_ - (cfg_.sla.value - t_cur) * tick);
        t_goal_ = cfg_.sla.value + (cfg_.sla.value - t_cur);
        if (throttled_) actions.push_back(set_throttle(t, 0, "unthrottle"));
        if (back_off(*self).reduced) {
          Action a = set_params(t, current_, "backoff");
          a.type = ActionType::Backoff;
          actions.push_back(a);
        }
        emit_lookup(SlaKind::ThroughputGuarantee,
                    cfg_.opportunistic ? t_goal_ : cfg_.sla.value, "shortfall");
      } else if (t_cur > cfg_.sla.value + eps) {
        raise_limits();
        throughput_buffer_ =
            std::min(buffer_cap, throughput_buffer_ + (t_cur - cfg_.sla.value) * tick);
        double target = cfg_.sla.value;
        // Bank surplus while the credit buffer has room; once full (or when
        // banking is disabled), pin the NIC at the target to save energy.
        const bool bank = cfg_.opportunistic && throughput_buffer_ < buffer_cap;
        if (bank)
          target = std::max(t_goal_, cfg_.sla.value + eps);
        else
          t_goal_ = cfg_.sla.value;
        if (!bank && !throttled_)
          actions.push_back(set_throttle(t, cfg_.sla.value + eps, "throttle"));
        emit_lookup(SlaKind::ThroughputGuarantee, target, "opportunistic");
        if (actions.empty())
          actions.push_back(
              Action{t, id_, ActionType::NoOp, current_, group_index_, "inband"});
      } else {
        raise_limits();
        actions.push_back(
            Action{t, id_, ActionType::NoOp, current_, group_index_, "inband"});
      }
      break;
    }
    case SlaKind::TotalEnergyCap: {
      const double eta_target =
          cfg_.data_total > 0 ? cfg_.data_total / cfg_.sla.value : 0;
      const double eta_cur = energy_spent_ > 0 ? data_done_ / energy_spent_ : eta_target;
      const double e_left = cfg_.sla.value - energy_spent_;
      if (eta_cur <= eta_target) {
        efficient_streak_ = 0;
        if (t_cur <= cached_solution_.predicted_T - eps && back_off(*self).reduced) {
          Action a = set_params(t, current_, "backoff");
          a.type = ActionType::Backoff;
          actions.push_back(a);
        }
        emit_lookup(SlaKind::TotalEnergyCap, std::max(0.0, e_left), "budget-left");
      } else {
        raise_limits();
        ++efficient_streak_;
        if (cfg_.opportunistic && efficient_streak_ >= 3 && group_index_ > 0) {
          actions.push_back(set_group(t, group_index_ - 1, "oppdec"));
          efficient_streak_ = 0;
        }
        if (actions.empty())
          actions.push_back(
              Action{t, id_, ActionType::NoOp, current_, group_index_, "efficient"});
      }
      break;
    }
    case SlaKind::InstantPowerCap: {
      // The restricted group assigned at init is never loosened.
      if (t_cur <= cached_solution_.predicted_T - eps) {
        t_goal_ = cached_solution_.predicted_T +
                  (cached_solution_.predicted_T - t_cur);
        if (back_off(*self).reduced) {
          Action a = set_params(t, current_, "backoff");
          a.type = ActionType::Backoff;
          actions.push_back(a);
        }
      } else {
        raise_limits();
      }
      emit_lookup(SlaKind::InstantPowerCap, cfg_.sla.value, "powercap");
      if (actions.empty())
        actions.push_back(
            Action{t, id_, ActionType::NoOp, current_, group_index_, "inband"});
      break;
    }
  }

  log_.insert(log_.end(), actions.begin(), actions.end());
  return actions;
}

SimWorld::Hook DistributedTuner::hook() {
  return [this](SimWorld& world, const TickObservation& obs) {
    for (const Action& a : on_tick(obs)) {
      switch (a.type) {
        case ActionType::SetParams:
        case ActionType::Backoff:
          world.apply_params(id_, a.params);
          break;
        case ActionType::SetGroup:
          world.apply_group(id_, a.group);
          break;
        case ActionType::NoOp:
          break;
      }
    }
  };
}

}  // namespace gdf

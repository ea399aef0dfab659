#include "gdf/ctrl_centralized.hpp"

#include <algorithm>
#include <cmath>

#include "gdf/errors.hpp"
#include "text_util.hpp"

namespace gdf {

const char* status_name(TransferStatus s) {
  switch (s) {
    case TransferStatus::Running: return "RUNNING";
    case TransferStatus::Finished: return "FINISHED";
    case TransferStatus::Aborted: return "ABORTED";
    case TransferStatus::SlaViolation: return "SLA_VIOLATION";
  }
  return "?";
}

void Ledger::add(LedgerEntry entry) {
  if (has(entry.id)) throw ConfigError("duplicate ledger entry '" + entry.id + "'");
  entries_.push_back(std::move(entry));
}

LedgerEntry& Ledger::entry(const std::string& id) {
  for (auto& e : entries_)
    if (e.id == id) return e;
  throw UnknownTransfer(id);
}

const LedgerEntry& Ledger::entry(const std::string& id) const {
  return const_cast<Ledger*>(this)->entry(id);
}

bool Ledger::has(const std::string& id) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const LedgerEntry& e) { return e.id == id; });
}

void Ledger::set_status(const std::string& id, TransferStatus next) {
  LedgerEntry& e = entry(id);
  if (e.status == next) return;
  const bool ok =
      (e.status == TransferStatus::Running &&
       (next == TransferStatus::Finished || next == TransferStatus::Aborted ||
        next == TransferStatus::SlaViolation)) ||
      (e.status == TransferStatus::SlaViolation && next == TransferStatus::Running);
  if (!ok)
    throw ConfigError(std::string("illegal status transition ") + status_name(e.status) +
                      " -> " + status_name(next) + " for '" + id + "'");
  e.status = next;
}

std::string Ledger::snapshot() const {
  std::string out;
  for (const auto& e : entries_) {
    out += e.id + " " + e.src + " " + e.dst + " " + sla_kind_char(e.sla.kind) + " " +
           text::fmt_double(e.sla.value) + " " + status_name(e.status) + " " +
           std::to_string(e.params.cc) + " " + std::to_string(e.params.p) + " " +
           std::to_string(e.params.pp) + " " + std::to_string(e.group_index) + " " +
           text::fmt_double(e.throughput) + " " + text::fmt_double(e.watts) + "\n";
  }
  return out;
}

CentralScheduler::CentralScheduler(const SolutionCache& cache, double capacity,
                                   ParamLimits limits)
    : cache_(cache),
      ledger_(capacity),
      limits_(limits),
      ladder_(resource_group_ladder(capacity)) {}

double CentralScheduler::external_load_for(const LedgerEntry& e) const {
  // Other groups' observed throughput is this group's external load.
  double other = 0;
  for (const auto& o : ledger_.entries()) {
    if (o.status != TransferStatus::Running && o.status != TransferStatus::SlaViolation)
      continue;
    const bool same_group =
        o.src == e.src && o.dst == e.dst && o.sla.kind == e.sla.kind;
    if (!same_group) other += o.throughput;
  }
  return std::min(other, ledger_.capacity());
}

double CentralScheduler::guaranteed_throughput() const {
  double sum = 0;
  for (const auto& e : ledger_.entries())
    if (e.sla.kind == SlaKind::ThroughputGuarantee &&
        (e.status == TransferStatus::Running ||
         e.status == TransferStatus::SlaViolation))
      sum += e.sla.value;
  return sum;
}

bool CentralScheduler::lookup_at_load(const LedgerEntry& e, double ext_load,
                                      double target, Solution& out) const {
  const LoadBucket bucket = cache_.bucket_for_load(e.cluster, ext_load);
  const auto& part = cache_.partition(e.sla.kind);
  int level = cache_.level_for_value(e.sla.kind, target);
  const int step = e.sla.kind == SlaKind::ThroughputGuarantee ? -1 : 1;
  const int n = static_cast<int>(part.levels.size());
  for (; level >= 0 && level < n; level += step) {
    const CacheKey key{e.cluster, e.sla.kind, level, bucket};
    if (cache_.contains(key)) {
      out = cache_.lookup(key);
      return true;
    }
  }
  return false;
}

std::vector<Action> CentralScheduler::admit(std::deque<Request>& queue, double now) {
  std::vector<Action> actions;
  std::deque<Request> retained;
  while (!queue.empty()) {
    Request req = queue.front();
    queue.pop_front();

    if (req.sla.kind == SlaKind::ThroughputGuarantee &&
        guaranteed_throughput() + req.sla.value > ledger_.capacity()) {
      retained.push_back(std::move(req));  // gated; stays queued, FIFO kept
      continue;
    }

    LedgerEntry e;
    e.id = req.id;
    e.src = req.src;
    e.dst = req.dst;
    e.sla = req.sla;
    e.cluster = req.cluster;

    // Aim for the spare capacity of the group, never below the guarantee.
    const double ext = external_load_for(e);
    double target = req.sla.value;
    if (req.sla.kind == SlaKind::ThroughputGuarantee)
      target = std::max(target, ledger_.capacity() - ext);

    Solution sol;
    if (!lookup_at_load(e, ext, target, sol)) {
      actions.push_back(
          Action{now, req.id, ActionType::NoOp, ParamSet{}, -1, "infeasible"});
      continue;
    }
    e.params = sol.params;
    e.throughput = sol.predicted_T;
    switch (req.sla.kind) {
      case SlaKind::ThroughputGuarantee:
        e.group_index = static_cast<int>(ladder_.size()) - 1;
        break;
      case SlaKind::TotalEnergyCap:
        e.group_index = static_cast<int>(ladder_.size()) / 2;
        break;
      case SlaKind::InstantPowerCap:
        e.group_index = 0;
        break;
    }
    ledger_.add(e);
    actions.push_back(
        Action{now, e.id, ActionType::SetParams, e.params, e.group_index, "admit"});
  }
  queue = std::move(retained);
  return actions;
}

std::vector<Action> CentralScheduler::redistribute(double now) {
  std::vector<Action> actions;
  for (auto& e : ledger_.entries()) {
    if (e.status != TransferStatus::Running) continue;
    const double ext = external_load_for(e);
    double target = e.sla.value;
    if (e.sla.kind == SlaKind::ThroughputGuarantee)
      target = std::max(target, ledger_.capacity() - ext);
    Solution sol;
    if (!lookup_at_load(e, ext, target, sol)) continue;
    if (!(sol.params == e.params)) {
      e.params = sol.params;
      actions.push_back(Action{now, e.id, ActionType::SetParams, e.params,
                               e.group_index, "redistribute"});
    }
  }
  return actions;
}

Action CentralScheduler::micro_tune(LedgerEntry& e, double now) {
  // Single hill step, no re-solve.
  if (e.sla.kind == SlaKind::ThroughputGuarantee) {
    if (e.params.cc < limits_.cc_limit)
      e.params.cc += 1;
    else if (e.params.p < limits_.p_limit)
      e.params.p += 1;
    return Action{now, e.id, ActionType::SetParams, e.params, e.group_index,
                  "microtune"};
  }
  if (e.group_index > 0) e.group_index -= 1;
  return Action{now, e.id, ActionType::SetGroup, e.params, e.group_index, "microtune"};
}

std::vector<Action> CentralScheduler::on_update(const TickObservation& obs) {
  std::vector<Action> actions;
  bool released = false;
  for (const auto& t : obs.transfers) {
    if (!ledger_.has(t.id)) throw UnknownTransfer(t.id);
    LedgerEntry& e = ledger_.entry(t.id);
    if (e.status == TransferStatus::Finished || e.status == TransferStatus::Aborted)
      continue;
    e.throughput = t.throughput;
    e.watts = t.watts;
    if (t.finished) {
      if (e.status == TransferStatus::SlaViolation)
        ledger_.set_status(t.id, TransferStatus::Running);
      ledger_.set_status(t.id, TransferStatus::Finished);
      released = true;
      continue;
    }
    if (!t.active) continue;

    bool violating = false;
    const double eps = e.sla.epsilon > 0 ? e.sla.epsilon : 0.05 * e.sla.value;
    switch (e.sla.kind) {
      case SlaKind::ThroughputGuarantee:
        violating = t.throughput < e.sla.value - eps;
        break;
      case SlaKind::InstantPowerCap:
        violating = t.watts > e.sla.value + eps;
        break;
      case SlaKind::TotalEnergyCap:
        violating = false;  // budget overshoot is terminal, not a tick signal
        break;
    }
    if (violating && e.status == TransferStatus::Running) {
      ledger_.set_status(t.id, TransferStatus::SlaViolation);
      actions.push_back(micro_tune(e, obs.time));
    } else if (!violating && e.status == TransferStatus::SlaViolation) {
      ledger_.set_status(t.id, TransferStatus::Running);
    }
  }
  if (released) {
    auto more = redistribute(obs.time);
    actions.insert(actions.end(), more.begin(), more.end());
  }
  return actions;
}

std::vector<Action> CentralScheduler::on_capacity_change(double new_bw, double now) {
  if (new_bw <= 0) throw ConfigError("capacity must be positive");
  ledger_.set_capacity(new_bw);
  std::vector<Action> actions;
  for (auto& e : ledger_.entries()) {
    if (e.status != TransferStatus::Running &&
        e.status != TransferStatus::SlaViolation)
      continue;
    const double ext = external_load_for(e);
    double target = e.sla.value;
    if (e.sla.kind == SlaKind::ThroughputGuarantee)
      target = std::max(target, new_bw - ext);
    Solution sol;
    const bool found = lookup_at_load(e, ext, target, sol);
    if (e.sla.kind == SlaKind::ThroughputGuarantee &&
        (!found || std::min(sol.predicted_T, new_bw) < e.sla.value)) {
      if (e.status == TransferStatus::Running)
        ledger_.set_status(e.id, TransferStatus::SlaViolation);
    }
    if (found && !(sol.params == e.params)) {
      e.params = sol.params;
      actions.push_back(Action{now, e.id, ActionType::SetParams, e.params,
                               e.group_index, "capacity"});
    }
  }
  return actions;
}

SimWorld::Hook CentralScheduler::hook() {
  return [this](SimWorld& world, const TickObservation& obs) {
    auto apply = [&](const std::vector<Action>& actions) {
      for (const Action& a : actions) {
        switch (a.type) {
          case ActionType::SetParams:
            world.apply_params(a.id, a.params);
            if (a.reason == "admit" && a.group_index >= 0)
              world.apply_group(a.id, ladder_[static_cast<size_t>(a.group_index)]);
            break;
          case ActionType::SetGroup:
            world.apply_group(a.id, ladder_[static_cast<size_t>(a.group_index)]);
            break;
          case ActionType::Backoff:
          case ActionType::NoOp:
            break;
        }
      }
    };
    apply(admit(queue_, obs.time));
    TickObservation known = obs;  // updates for transfers not yet admitted are not ours
    std::erase_if(known.transfers,
                  [&](const TransferObservation& t) { return !ledger_.has(t.id); });
    apply(on_update(known));
  };
}

}  // namespace gdf

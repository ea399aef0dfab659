#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "gdf/ctrl_distributed.hpp"
#include "gdf/domain.hpp"
#include "gdf/offline.hpp"
#include "gdf/simnet.hpp"

namespace gdf {

enum class TransferStatus { Running, Finished, Aborted, SlaViolation };
const char* status_name(TransferStatus s);

struct Request {
  std::string id;
  std::string src;
  std::string dst;
  SlaSpec sla;
  Workload workload;
  int cluster = 0;
};

struct LedgerEntry {
  std::string id;
  std::string src;
  std::string dst;
  SlaSpec sla;
  int cluster = 0;
  ParamSet params;
  int group_index = -1;
  TransferStatus status = TransferStatus::Running;
  double throughput = 0;  // latest observed, bits/s
  double watts = 0;
};

/// Shared transfer registry: one entry per admitted transfer plus the
/// registered link capacity. Status moves only Running -> {Finished, Aborted}
/// and Running <-> SlaViolation.
class Ledger {
 public:
  explicit Ledger(double capacity) : capacity_(capacity) {}

  void add(LedgerEntry entry);
  LedgerEntry& entry(const std::string& id);          // UnknownTransfer
  const LedgerEntry& entry(const std::string& id) const;
  bool has(const std::string& id) const;
  void set_status(const std::string& id, TransferStatus next);  // ConfigError

  double capacity() const { return capacity_; }
  void set_capacity(double bw) { capacity_ = bw; }

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  std::vector<LedgerEntry>& entries() { return entries_; }

  /// One line per transfer: id src dst kind sla_val status cc p pp grp thr watts.
  std::string snapshot() const;

 private:
  double capacity_;
  std::vector<LedgerEntry> entries_;  // admission order
};

/// Global scheduler for one bottleneck link: FIFO admission with a Type-T
/// capacity gate, precise external-load accounting across request groups,
/// redistribution on completion, and one-knob micro-tuning on SLA violation.
class CentralScheduler {
 public:
  CentralScheduler(const SolutionCache& cache, double capacity,
                   ParamLimits limits = {});

  /// Dispatches admissible queued requests in FIFO order. Admitted requests
  /// are removed from the queue; gated Type-T requests stay queued.
  /// Infeasible requests are dropped and reported with a NoOp action.
  std::vector<Action> admit(std::deque<Request>& queue, double now = 0);

  /// Folds a tick of observations into the ledger: completions release
  /// capacity and trigger redistribution, SLA violations get one micro-tune
  /// step, recovered transfers return to Running.
  std::vector<Action> on_update(const TickObservation& obs);

  std::vector<Action> on_capacity_change(double new_bw, double now = 0);

  const Ledger& ledger() const { return ledger_; }
  Ledger& ledger() { return ledger_; }
  const std::vector<ResourceGroup>& groups() const { return ladder_; }

  /// Simulation hook that applies dispatched parameters and admits from the
  /// scheduler's internal queue each control period.
  SimWorld::Hook hook();
  std::deque<Request>& queue() { return queue_; }

 private:
  struct GroupKey {
    std::string src, dst;
    SlaKind kind;
    auto operator<=>(const GroupKey&) const = default;
  };

  double external_load_for(const LedgerEntry& e) const;
  double guaranteed_throughput() const;
  bool lookup_at_load(const LedgerEntry& e, double ext_load, double target,
                      Solution& out) const;
  std::vector<Action> redistribute(double now);
  Action micro_tune(LedgerEntry& e, double now);

  const SolutionCache& cache_;
  Ledger ledger_;
  ParamLimits limits_;
  std::vector<ResourceGroup> ladder_;
  std::deque<Request> queue_;
};

}  // namespace gdf

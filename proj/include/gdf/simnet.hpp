#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gdf/domain.hpp"
#include "gdf/logstore.hpp"

namespace gdf {

struct LinkSpec {
  double bandwidth = 1e9;  // bits/s
  double rtt = 0.05;       // seconds
  int64_t buffer = 8 << 20;
  double v_read = 4e9;   // bits/s
  double v_write = 4e9;  // bits/s
};

struct Workload {
  int64_t file_count = 1;
  double file_lo = 1e6;  // bytes; fixed size when lo == hi
  double file_hi = 1e6;

  double total_bytes_nominal() const {
    return static_cast<double>(file_count) * 0.5 * (file_lo + file_hi);
  }
};

/// Abstract cgroup-style cap. nic_cap 0 means uncapped.
struct ResourceGroup {
  double cpu_cap = 1.0;
  double nic_cap = 0;  // bits/s
};

/// Constants mapping per-process throughput and stream count onto synthesized
/// CPU utilization: cpu = c0 + c1 * (thr / BW) + c2 * p.
struct UtilSynthesis {
  double c0 = 0.05;
  double c1 = 0.6;
  double c2 = 0.005;
};

struct ExternalFlow {
  double start = 0;
  double end = 0;
  double rate = 0;  // bits/s
};

struct TransferObservation {
  std::string id;
  double throughput = 0;        // bits/s, goodput this tick
  double queuing_delay = 0;     // seconds
  double packet_loss_rate = 0;  // fraction
  double watts = 0;             // whole end system
  std::vector<Utilization> per_process;
  ParamSet params;
  bool active = false;
  bool finished = false;
  double bytes_done = 0;
  double bytes_total = 0;
};

struct TickObservation {
  double time = 0;  // clock at the start of the tick
  double tick = 1;  // control interval length, seconds
  std::vector<TransferObservation> transfers;
  double link_utilization = 0;
  double external_rate = 0;  // bits/s

  const TransferObservation* self(const std::string& id) const;
};

/// Deterministic mapping from per-process throughput (bits/s) and stream
/// count to a synthesized Utilization sample.
Utilization synthesize_utilization(const UtilSynthesis& util, double proc_throughput,
                                   int p, double link_bw, double cpu_cap);

struct TransferSummary {
  std::string id;
  double bytes = 0;
  double seconds = 0;  // start to finish (or to end of run)
  double joules = 0;
  double mean_throughput = 0;  // bits/s over active time
};

struct RunResult {
  std::vector<TickObservation> trace;
  LogBatch log;
  std::map<std::string, EnergyAccount> energy;
  std::vector<TransferSummary> summaries;
};

/// Deterministic discrete-event model of transfers sharing one bottleneck
/// link: per-stream slow start and AIMD probing, loss on overload, pipelining
/// gaps on the control channel, resource-group caps, and synthesized
/// utilization/power.
class SimWorld {
 public:
  using Hook = std::function<void(SimWorld&, const TickObservation&)>;

  SimWorld(LinkSpec link, uint64_t seed, double tick = 1.0);

  void add_transfer(const std::string& id, const Workload& workload,
                    const ParamSet& params, const ResourceGroup& group = {},
                    double start_time = 0);
  void add_external_flow(const ExternalFlow& flow);

  void set_power_model(const PowerModel& m) { power_ = m; }
  void set_util_synthesis(const UtilSynthesis& u) { util_ = u; }
  void set_loss_factor(double k) { loss_factor_ = k; }

  /// Advances the clock by one tick and reports per-transfer observations.
  TickObservation step();

  /// Steps until `duration`, invoking hooks after each observation.
  RunResult run(double duration, const std::vector<Hook>& hooks = {});

  void apply_params(const std::string& id, const ParamSet& params);
  void apply_group(const std::string& id, const ResourceGroup& group);

  const ParamSet& params_of(const std::string& id) const;
  const ResourceGroup& group_of(const std::string& id) const;
  bool is_finished(const std::string& id) const;
  const EnergyAccount& energy_of(const std::string& id) const;

  double clock() const { return clock_; }
  double tick_seconds() const { return tick_; }
  const LinkSpec& link() const { return link_; }
  const PowerModel& power_model() const { return power_; }
  const UtilSynthesis& util_synthesis() const { return util_; }

 private:
  struct Stream {
    double rate;       // bits/s
    bool slow_start;
  };
  struct Process {
    double file_remaining = 0;  // bytes of the file in flight
    double gap_remaining = 0;   // seconds of control-channel idleness left
  };
  struct Transfer {
    std::string id;
    Workload workload;
    ParamSet params;
    ResourceGroup group;
    double start_time = 0;
    std::vector<double> file_queue;  // remaining file sizes, back = next
    std::vector<Stream> streams;
    std::vector<Process> processes;
    double bytes_done = 0;
    double bytes_total = 0;
    bool finished = false;
    double finish_time = 0;
    double active_seconds = 0;
    EnergyAccount energy;
  };

  Transfer& find(const std::string& id);
  const Transfer& find(const std::string& id) const;
  double initial_stream_rate() const;
  void resize_streams(Transfer& t);

  LinkSpec link_;
  double tick_;
  double clock_ = 0;
  std::mt19937_64 rng_;
  std::vector<Transfer> transfers_;
  std::vector<ExternalFlow> flows_;
  PowerModel power_;
  UtilSynthesis util_;
  double loss_factor_ = 2.0;
};

}  // namespace gdf

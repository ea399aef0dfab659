#include "gdf/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gdf/errors.hpp"

namespace gdf {
namespace {

constexpr double kMss = 1500.0;  // bytes
constexpr double kEps = 1e-12;

double mss_rate(double rtt) { return kMss * 8.0 / rtt; }

}  // namespace

const TransferObservation* TickObservation::self(const std::string& id) const {
  for (const auto& t : transfers)
    if (t.id == id) return &t;
  return nullptr;
}

Utilization synthesize_utilization(const UtilSynthesis& util, double proc_throughput,
                                   int p, double link_bw, double cpu_cap) {
  Utilization u;
  const double bytes_rate = proc_throughput / 8.0;
  u.cpu = std::clamp(util.c0 + util.c1 * proc_throughput / link_bw + util.c2 * p, 0.0,
                     std::min(1.0, cpu_cap));
  u.mem = std::clamp(0.08 + 0.01 * p, 0.0, 1.0);
  u.disk_reads = bytes_rate / 65536.0;
  u.disk_writes = u.disk_reads;
  u.disk_bytes_read = bytes_rate;
  u.disk_bytes_written = bytes_rate;
  u.net_bytes_sent = bytes_rate;
  u.net_bytes_received = bytes_rate * 0.02;
  u.pkts_sent = bytes_rate / kMss;
  u.pkts_received = u.pkts_sent * 0.5;
  return u;
}

SimWorld::SimWorld(LinkSpec link, uint64_t seed, double tick)
    : link_(link), tick_(tick), rng_(seed) {
  if (tick_ <= 0) throw ConfigError("tick must be > 0");
  if (link_.bandwidth <= 0 || link_.rtt <= 0 || link_.v_read <= 0 || link_.v_write <= 0)
    throw ConfigError("link parameters must be positive");
  // Default synthetic power process: idle floor plus CPU- and NIC-driven terms.
  power_.intercept = 50.0;
  power_.coefficients[0] = 60.0;     // cpu fraction
  power_.coefficients[1] = 8.0;      // mem fraction
  power_.coefficients[4] = 4e-9;     // disk bytes read per second
  power_.coefficients[5] = 4e-9;     // disk bytes written per second
  power_.coefficients[6] = 6e-9;     // net bytes sent per second
  power_.coefficients[8] = 1e-5;     // packets sent per second
}

double SimWorld::initial_stream_rate() const { return 10.0 * mss_rate(link_.rtt); }

void SimWorld::resize_streams(Transfer& t) {
  const size_t want = static_cast<size_t>(t.params.streams());
  while (t.streams.size() > want) t.streams.pop_back();
  while (t.streams.size() < want)
    t.streams.push_back(Stream{initial_stream_rate(), true});
  t.processes.resize(static_cast<size_t>(t.params.cc));
}

void SimWorld::add_transfer(const std::string& id, const Workload& workload,
                            const ParamSet& params, const ResourceGroup& group,
                            double start_time) {
  if (!params.valid()) throw ConfigError("invalid parameters for transfer '" + id + "'");
  if (workload.file_count < 1 || workload.file_lo <= 0 || workload.file_hi < workload.file_lo)
    throw ConfigError("invalid workload for transfer '" + id + "'");
  Transfer t;
  t.id = id;
  t.workload = workload;
  t.params = params;
  t.group = group;
  t.start_time = start_time;
  t.file_queue.reserve(static_cast<size_t>(workload.file_count));
  std::uniform_real_distribution<double> size_dist(workload.file_lo, workload.file_hi);
  for (int64_t i = 0; i < workload.file_count; ++i) {
    const double sz =
        workload.file_lo == workload.file_hi ? workload.file_lo : size_dist(rng_);
    t.file_queue.push_back(sz);
    t.bytes_total += sz;
  }
  std::reverse(t.file_queue.begin(), t.file_queue.end());  // back = next file
  resize_streams(t);
  transfers_.push_back(std::move(t));
}

void SimWorld::add_external_flow(const ExternalFlow& flow) {
  if (flow.rate < 0 || flow.end < flow.start) throw ConfigError("invalid external flow");
  flows_.push_back(flow);
}

SimWorld::Transfer& SimWorld::find(const std::string& id) {
  for (auto& t : transfers_)
    if (t.id == id) return t;
  throw UnknownTransfer(id);
}

const SimWorld::Transfer& SimWorld::find(const std::string& id) const {
  for (const auto& t : transfers_)
    if (t.id == id) return t;
  throw UnknownTransfer(id);
}

void SimWorld::apply_params(const std::string& id, const ParamSet& params) {
  if (!params.valid()) throw ConfigError("invalid parameters");
  Transfer& t = find(id);
  t.params = params;
  resize_streams(t);
}

void SimWorld::apply_group(const std::string& id, const ResourceGroup& group) {
  find(id).group = group;
}

const ParamSet& SimWorld::params_of(const std::string& id) const { return find(id).params; }
const ResourceGroup& SimWorld::group_of(const std::string& id) const {
  return find(id).group;
}
bool SimWorld::is_finished(const std::string& id) const { return find(id).finished; }
const EnergyAccount& SimWorld::energy_of(const std::string& id) const {
  return find(id).energy;
}

TickObservation SimWorld::step() {
  TickObservation obs;
  obs.time = clock_;
  obs.tick = tick_;

  double ext = 0;
  for (const auto& f : flows_)
    if (f.start <= clock_ && clock_ < f.end) ext += f.rate;
  const double ext_served = std::min(ext, link_.bandwidth);
  obs.external_rate = ext_served;

  std::vector<Transfer*> active;
  size_t total_streams = 0;
  for (auto& t : transfers_) {
    if (!t.finished && t.start_time <= clock_) {
      active.push_back(&t);
      total_streams += t.streams.size();
    }
  }

  const double fair =
      std::max(mss_rate(link_.rtt),
               (link_.bandwidth - ext_served) / std::max<size_t>(1, total_streams));
  const double rtt_per_tick = tick_ / link_.rtt;

  // Per-stream slow start / additive probing.
  for (Transfer* t : active) {
    const double window_cap = static_cast<double>(t->params.bs) * 8.0 / link_.rtt;
    for (auto& s : t->streams) {
      if (s.slow_start) {
        s.rate *= std::exp2(std::min(rtt_per_tick, 60.0));
        if (s.rate >= fair) {
          s.rate = fair;
          s.slow_start = false;
        }
      } else {
        s.rate += mss_rate(link_.rtt) * rtt_per_tick;  // one MSS per RTT
      }
      s.rate = std::min(s.rate, window_cap);
    }
  }

  // Offered load, loss regime, and proportional allocation.
  std::vector<double> desired(active.size(), 0.0);
  double desired_sum = 0;
  for (size_t i = 0; i < active.size(); ++i) {
    Transfer* t = active[i];
    double want = 0;
    for (const auto& s : t->streams) want += s.rate;
    double cap = std::min({link_.bandwidth, link_.v_read, link_.v_write});
    if (t->group.nic_cap > 0) cap = std::min(cap, t->group.nic_cap);
    const double per_proc_cpu =
        (t->group.cpu_cap - util_.c0 - util_.c2 * t->params.p) / util_.c1;
    if (per_proc_cpu < 1.0)
      cap = std::min(cap, std::max(0.0, per_proc_cpu) * link_.bandwidth * t->params.cc);
    desired[i] = std::min(want, cap);
    desired_sum += desired[i];
  }

  const double overload =
      std::max(0.0, desired_sum + ext - link_.bandwidth) / link_.bandwidth;
  const double plr = overload > 0 ? std::min(1.0, loss_factor_ * overload) : 0.0;
  const double avail = std::max(0.0, link_.bandwidth - ext_served);
  const double scale = desired_sum > avail && desired_sum > 0 ? avail / desired_sum : 1.0;
  const double qd = link_.rtt * (1.0 + overload);

  // Loss events halve stream rates and end slow start.
  if (plr > 0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Transfer* t : active)
      for (auto& s : t->streams)
        if (unit(rng_) < plr) {
          s.rate = std::max(mss_rate(link_.rtt), 0.5 * s.rate);
          s.slow_start = false;
        }
  }

  // Post-congestion recovery: once the link has headroom again, starved
  // streams re-enter slow start instead of probing one MSS per RTT.
  if (plr == 0.0) {
    for (Transfer* t : active)
      for (auto& s : t->streams)
        if (s.rate < 0.5 * fair) s.slow_start = true;
  }

  double moved_bits_sum = 0;
  for (size_t i = 0; i < active.size(); ++i) {
    Transfer* t = active[i];
    const double goodput = desired[i] * scale * (1.0 - plr);
    const int cc = t->params.cc;
    const double r_bytes = goodput / cc / 8.0;

    TransferObservation to;
    to.id = t->id;
    to.params = t->params;
    to.active = true;
    to.queuing_delay = qd;
    to.packet_loss_rate = plr;
    to.bytes_total = t->bytes_total;

    double busy_end = 0;
    double moved_total = 0;
    for (auto& proc : t->processes) {
      double time_left = tick_;
      double moved = 0;
      while (time_left > kEps) {
        if (proc.gap_remaining > kEps) {
          const double g = std::min(proc.gap_remaining, time_left);
          proc.gap_remaining -= g;
          time_left -= g;
          continue;
        }
        if (proc.file_remaining <= 0) {
          if (t->file_queue.empty()) break;
          proc.file_remaining = t->file_queue.back();
          t->file_queue.pop_back();
        }
        if (r_bytes <= 0) break;
        const double dt = std::min(time_left, proc.file_remaining / r_bytes);
        proc.file_remaining -= r_bytes * dt;
        moved += r_bytes * dt;
        time_left -= dt;
        if (proc.file_remaining <= 1e-6) {
          proc.file_remaining = 0;
          // One-RTT control-channel gap between files unless requests are
          // pipelined.
          if (!t->file_queue.empty() && t->params.pp == 1)
            proc.gap_remaining = link_.rtt;
        }
      }
      busy_end = std::max(busy_end, tick_ - time_left);
      moved_total += moved;

      to.per_process.push_back(synthesize_utilization(
          util_, moved * 8.0 / tick_, t->params.p, link_.bandwidth, t->group.cpu_cap));
    }
    t->bytes_done += moved_total;
    t->active_seconds += tick_;
    moved_bits_sum += moved_total * 8.0;
    to.throughput = moved_total * 8.0 / tick_;
    to.bytes_done = t->bytes_done;

    bool done = t->file_queue.empty();
    for (const auto& proc : t->processes)
      if (proc.file_remaining > 0) done = false;
    if (done) {
      t->finished = true;
      t->finish_time = clock_ + busy_end;
      to.finished = true;
      t->active_seconds += busy_end - tick_;  // only the busy part of this tick
    }

    double watts = power_.intercept;
    PowerModel no_intercept = power_;
    no_intercept.intercept = 0;
    for (const auto& u : to.per_process) watts += predict_power(no_intercept, u);
    to.watts = watts;
    // Piecewise-constant power; duplicated endpoints keep the trapezoidal
    // integral equal to the per-tick rectangle sum.
    t->energy.watt_samples.emplace_back(clock_, watts);
    t->energy.watt_samples.emplace_back(clock_ + tick_, watts);
    t->energy.joules_total += watts * tick_;
    t->energy.data_bytes += moved_total;

    obs.transfers.push_back(std::move(to));
  }

  for (const auto& t : transfers_) {
    if (t.finished && std::none_of(obs.transfers.begin(), obs.transfers.end(),
                                   [&](const TransferObservation& o) { return o.id == t.id; })) {
      TransferObservation to;
      to.id = t.id;
      to.params = t.params;
      to.finished = true;
      to.bytes_done = t.bytes_done;
      to.bytes_total = t.bytes_total;
      obs.transfers.push_back(std::move(to));
    }
  }

  obs.link_utilization =
      (moved_bits_sum / tick_ + ext_served) / link_.bandwidth;
  clock_ += tick_;
  return obs;
}

RunResult SimWorld::run(double duration, const std::vector<Hook>& hooks) {
  if (duration <= 0) throw ConfigError("duration must be > 0");
  RunResult result;
  result.log.provenance = "simnet";
  const auto ticks = static_cast<int64_t>(std::ceil(duration / tick_ - kEps));
  for (int64_t i = 0; i < ticks; ++i) {
    TickObservation obs = step();
    for (const auto& to : obs.transfers) {
      if (!to.active) continue;
      const Transfer& t = find(to.id);
      TransferLogRecord rec;
      rec.timestamp = obs.time;
      rec.transfer_id = to.id;
      rec.interval = tick_;
      rec.rtt = link_.rtt;
      rec.bandwidth = static_cast<int64_t>(link_.bandwidth);
      rec.queuing_delay = to.queuing_delay;
      rec.packet_loss_rate = to.packet_loss_rate;
      rec.params = to.params;
      rec.dataset.total_bytes = static_cast<int64_t>(t.bytes_total);
      rec.dataset.file_count = t.workload.file_count;
      rec.dataset.mean_file_bytes =
          t.bytes_total / static_cast<double>(t.workload.file_count);
      for (const auto& u : to.per_process) {
        rec.utilization.cpu += u.cpu / to.per_process.size();
        rec.utilization.mem += u.mem / to.per_process.size();
        rec.utilization.disk_reads += u.disk_reads;
        rec.utilization.disk_writes += u.disk_writes;
        rec.utilization.disk_bytes_read += u.disk_bytes_read;
        rec.utilization.disk_bytes_written += u.disk_bytes_written;
        rec.utilization.net_bytes_sent += u.net_bytes_sent;
        rec.utilization.net_bytes_received += u.net_bytes_received;
        rec.utilization.pkts_sent += u.pkts_sent;
        rec.utilization.pkts_received += u.pkts_received;
      }
      rec.achieved_throughput = to.throughput;
      rec.measured_power = to.watts;
      result.log.records.push_back(std::move(rec));
    }
    for (const auto& hook : hooks) hook(*this, obs);
    result.trace.push_back(std::move(obs));
  }

  std::stable_sort(result.log.records.begin(), result.log.records.end(),
                   [](const TransferLogRecord& a, const TransferLogRecord& b) {
                     if (a.transfer_id != b.transfer_id) return a.transfer_id < b.transfer_id;
                     return a.timestamp < b.timestamp;
                   });

  for (const auto& t : transfers_) {
    result.energy[t.id] = t.energy;
    TransferSummary s;
    s.id = t.id;
    s.bytes = t.bytes_done;
    s.seconds = t.finished ? t.finish_time - t.start_time
                           : std::max(tick_, clock_ - t.start_time);
    s.joules = t.energy.joules_total;
    s.mean_throughput = s.seconds > 0 ? s.bytes * 8.0 / s.seconds : 0;
    result.summaries.push_back(std::move(s));
  }
  return result;
}

}  // namespace gdf

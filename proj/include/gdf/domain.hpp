#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace gdf {

/// Application-level transfer knobs: concurrency (server processes),
/// parallelism (streams per process), pipelining depth, buffer size.
struct ParamSet {
  int cc = 1;
  int p = 1;
  int pp = 1;
  int64_t bs = 1;

  int streams() const { return cc * p; }
  bool valid() const { return cc >= 1 && p >= 1 && pp >= 1 && bs > 0; }
  bool operator==(const ParamSet&) const = default;
};

/// User caps and AIMD constants for the online controllers.
struct ParamLimits {
  int cc_limit = 8;
  int p_limit = 8;
  int pp_max = 16;
  int alpha_cc = 1;
  int alpha_p = 1;
  double beta1 = 0.75;
  double beta2 = 0.75;

  bool valid() const {
    return cc_limit >= 1 && p_limit >= 1 && pp_max >= 1 && alpha_cc >= 1 &&
           alpha_p >= 1 && beta1 > 0 && beta1 < 1 && beta2 > 0 && beta2 < 1;
  }
};

/// One end-system resource sample. Field order doubles as the power-model
/// feature order.
struct Utilization {
  double cpu = 0;                 // fraction [0,1]
  double mem = 0;                 // fraction [0,1]
  double disk_reads = 0;          // count/s
  double disk_writes = 0;         // count/s
  double disk_bytes_read = 0;     // bytes/s
  double disk_bytes_written = 0;  // bytes/s
  double net_bytes_sent = 0;      // bytes/s
  double net_bytes_received = 0;  // bytes/s
  double pkts_sent = 0;           // count/s
  double pkts_received = 0;       // count/s

  static constexpr int kFeatures = 10;
  std::array<double, kFeatures> features() const {
    return {cpu,  mem,  disk_reads, disk_writes, disk_bytes_read, disk_bytes_written,
            net_bytes_sent, net_bytes_received, pkts_sent, pkts_received};
  }
};

/// Affine instantaneous-power model over the Utilization features.
/// The intercept carries the static/idle component and is counted once per
/// end system, not once per process.
struct PowerModel {
  std::array<double, Utilization::kFeatures> coefficients{};
  double intercept = 0;  // watts

  void save(std::ostream& os) const;
  static PowerModel load(std::istream& is);
};

/// Predicted instantaneous power, clamped at zero.
double predict_power(const PowerModel& model, const Utilization& u);

/// Least-squares affine fit. Throws DegenerateDesign when the sample set is
/// too small or insufficiently varied.
PowerModel fit_power_model(const std::vector<std::pair<Utilization, double>>& samples);

struct EnergyAccount {
  double joules_total = 0;
  std::vector<std::pair<double, double>> watt_samples;  // (time s, watts)
  double data_bytes = 0;

  double efficiency() const { return joules_total > 0 ? data_bytes / joules_total : 0; }
};

/// Trapezoidal integral of (time, watts) samples.
double integrate_watts(const std::vector<std::pair<double, double>>& samples);

/// End-system energy over concurrent processes sharing one sampling grid of
/// spacing dt: at each instant power is the intercept plus the per-process
/// feature terms, energy is the trapezoidal time integral.
EnergyAccount total_energy(const std::vector<std::vector<Utilization>>& processes,
                           const PowerModel& model, double dt);

enum class SlaKind { ThroughputGuarantee, TotalEnergyCap, InstantPowerCap };

char sla_kind_char(SlaKind kind);          // 'T' / 'E' / 'P'
SlaKind sla_kind_from_char(char c);

struct SlaSpec {
  SlaKind kind = SlaKind::ThroughputGuarantee;
  double value = 0;    // bits/s, joules, or watts depending on kind
  double epsilon = 0;  // throughput tolerance, bits/s

  bool valid() const { return value > 0 && epsilon >= 0; }
};

}  // namespace gdf

#pragma once

#include <compare>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gdf/cluster.hpp"
#include "gdf/domain.hpp"
#include "gdf/logstore.hpp"
#include "gdf/spline.hpp"

namespace gdf {

/// Decomposition of the link bandwidth not available to the managed transfer:
/// known contenders, estimated unknown traffic, and the slow-start and
/// congestion deficits, all expressed as mean rates over the window.
struct ExternalLoadEstimate {
  double known = 0;            // bits/s
  double unknown = 0;          // bits/s
  double slow_start_loss = 0;  // bits/s
  double congestion_loss = 0;  // bits/s
};

ExternalLoadEstimate estimate_external_load(std::span<const TransferLogRecord> window,
                                            double bw, double known);

struct SlaPartition {
  SlaKind kind = SlaKind::ThroughputGuarantee;
  std::vector<double> levels;  // partition midpoints, strictly increasing
  double feasible_min = 0;
  double feasible_max = 0;
};

/// Feasible range from the historical quantity for the kind (throughput /
/// per-transfer energy / peak power), split into k equal-width partitions.
SlaPartition partition_sla(const LogBatch& batch, SlaKind kind, int k);

struct Solution {
  ParamSet params;
  double predicted_T = 0;  // bits/s
  double predicted_E = 0;  // joules
};

struct SolveOptions {
  double peak_factor = 1.25;  // peak-to-mean power ratio for Type-P
  double avail_bw = 0;        // >0 caps predicted throughput (external load)
};

/// Exhaustive search of the integer parameter grid against both interpolants.
/// Throws Infeasible when no grid point satisfies the SLA.
Solution solve_sla(const Surface& throughput, const Surface& energy, const SlaSpec& sla,
                   const ParamLimits& limits, const SolveOptions& opts = {});

enum class LoadBucket { Low, Median, High };
char bucket_char_lo_md_hi(LoadBucket b);  // serialized as lo / md / hi

struct CacheKey {
  int cluster = 0;
  SlaKind kind = SlaKind::ThroughputGuarantee;
  int level = 0;
  LoadBucket bucket = LoadBucket::Median;

  auto operator<=>(const CacheKey&) const = default;
};

struct OfflineCostReport {
  double analysis_joules = 0;   // charged deterministically per grid evaluation
  double analysis_seconds = 0;
  int64_t amortization_count = 0;  // transfers served from this cache
};

/// Precomputed optimal parameters per (cluster, SLA kind, level, load bucket),
/// plus the partitioning and bucket thresholds needed to form keys online.
class SolutionCache {
 public:
  struct ClusterBuckets {
    double tercile_lo = 0;   // loads below this are Low
    double tercile_hi = 0;   // loads above this are High
    double load[3] = {0, 0, 0};  // representative unknown load per bucket
  };

  void insert(const CacheKey& key, const Solution& sol);
  void mark_infeasible(const CacheKey& key);
  const Solution& lookup(const CacheKey& key) const;  // Infeasible / UnknownKey
  bool contains(const CacheKey& key) const { return entries_.contains(key); }
  size_t size() const { return entries_.size(); }

  void set_partition(const SlaPartition& part) { partitions_[part.kind] = part; }
  const SlaPartition& partition(SlaKind kind) const;
  /// Level whose midpoint is closest to the target value, clamped to range.
  int level_for_value(SlaKind kind, double value) const;

  void set_buckets(int cluster, const ClusterBuckets& b) { buckets_[cluster] = b; }
  LoadBucket bucket_for_load(int cluster, double load) const;
  const ClusterBuckets& buckets(int cluster) const;

  OfflineCostReport& cost() { return cost_; }
  const OfflineCostReport& cost() const { return cost_; }

  void save(std::ostream& os) const;
  static SolutionCache load(std::istream& is);

  const std::map<CacheKey, Solution>& entries() const { return entries_; }

 private:
  std::map<CacheKey, Solution> entries_;
  std::set<CacheKey> infeasible_;
  std::map<SlaKind, SlaPartition> partitions_;
  std::map<int, ClusterBuckets> buckets_;
  OfflineCostReport cost_;
};

struct AnalyzeConfig {
  int max_clusters = 4;
  int sla_levels = 10;
  ParamLimits limits;
  double peak_factor = 1.25;
  double analysis_watts = 50.0;        // watts charged to offline analysis
  double seconds_per_eval = 2e-6;      // deterministic cost accounting
  double link_bw = 0;                  // 0: use the max bandwidth seen in logs
};

struct AnalyzeOutput {
  LogBatch cleaned;
  ClusterModel clusters;
  SolutionCache cache;
};

/// Full offline pipeline: clean, estimate external load, cluster, fit
/// surfaces, partition SLA ranges, and solve every (cluster, kind, level,
/// bucket) combination into the cache.
AnalyzeOutput analyze(const LogBatch& batch, const AnalyzeConfig& config);

}  // namespace gdf

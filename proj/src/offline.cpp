#include "gdf/offline.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "gdf/errors.hpp"
#include "text_util.hpp"

namespace gdf {

ExternalLoadEstimate estimate_external_load(std::span<const TransferLogRecord> window,
                                            double bw, double known) {
  if (window.empty() || bw <= 0) throw ConfigError("empty window or non-positive bw");
  ExternalLoadEstimate est;
  est.known = known;

  double duration = 0, thr_time = 0;
  double plateau = 0;
  for (const auto& r : window) {
    duration += r.interval;
    thr_time += r.achieved_throughput * r.interval;
    plateau = std::max(plateau, r.achieved_throughput);
  }
  if (duration <= 0) return est;
  const double mean_thr = thr_time / duration;

  // Slow-start deficit: shortfall below the plateau over the initial ramp.
  double ss = 0;
  for (const auto& r : window) {
    if (r.achieved_throughput >= 0.95 * plateau) break;
    ss += (plateau - r.achieved_throughput) * r.interval;
  }
  est.slow_start_loss = ss / duration;

  // Congestion deficit: throughput drops coinciding with loss-rate spikes.
  std::vector<double> plrs;
  plrs.reserve(window.size());
  for (const auto& r : window) plrs.push_back(r.packet_loss_rate);
  std::nth_element(plrs.begin(), plrs.begin() + plrs.size() / 2, plrs.end());
  const double median_plr = plrs[plrs.size() / 2];
  double cong = 0;
  for (size_t i = 1; i < window.size(); ++i) {
    const double plr = window[i].packet_loss_rate;
    if (plr > 0 && plr >= 2.0 * median_plr) {
      cong += std::max(0.0, window[i - 1].achieved_throughput -
                                window[i].achieved_throughput) *
              window[i].interval;
    }
  }
  est.congestion_loss = cong / duration;

  est.unknown = std::max(
      0.0, bw - mean_thr - known - est.slow_start_loss - est.congestion_loss);
  return est;
}

SlaPartition partition_sla(const LogBatch& batch, SlaKind kind, int k) {
  if (k < 1) throw ConfigError("partition count must be >= 1");
  std::vector<double> values;
  if (kind == SlaKind::ThroughputGuarantee) {
    for (const auto& r : batch.records)
      if (!std::isnan(r.achieved_throughput)) values.push_back(r.achieved_throughput);
  } else {
    // Per-transfer energy or peak power.
    size_t begin = 0;
    while (begin < batch.records.size()) {
      size_t end = begin + 1;
      while (end < batch.records.size() &&
             batch.records[end].transfer_id == batch.records[begin].transfer_id)
        ++end;
      // Full-dataset energy estimate per record (power * dataset bits /
      // throughput), averaged per transfer; the same definition the energy
      // surface is fitted on, so partition levels match its predictions.
      double joules_sum = 0, peak = 0;
      int joules_n = 0;
      bool any = false;
      for (size_t i = begin; i < end; ++i) {
        const auto& r = batch.records[i];
        if (std::isnan(r.measured_power)) continue;
        if (r.achieved_throughput > 0 && r.dataset.total_bytes > 0) {
          joules_sum += r.measured_power *
                        (static_cast<double>(r.dataset.total_bytes) * 8.0 /
                         r.achieved_throughput);
          ++joules_n;
        }
        peak = std::max(peak, r.measured_power);
        any = true;
      }
      if (kind == SlaKind::TotalEnergyCap) {
        if (joules_n > 0) values.push_back(joules_sum / joules_n);
      } else if (any) {
        values.push_back(peak);
      }
      begin = end;
    }
  }
  if (values.empty()) throw NoHistory("batch has no samples for the requested SLA kind");

  SlaPartition part;
  part.kind = kind;
  part.feasible_min = *std::min_element(values.begin(), values.end());
  part.feasible_max = *std::max_element(values.begin(), values.end());
  const double width = (part.feasible_max - part.feasible_min) / k;
  if (width <= 0) {
    part.levels = {0.5 * (part.feasible_min + part.feasible_max)};
    return part;
  }
  for (int i = 0; i < k; ++i)
    part.levels.push_back(part.feasible_min + width * (i + 0.5));
  return part;
}

namespace {

struct Candidate {
  ParamSet params;
  double thr = 0;     // bits/s, after any external-load cap
  double energy = 0;  // joules
  double peak_watts = 0;
};

Candidate evaluate(const Surface& thr_surface, const Surface& energy_surface,
                   const ParamSet& params, const SolveOptions& opts) {
  Candidate c;
  c.params = params;
  const SliceKey key{params.pp, params.bs};
  const double t_raw = std::max(1.0, thr_surface.eval(key, params.cc, params.p));
  c.thr = t_raw;
  if (opts.avail_bw > 0) c.thr = std::min(t_raw, std::max(1.0, opts.avail_bw));
  double e = std::max(0.0, energy_surface.eval(key, params.cc, params.p));
  // A capped transfer runs longer at the same power.
  e *= t_raw / c.thr;
  c.energy = e;
  const double ref = thr_surface.ref_bytes();
  if (ref > 0) {
    const double duration = ref * 8.0 / c.thr;
    c.peak_watts = opts.peak_factor * c.energy / duration;
  }
  return c;
}

bool feasible(const Candidate& c, const SlaSpec& sla) {
  switch (sla.kind) {
    case SlaKind::ThroughputGuarantee: return c.thr >= sla.value;
    case SlaKind::TotalEnergyCap: return c.energy <= sla.value;
    case SlaKind::InstantPowerCap: return c.peak_watts <= sla.value;
  }
  return false;
}

// true when a improves on b for the SLA objective; exact objective ties fall
// back to smaller stream count, then smaller cc / p / pp / bs.
bool better(const Candidate& a, const Candidate& b, SlaKind kind) {
  const double oa = kind == SlaKind::ThroughputGuarantee ? a.energy : -a.thr;
  const double ob = kind == SlaKind::ThroughputGuarantee ? b.energy : -b.thr;
  if (oa != ob) return oa < ob;
  auto rank = [](const ParamSet& p) {
    return std::make_tuple(p.streams(), p.cc, p.p, p.pp, p.bs);
  };
  return rank(a.params) < rank(b.params);
}

}  // namespace

Solution solve_sla(const Surface& throughput, const Surface& energy, const SlaSpec& sla,
                   const ParamLimits& limits, const SolveOptions& opts) {
  if (!limits.valid()) throw ConfigError("invalid parameter limits");
  bool found = false;
  Candidate best;
  for (const auto& [key, slice] : throughput.slices()) {
    if (key.first > limits.pp_max) continue;
    if (!energy.slices().contains(key)) continue;
    for (int cc = 1; cc <= limits.cc_limit; ++cc) {
      for (int p = 1; p <= limits.p_limit; ++p) {
        Candidate c = evaluate(throughput, energy,
                               ParamSet{cc, p, key.first, key.second}, opts);
        if (!feasible(c, sla)) continue;
        if (!found || better(c, best, sla.kind)) {
          best = c;
          found = true;
        }
      }
    }
  }
  if (!found) throw Infeasible("no grid point satisfies the SLA");
  return Solution{best.params, best.thr, best.energy};
}

char bucket_char_lo_md_hi(LoadBucket b) {
  switch (b) {
    case LoadBucket::Low: return 'l';
    case LoadBucket::Median: return 'm';
    case LoadBucket::High: return 'h';
  }
  return '?';
}

namespace {

std::string bucket_token(LoadBucket b) {
  switch (b) {
    case LoadBucket::Low: return "lo";
    case LoadBucket::Median: return "md";
    case LoadBucket::High: return "hi";
  }
  return "??";
}

LoadBucket bucket_from_token(const std::string& s, size_t line_no) {
  if (s == "lo") return LoadBucket::Low;
  if (s == "md") return LoadBucket::Median;
  if (s == "hi") return LoadBucket::High;
  throw ParseError(line_no, "unknown bucket '" + s + "'");
}

}  // namespace

void SolutionCache::insert(const CacheKey& key, const Solution& sol) {
  entries_[key] = sol;
  infeasible_.erase(key);
}

void SolutionCache::mark_infeasible(const CacheKey& key) {
  infeasible_.insert(key);
  entries_.erase(key);
}

const Solution& SolutionCache::lookup(const CacheKey& key) const {
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second;
  if (infeasible_.contains(key))
    throw Infeasible("cluster=" + std::to_string(key.cluster) + " kind=" +
                     sla_kind_char(key.kind) + " level=" + std::to_string(key.level));
  throw UnknownKey("cluster=" + std::to_string(key.cluster) + " kind=" +
                   sla_kind_char(key.kind) + " level=" + std::to_string(key.level));
}

const SlaPartition& SolutionCache::partition(SlaKind kind) const {
  auto it = partitions_.find(kind);
  if (it == partitions_.end())
    throw UnknownKey(std::string("no partition for kind ") + sla_kind_char(kind));
  return it->second;
}

int SolutionCache::level_for_value(SlaKind kind, double value) const {
  const auto& part = partition(kind);
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < part.levels.size(); ++i) {
    const double d = std::abs(part.levels[i] - value);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

LoadBucket SolutionCache::bucket_for_load(int cluster, double load) const {
  const auto& b = buckets(cluster);
  if (load < b.tercile_lo) return LoadBucket::Low;
  if (load > b.tercile_hi) return LoadBucket::High;
  return LoadBucket::Median;
}

const SolutionCache::ClusterBuckets& SolutionCache::buckets(int cluster) const {
  auto it = buckets_.find(cluster);
  if (it == buckets_.end())
    throw UnknownKey("no bucket thresholds for cluster " + std::to_string(cluster));
  return it->second;
}

void SolutionCache::save(std::ostream& os) const {
  using text::fmt_double;
  for (const auto& [key, sol] : entries_) {
    os << "cluster=" << key.cluster << " kind=" << sla_kind_char(key.kind)
       << " level=" << key.level << " bucket=" << bucket_token(key.bucket)
       << " cc=" << sol.params.cc << " p=" << sol.params.p << " pp=" << sol.params.pp
       << " bs=" << sol.params.bs << " predT=" << fmt_double(sol.predicted_T)
       << " predE=" << fmt_double(sol.predicted_E) << '\n';
  }
  for (const auto& key : infeasible_) {
    os << "#infeasible cluster=" << key.cluster << " kind=" << sla_kind_char(key.kind)
       << " level=" << key.level << " bucket=" << bucket_token(key.bucket) << '\n';
  }
  for (const auto& [kind, part] : partitions_) {
    os << "#partition kind=" << sla_kind_char(kind)
       << " min=" << fmt_double(part.feasible_min)
       << " max=" << fmt_double(part.feasible_max) << " levels=";
    for (size_t i = 0; i < part.levels.size(); ++i) {
      if (i) os << ',';
      os << fmt_double(part.levels[i]);
    }
    os << '\n';
  }
  for (const auto& [cluster, b] : buckets_) {
    os << "#buckets cluster=" << cluster << " lo=" << fmt_double(b.tercile_lo)
       << " hi=" << fmt_double(b.tercile_hi) << " l0=" << fmt_double(b.load[0])
       << " l1=" << fmt_double(b.load[1]) << " l2=" << fmt_double(b.load[2]) << '\n';
  }
  os << "#cost joules=" << fmt_double(cost_.analysis_joules)
     << " seconds=" << fmt_double(cost_.analysis_seconds)
     << " served=" << cost_.amortization_count << '\n';
}

SolutionCache SolutionCache::load(std::istream& is) {
  SolutionCache cache;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto key_of = [&](const text::KvLine& kv) {
      return CacheKey{static_cast<int>(kv.integer("cluster")),
                      sla_kind_from_char(kv.str("kind")[0]),
                      static_cast<int>(kv.integer("level")),
                      bucket_from_token(kv.str("bucket"), line_no)};
    };
    if (line[0] != '#') {
      text::KvLine kv(line, line_no);
      Solution sol;
      sol.params = {static_cast<int>(kv.integer("cc")), static_cast<int>(kv.integer("p")),
                    static_cast<int>(kv.integer("pp")), kv.integer("bs")};
      sol.predicted_T = kv.num("predT");
      sol.predicted_E = kv.num("predE");
      cache.insert(key_of(kv), sol);
      continue;
    }
    auto sp = line.find(' ');
    const std::string tag = line.substr(1, sp == std::string::npos ? std::string::npos : sp - 1);
    const std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
    text::KvLine kv(rest, line_no);
    if (tag == "infeasible") {
      cache.mark_infeasible(key_of(kv));
    } else if (tag == "partition") {
      SlaPartition part;
      part.kind = sla_kind_from_char(kv.str("kind")[0]);
      part.feasible_min = kv.num("min");
      part.feasible_max = kv.num("max");
      for (const auto& tok : text::split(kv.str("levels"), ','))
        part.levels.push_back(text::parse_double(tok, line_no));
      cache.set_partition(part);
    } else if (tag == "buckets") {
      ClusterBuckets b;
      b.tercile_lo = kv.num("lo");
      b.tercile_hi = kv.num("hi");
      b.load[0] = kv.num("l0");
      b.load[1] = kv.num("l1");
      b.load[2] = kv.num("l2");
      cache.set_buckets(static_cast<int>(kv.integer("cluster")), b);
    } else if (tag == "cost") {
      cache.cost_.analysis_joules = kv.num("joules");
      cache.cost_.analysis_seconds = kv.num("seconds");
      cache.cost_.amortization_count = kv.integer("served");
    } else {
      throw ParseError(line_no, "unknown trailer '" + tag + "'");
    }
  }
  return cache;
}

AnalyzeOutput analyze(const LogBatch& batch, const AnalyzeConfig& config) {
  AnalyzeOutput out;
  double link_bw = config.link_bw;
  if (link_bw <= 0)
    for (const auto& r : batch.records)
      link_bw = std::max(link_bw, static_cast<double>(r.bandwidth));
  out.cleaned = clean(batch, link_bw);
  out.clusters = cluster_logs(out.cleaned, config.max_clusters);

  for (SlaKind kind : {SlaKind::ThroughputGuarantee, SlaKind::TotalEnergyCap,
                       SlaKind::InstantPowerCap})
    out.cache.set_partition(partition_sla(out.cleaned, kind, config.sla_levels));

  int64_t evals = 0;
  for (const auto& cluster : out.clusters.clusters) {
    std::vector<TransferLogRecord> members;
    members.reserve(cluster.member_records.size());
    for (size_t i : cluster.member_records) members.push_back(out.cleaned.records[i]);

    Surface thr_surface, energy_surface;
    try {
      thr_surface = Surface::fit(members, SurfaceKind::Throughput);
      energy_surface = Surface::fit(members, SurfaceKind::Energy);
    } catch (const InsufficientGrid&) {
      continue;  // cluster lacks a fittable grid; its keys stay unknown
    }

    // Per-transfer unknown-load estimates, split into terciles.
    std::vector<double> loads;
    size_t begin = 0;
    while (begin < members.size()) {
      size_t end = begin + 1;
      while (end < members.size() &&
             members[end].transfer_id == members[begin].transfer_id)
        ++end;
      std::span<const TransferLogRecord> window(members.data() + begin, end - begin);
      loads.push_back(estimate_external_load(
                          window, static_cast<double>(window.front().bandwidth), 0)
                          .unknown);
      begin = end;
    }
    std::sort(loads.begin(), loads.end());
    SolutionCache::ClusterBuckets buckets;
    const size_t n = loads.size();
    const size_t t1 = n / 3, t2 = 2 * n / 3;
    buckets.tercile_lo = loads[std::min(t1, n - 1)];
    buckets.tercile_hi = loads[std::min(t2, n - 1)];
    auto segment_mean = [&](size_t lo, size_t hi) {
      if (hi <= lo) return loads[std::min(lo, n - 1)];
      double s = 0;
      for (size_t i = lo; i < hi; ++i) s += loads[i];
      return s / static_cast<double>(hi - lo);
    };
    buckets.load[0] = segment_mean(0, std::max<size_t>(t1, 1));
    buckets.load[1] = segment_mean(t1, std::max(t2, t1 + 1));
    buckets.load[2] = segment_mean(t2, std::max(n, t2 + 1));
    out.cache.set_buckets(cluster.id, buckets);

    const double cluster_bw = cluster.centroid[2];
    for (SlaKind kind : {SlaKind::ThroughputGuarantee, SlaKind::TotalEnergyCap,
                         SlaKind::InstantPowerCap}) {
      const auto& part = out.cache.partition(kind);
      for (size_t level = 0; level < part.levels.size(); ++level) {
        for (LoadBucket bucket :
             {LoadBucket::Low, LoadBucket::Median, LoadBucket::High}) {
          SolveOptions opts;
          opts.peak_factor = config.peak_factor;
          opts.avail_bw =
              std::max(1.0, cluster_bw - buckets.load[static_cast<int>(bucket)]);
          const CacheKey key{cluster.id, kind, static_cast<int>(level), bucket};
          evals += static_cast<int64_t>(config.limits.cc_limit) *
                   config.limits.p_limit *
                   static_cast<int64_t>(thr_surface.slices().size());
          try {
            out.cache.insert(key,
                             solve_sla(thr_surface, energy_surface,
                                       SlaSpec{kind, part.levels[level], 0}, config.limits,
                                       opts));
          } catch (const Infeasible&) {
            out.cache.mark_infeasible(key);
          }
        }
      }
    }
  }

  auto& cost = out.cache.cost();
  cost.analysis_seconds = static_cast<double>(evals) * config.seconds_per_eval;
  cost.analysis_joules = cost.analysis_seconds * config.analysis_watts;
  cost.amortization_count = 0;
  return out;
}

}  // namespace gdf

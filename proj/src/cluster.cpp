#include "gdf/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gdf/errors.hpp"

namespace gdf {
namespace {

constexpr ClusterFeatures kWeights = {4.0, 3.0, 2.0, 1.0, 1.0};

struct Observation {
  ClusterFeatures mean{};    // standardized, weighted
  ClusterFeatures raw{};     // raw feature means
  double n = 0;              // record count
  std::vector<size_t> records;
  size_t lowest = 0;         // lowest member record index, for tie-breaks
};

// Squared Ward merge cost between two weighted clusters.
double ward_cost(const Observation& a, const Observation& b) {
  double d2 = 0;
  for (size_t f = 0; f < a.mean.size(); ++f) {
    const double d = a.mean[f] - b.mean[f];
    d2 += d * d;
  }
  return 2.0 * a.n * b.n / (a.n + b.n) * d2;
}

}  // namespace

ClusterFeatures record_features(const TransferLogRecord& r) {
  const double bw = static_cast<double>(r.bandwidth);
  double load = 0;
  if (bw > 0) load = std::clamp(1.0 - r.achieved_throughput / bw, 0.0, 1.0);
  return {std::log10(std::max(1.0, r.dataset.mean_file_bytes)), r.rtt, bw,
          static_cast<double>(r.params.bs), load};
}

int ClusterModel::nearest(const ClusterFeatures& raw) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& c : clusters) {
    double d2 = 0;
    for (size_t f = 0; f < raw.size(); ++f) {
      const double s = feature_std[f] > 0 ? feature_std[f] : 1.0;
      const double d = kWeights[f] * (raw[f] - c.centroid[f]) / s;
      d2 += d * d;
    }
    if (d2 < best_d) {
      best_d = d2;
      best = c.id;
    }
  }
  if (best < 0) throw NoHistory("cluster model is empty");
  return best;
}

ClusterModel cluster_logs(const LogBatch& batch, int max_clusters) {
  if (batch.records.empty()) throw EmptyBatch();
  if (max_clusters < 1) throw ConfigError("max_clusters must be >= 1");

  ClusterModel model;
  std::vector<ClusterFeatures> feats(batch.records.size());
  for (size_t i = 0; i < batch.records.size(); ++i) feats[i] = record_features(batch.records[i]);

  for (size_t f = 0; f < kWeights.size(); ++f) {
    double sum = 0, sq = 0;
    for (const auto& v : feats) {
      sum += v[f];
      sq += v[f] * v[f];
    }
    const double n = static_cast<double>(feats.size());
    model.feature_mean[f] = sum / n;
    const double var = std::max(0.0, sq / n - model.feature_mean[f] * model.feature_mean[f]);
    model.feature_std[f] = std::sqrt(var);
  }

  // One observation per transfer: mean feature vector over its records.
  std::map<std::string, Observation> by_transfer;
  for (size_t i = 0; i < batch.records.size(); ++i) {
    auto& obs = by_transfer[batch.records[i].transfer_id];
    if (obs.records.empty()) obs.lowest = i;
    for (size_t f = 0; f < kWeights.size(); ++f) obs.raw[f] += feats[i][f];
    obs.records.push_back(i);
    obs.n += 1;
  }
  std::vector<Observation> active;
  active.reserve(by_transfer.size());
  for (auto& [id, obs] : by_transfer) {
    for (size_t f = 0; f < kWeights.size(); ++f) {
      obs.raw[f] /= obs.n;
      const double s = model.feature_std[f] > 0 ? model.feature_std[f] : 1.0;
      obs.mean[f] = kWeights[f] * (obs.raw[f] - model.feature_mean[f]) / s;
    }
    active.push_back(std::move(obs));
  }
  std::sort(active.begin(), active.end(),
            [](const Observation& a, const Observation& b) { return a.lowest < b.lowest; });

  std::vector<double> merge_dists;
  while (active.size() > 1) {
    size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < active.size(); ++i)
      for (size_t j = i + 1; j < active.size(); ++j) {
        const double c = ward_cost(active[i], active[j]);
        if (c < best) {
          best = c;
          bi = i;
          bj = j;
        }
      }
    const double dist = std::sqrt(best);
    const bool zero = dist <= 1e-12;
    // The cap is hard: merge unconditionally while above it. At or below it,
    // keep merging only through small distance jumps.
    if (!zero && active.size() <= static_cast<size_t>(max_clusters)) {
      if (merge_dists.size() < 2) break;
      std::vector<double> sorted = merge_dists;
      std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
      if (dist > 2.0 * sorted[sorted.size() / 2]) break;
    }

    Observation merged;
    const Observation& a = active[bi];
    const Observation& b = active[bj];
    merged.n = a.n + b.n;
    for (size_t f = 0; f < kWeights.size(); ++f) {
      merged.mean[f] = (a.n * a.mean[f] + b.n * b.mean[f]) / merged.n;
      merged.raw[f] = (a.n * a.raw[f] + b.n * b.raw[f]) / merged.n;
    }
    merged.records = a.records;
    merged.records.insert(merged.records.end(), b.records.begin(), b.records.end());
    merged.lowest = std::min(a.lowest, b.lowest);
    active.erase(active.begin() + bj);
    active.erase(active.begin() + bi);
    // Keep the scan order deterministic under ties.
    auto pos = std::lower_bound(active.begin(), active.end(), merged,
                                [](const Observation& x, const Observation& y) {
                                  return x.lowest < y.lowest;
                                });
    active.insert(pos, std::move(merged));
    if (!zero) merge_dists.push_back(dist);
  }

  for (size_t i = 0; i < active.size(); ++i) {
    Cluster c;
    c.id = static_cast<int>(i);
    c.centroid = active[i].raw;
    c.member_records = std::move(active[i].records);
    std::sort(c.member_records.begin(), c.member_records.end());
    model.clusters.push_back(std::move(c));
  }
  return model;
}

}  // namespace gdf

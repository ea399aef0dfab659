#pragma once

#include <array>
#include <vector>

#include "gdf/logstore.hpp"

namespace gdf {

/// Feature vector used for grouping historically similar transfers:
/// log10 mean file bytes, rtt, bandwidth, buffer size, external-load fraction.
using ClusterFeatures = std::array<double, 5>;

ClusterFeatures record_features(const TransferLogRecord& rec);

struct Cluster {
  int id = 0;
  ClusterFeatures centroid{};          // raw (unstandardized) feature means
  std::vector<size_t> member_records;  // indices into the source batch
};

/// Clusters plus the standardization constants they were built with, so new
/// observations can be assigned to the nearest centroid in the same space.
struct ClusterModel {
  std::vector<Cluster> clusters;
  ClusterFeatures feature_mean{};
  ClusterFeatures feature_std{};

  int nearest(const ClusterFeatures& raw) const;
};

/// Agglomerative merge with Ward linkage on standardized, precedence-weighted
/// features (weights 4/3/2/1/1 in feature order). Observations are per-transfer
/// feature means; every record of a transfer lands in its transfer's cluster.
/// Merging continues at least until max_clusters remain, then keeps going only
/// while the smallest inter-cluster distance stays within twice the median
/// merge distance. Zero-distance pairs always merge. Ties break toward the
/// lowest member index.
ClusterModel cluster_logs(const LogBatch& batch, int max_clusters);

}  // namespace gdf

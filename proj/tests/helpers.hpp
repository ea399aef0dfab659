#pragma once

#include <string>
#include <vector>

#include "gdf/logstore.hpp"
#include "gdf/offline.hpp"
#include "gdf/simnet.hpp"

namespace gdf::testutil {

/// Sweeps the parameter grid on one link and concatenates the per-run logs,
/// giving the offline pipeline a full (cc, p) grid for each (pp, bs) slice.
inline LogBatch make_training_batch(const LinkSpec& link, uint64_t seed = 42,
                                    double ticks = 30,
                                    int64_t files = 4000, double file_bytes = 1e8) {
  const std::vector<int> cc_grid = {1, 2, 4, 6};
  const std::vector<int> p_grid = {1, 2, 4, 6};
  const std::vector<int> pp_grid = {1, 4};

  LogBatch all;
  all.provenance = "training-sweep";
  int run = 0;
  for (int pp : pp_grid)
    for (int cc : cc_grid)
      for (int p : p_grid) {
        SimWorld world(link, seed + static_cast<uint64_t>(run));
        Workload wl{files, file_bytes, file_bytes};
        world.add_transfer("g", wl, ParamSet{cc, p, pp, link.buffer});
        RunResult r = world.run(ticks);
        const std::string id = "run" + std::to_string(run);
        for (auto& rec : r.log.records) {
          rec.transfer_id = id;
          all.records.push_back(std::move(rec));
        }
        ++run;
      }
  return all;
}

inline AnalyzeOutput make_cache(const LinkSpec& link, int sla_levels = 10,
                                uint64_t seed = 42) {
  AnalyzeConfig cfg;
  cfg.max_clusters = 1;
  cfg.sla_levels = sla_levels;
  cfg.link_bw = link.bandwidth;
  return analyze(make_training_batch(link, seed), cfg);
}

}  // namespace gdf::testutil

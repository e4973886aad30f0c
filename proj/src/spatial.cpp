#include "srtmix/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace srtmix {

bool SpatialGraph::has_edge(int i, int j) const {
  const auto& nb = neighbors[i];
  return std::binary_search(nb.begin(), nb.end(), j);
}

long SpatialGraph::num_edges() const {
  long twice = 0;
  for (const auto& nb : neighbors) twice += static_cast<long>(nb.size());
  return twice / 2;
}

SpatialGraph build_adjacency(const CoordsMat& coords, double c0) {
  if (!(c0 > 0.0) || !std::isfinite(c0)) {
    throw std::invalid_argument("build_adjacency: cutoff must be positive");
  }
  const Eigen::Index n = coords.rows();
  if (n < 1) throw std::invalid_argument("build_adjacency: no coordinates");
  if (!coords.allFinite()) {
    throw std::invalid_argument("build_adjacency: nonfinite coordinate");
  }

  SpatialGraph graph;
  graph.coords = coords;
  graph.threshold = c0;
  graph.neighbors.assign(n, {});

  const double c0_sq = c0 * c0;
  long duplicate_pairs = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dx = coords(i, 0) - coords(j, 0);
      const double dy = coords(i, 1) - coords(j, 1);
      const double d_sq = dx * dx + dy * dy;
      if (d_sq < c0_sq) {
        graph.neighbors[i].push_back(static_cast<int>(j));
        graph.neighbors[j].push_back(static_cast<int>(i));
        if (d_sq == 0.0) ++duplicate_pairs;
      }
    }
  }
  // Lists are built in ascending order already, but keep the guarantee
  // explicit for has_edge's binary search.
  for (auto& nb : graph.neighbors) std::sort(nb.begin(), nb.end());

  if (duplicate_pairs > 0) {
    std::cerr << "warning: build_adjacency: " << duplicate_pairs
              << " spot pair(s) share identical coordinates\n";
  }
  return graph;
}

double default_adjacency_threshold(const CoordsMat& coords) {
  const Eigen::Index n = coords.rows();
  if (n < 2) {
    throw std::invalid_argument(
        "default_adjacency_threshold: need at least two spots");
  }
  std::vector<double> nn_sq(n, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dx = coords(i, 0) - coords(j, 0);
      const double dy = coords(i, 1) - coords(j, 1);
      const double d_sq = dx * dx + dy * dy;
      nn_sq[i] = std::min(nn_sq[i], d_sq);
      nn_sq[j] = std::min(nn_sq[j], d_sq);
    }
  }
  std::vector<double> nn(n);
  for (Eigen::Index i = 0; i < n; ++i) nn[i] = std::sqrt(nn_sq[i]);
  std::sort(nn.begin(), nn.end());
  const double median = (n % 2 == 1)
                            ? nn[n / 2]
                            : 0.5 * (nn[n / 2 - 1] + nn[n / 2]);
  if (!(median > 0.0)) {
    throw std::invalid_argument(
        "default_adjacency_threshold: median nearest-neighbor distance is "
        "zero (duplicate coordinates); pass an explicit cutoff");
  }
  return 1.2 * median;
}

}  // namespace srtmix

#pragma once

#include <Eigen/Core>
#include <vector>

namespace srtmix {

using CoordsMat = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Undirected neighbor graph over spot coordinates.
struct SpatialGraph {
  CoordsMat coords;                         // n x 2, (x, y) per spot
  std::vector<std::vector<int>> neighbors;  // sorted adjacency lists
  double threshold = 0.0;                   // distance cutoff used to build

  int n() const { return static_cast<int>(neighbors.size()); }
  int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
  bool has_edge(int i, int j) const;
  long num_edges() const;  // unordered pairs
};

// Connects spots i != i' whenever the Euclidean distance is strictly below
// c0.  Warns on standard error if any two spots share coordinates (they end
// up mutual neighbors at distance zero for any positive cutoff).
SpatialGraph build_adjacency(const CoordsMat& coords, double c0);

// Default cutoff: 1.2 times the median nearest-neighbor distance.  The
// factor sits in (1, sqrt(2)), so on a unit square lattice the 4 axial
// neighbors (distance 1) are linked but diagonals (sqrt(2)) are not, and on
// a unit triangular lattice the 6 nearest neighbors are linked while the
// next ring (sqrt(3)) is not.
double default_adjacency_threshold(const CoordsMat& coords);

}  // namespace srtmix

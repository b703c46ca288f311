#pragma once

#include <utility>
#include <vector>

#include "hef/components.hpp"

namespace hef {

/// Guo-Hall two-subiteration thinning of the component's pixel set, run
/// until stable. The result is 1 px wide: no 2x2 block is fully set.
std::vector<std::pair<int, int>> skeletonize(const Component& group);

/// Longest shortest path (graph diameter) over the skeleton graph: nodes are
/// pixels, 8-neighbor edges weigh 1 (axis) or sqrt(2) (diagonal). Uses
/// Floyd-Warshall up to 1500 nodes and a two-sweep eccentricity search above
/// that (identical on trees).
double skeleton_length(const std::vector<std::pair<int, int>>& skeleton);

/// The two underlying diameter computations, exposed for diagnostics:
/// all-pairs Floyd-Warshall, and the two-sweep farthest-point search that is
/// exact on trees.
double skeleton_length_floyd_warshall(const std::vector<std::pair<int, int>>& skeleton);
double skeleton_length_two_sweep(const std::vector<std::pair<int, int>>& skeleton);

} // namespace hef

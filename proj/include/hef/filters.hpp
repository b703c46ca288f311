#pragma once

#include <vector>

#include "hef/components.hpp"
#include "hef/disk.hpp"

namespace hef {

/// Fraction of the group covered by the equal-area circle centered at its
/// centroid: ~1 for round blobs, small for elongated shapes.
double component_compactness(const Component& c);

/// Drops filament groups that sit within border_px of a sunspot, and groups
/// inside bright (flare/plage) regions that are too round to be filaments
/// (compactness above compactness_max).
std::vector<Component> filter_false_filaments(const std::vector<Component>& filaments,
                                              const std::vector<Component>& sunspots,
                                              const BinaryMask& bright_mask,
                                              const DiskGeometry& geom,
                                              double border_px = 20.0,
                                              double compactness_max = 0.6);

} // namespace hef

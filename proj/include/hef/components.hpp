#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hef/label_map.hpp"
#include "hef/timeutil.hpp"

namespace hef {

/// Inclusive horizontal run of set pixels on row y.
struct PixelRun {
    int y = 0;
    int x0 = 0;
    int x1 = 0;
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}

    bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y) { data[static_cast<std::size_t>(y) * width + x] = 1; }
};

/// One 8-connected region of a single class (or a grouped union of them),
/// stored run-length encoded with cached geometry.
struct Component {
    int class_id = 0;
    std::vector<PixelRun> runs; // sorted by (y, x0), non-overlapping
    int min_x = 0, min_y = 0, max_x = -1, max_y = -1;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    long long area = 0;
    int frame_index = 0;
    Timestamp timestamp = 0;
};

BinaryMask class_mask(const LabelMap& map, int class_id);

/// 8-connected components of the class mask, smallest-first pixel order,
/// dropping regions below min_area pixels.
std::vector<Component> extract_components(const LabelMap& map, int class_id, int min_area = 10);

/// Rebuild the cached bbox/centroid/area from the run list (runs must be
/// disjoint; they get sorted here).
void recompute_component_stats(Component& c);

/// Minimum Euclidean distance over all pixel-center pairs; 0 when the sets
/// share a pixel. `stop_below` allows early exit once the distance is known
/// to be under the caller's threshold.
double component_distance(const Component& a, const Component& b, double stop_below = -1.0);

/// Single-linkage grouping: components whose min pixel distance is strictly
/// below max_dist share a group; each returned component is the union of one
/// group. Idempotent and independent of input order.
std::vector<Component> group_components(const std::vector<Component>& comps, double max_dist);

/// Number of shared pixels.
long long overlap_area(const Component& a, const Component& b);

bool component_intersects_mask(const Component& c, const BinaryMask& mask);

std::vector<std::pair<int, int>> component_pixels(const Component& c);

} // namespace hef

#include "hef/filters.hpp"

#include <cmath>

namespace hef {

double component_compactness(const Component& c) {
    if (c.area <= 0)
        return 0.0;
    const double r_sq = static_cast<double>(c.area) / M_PI; // equal-area radius squared
    long long inside = 0;
    for (const PixelRun& run : c.runs) {
        const double dy = run.y - c.centroid_y;
        for (int x = run.x0; x <= run.x1; ++x) {
            const double dx = x - c.centroid_x;
            if (dx * dx + dy * dy <= r_sq)
                ++inside;
        }
    }
    return static_cast<double>(inside) / static_cast<double>(c.area);
}

std::vector<Component> filter_false_filaments(const std::vector<Component>& filaments,
                                              const std::vector<Component>& sunspots,
                                              const BinaryMask& bright_mask,
                                              const DiskGeometry&, double border_px,
                                              double compactness_max) {
    std::vector<Component> kept;
    for (const Component& f : filaments) {
        bool drop = false;
        // classes are disjoint per pixel, so the distance to the sunspot set
        // equals the distance to the sunspot border
        for (const Component& spot : sunspots) {
            if (component_distance(f, spot, border_px) <= border_px) {
                drop = true;
                break;
            }
        }
        if (!drop && component_intersects_mask(f, bright_mask) &&
            component_compactness(f) > compactness_max)
            drop = true;
        if (!drop)
            kept.push_back(f);
    }
    return kept;
}

} // namespace hef

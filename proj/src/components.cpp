#include "hef/components.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hef/error.hpp"

namespace hef {

namespace {

bool run_less(const PixelRun& a, const PixelRun& b) {
    return a.y != b.y ? a.y < b.y : a.x0 < b.x0;
}

} // namespace

BinaryMask class_mask(const LabelMap& map, int class_id) {
    BinaryMask mask(map.width, map.height);
    for (std::size_t i = 0; i < map.labels.size(); ++i)
        mask.data[i] = map.labels[i] == class_id ? 1 : 0;
    return mask;
}

void recompute_component_stats(Component& c) {
    std::sort(c.runs.begin(), c.runs.end(), run_less);
    c.area = 0;
    c.min_x = std::numeric_limits<int>::max();
    c.min_y = std::numeric_limits<int>::max();
    c.max_x = std::numeric_limits<int>::min();
    c.max_y = std::numeric_limits<int>::min();
    double sx = 0.0, sy = 0.0;
    for (const PixelRun& r : c.runs) {
        const long long len = r.x1 - r.x0 + 1;
        c.area += len;
        c.min_x = std::min(c.min_x, r.x0);
        c.max_x = std::max(c.max_x, r.x1);
        c.min_y = std::min(c.min_y, r.y);
        c.max_y = std::max(c.max_y, r.y);
        // sum of x over the run: len * (x0 + x1) / 2
        sx += 0.5 * static_cast<double>(len) * (r.x0 + r.x1);
        sy += static_cast<double>(len) * r.y;
    }
    if (c.area > 0) {
        c.centroid_x = sx / static_cast<double>(c.area);
        c.centroid_y = sy / static_cast<double>(c.area);
    }
}

std::vector<Component> extract_components(const LabelMap& map, int class_id, int min_area) {
    const int w = map.width;
    const int h = map.height;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
    std::vector<Component> out;
    std::vector<std::pair<int, int>> stack;

    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            const std::size_t si = static_cast<std::size_t>(sy) * w + sx;
            if (seen[si] || map.labels[si] != class_id)
                continue;
            // flood fill gathering pixels of one 8-connected region
            std::vector<std::pair<int, int>> pixels;
            stack.clear();
            stack.push_back({sx, sy});
            seen[si] = 1;
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                pixels.push_back({x, y});
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0)
                            continue;
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                            continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (!seen[ni] && map.labels[ni] == class_id) {
                            seen[ni] = 1;
                            stack.push_back({nx, ny});
                        }
                    }
            }
            if (static_cast<int>(pixels.size()) < min_area)
                continue;

            Component c;
            c.class_id = class_id;
            c.frame_index = map.frame_index;
            c.timestamp = map.timestamp;
            std::sort(pixels.begin(), pixels.end(), [](const auto& a, const auto& b) {
                return a.second != b.second ? a.second < b.second : a.first < b.first;
            });
            for (std::size_t i = 0; i < pixels.size();) {
                std::size_t j = i;
                while (j + 1 < pixels.size() && pixels[j + 1].second == pixels[i].second &&
                       pixels[j + 1].first == pixels[j].first + 1)
                    ++j;
                c.runs.push_back({pixels[i].second, pixels[i].first, pixels[j].first});
                i = j + 1;
            }
            recompute_component_stats(c);
            out.push_back(std::move(c));
        }
    }
    return out;
}

double component_distance(const Component& a, const Component& b, double stop_below) {
    double best_sq = std::numeric_limits<double>::infinity();
    const double stop_sq = stop_below >= 0.0 ? stop_below * stop_below : -1.0;
    for (const PixelRun& ra : a.runs) {
        for (const PixelRun& rb : b.runs) {
            const double dy = ra.y - rb.y;
            // closest x pairing between the two intervals
            double dx = 0.0;
            if (rb.x0 > ra.x1)
                dx = rb.x0 - ra.x1;
            else if (ra.x0 > rb.x1)
                dx = ra.x0 - rb.x1;
            const double d = dx * dx + dy * dy;
            if (d < best_sq) {
                best_sq = d;
                if (stop_sq >= 0.0 && best_sq < stop_sq)
                    return std::sqrt(best_sq);
            }
        }
    }
    return std::sqrt(best_sq);
}

std::vector<Component> group_components(const std::vector<Component>& comps, double max_dist) {
    const int n = static_cast<int>(comps.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // bounding-box lower bound skips far pairs cheaply
            const double gx = std::max({0, comps[i].min_x - comps[j].max_x,
                                        comps[j].min_x - comps[i].max_x});
            const double gy = std::max({0, comps[i].min_y - comps[j].max_y,
                                        comps[j].min_y - comps[i].max_y});
            if (std::hypot(gx, gy) >= max_dist)
                continue;
            if (component_distance(comps[i], comps[j], max_dist) < max_dist) {
                const int ri = find(i);
                const int rj = find(j);
                if (ri != rj)
                    parent[std::max(ri, rj)] = std::min(ri, rj);
            }
        }
    }

    std::vector<Component> out;
    std::vector<int> root_slot(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (root_slot[r] < 0) {
            root_slot[r] = static_cast<int>(out.size());
            Component c;
            c.class_id = comps[i].class_id;
            c.frame_index = comps[i].frame_index;
            c.timestamp = comps[i].timestamp;
            out.push_back(std::move(c));
        }
        Component& dst = out[root_slot[r]];
        dst.runs.insert(dst.runs.end(), comps[i].runs.begin(), comps[i].runs.end());
    }
    for (Component& c : out)
        recompute_component_stats(c);
    return out;
}

long long overlap_area(const Component& a, const Component& b) {
    long long total = 0;
    // both run lists are sorted by (y, x0); sweep rows in lockstep
    std::size_t ia = 0, ib = 0;
    while (ia < a.runs.size() && ib < b.runs.size()) {
        const PixelRun& ra = a.runs[ia];
        const PixelRun& rb = b.runs[ib];
        if (ra.y != rb.y) {
            if (ra.y < rb.y)
                ++ia;
            else
                ++ib;
            continue;
        }
        const int lo = std::max(ra.x0, rb.x0);
        const int hi = std::min(ra.x1, rb.x1);
        if (hi >= lo)
            total += hi - lo + 1;
        if (ra.x1 < rb.x1)
            ++ia;
        else
            ++ib;
    }
    return total;
}

bool component_intersects_mask(const Component& c, const BinaryMask& mask) {
    for (const PixelRun& r : c.runs) {
        if (r.y < 0 || r.y >= mask.height)
            continue;
        for (int x = std::max(r.x0, 0); x <= std::min(r.x1, mask.width - 1); ++x)
            if (mask.at(x, r.y))
                return true;
    }
    return false;
}

std::vector<std::pair<int, int>> component_pixels(const Component& c) {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(c.area));
    for (const PixelRun& r : c.runs)
        for (int x = r.x0; x <= r.x1; ++x)
            out.push_back({x, r.y});
    return out;
}

} // namespace hef

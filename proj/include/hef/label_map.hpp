#pragma once

#include <cstdint>
#include <vector>

#include "hef/timeutil.hpp"

namespace hef {

inline constexpr int kNumClasses = 4;
inline constexpr int kClassSunspot = 0;
inline constexpr int kClassFilament = 1;
inline constexpr int kClassFlare = 2;
inline constexpr int kClassBackground = 3;

/// Hard per-pixel class assignment for one frame.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels;
    Timestamp timestamp = 0;
    int frame_index = 0;

    LabelMap() = default;
    LabelMap(int w, int h)
        : width(w), height(h), labels(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

} // namespace hef

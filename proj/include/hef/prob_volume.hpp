#pragma once

#include <vector>

#include "hef/timeutil.hpp"

namespace hef {

/// Per-class pointwise costs for one frame: K planes of negative
/// log-probabilities, clamped to [0, nll_max]. Plane index == class id.
struct ProbVolume {
    int width = 0;
    int height = 0;
    int num_classes = 0;
    std::vector<float> planes; // K * width * height, plane-major
    Timestamp timestamp = 0;
    int frame_index = 0;

    ProbVolume() = default;
    ProbVolume(int w, int h, int k)
        : width(w), height(h), num_classes(k),
          planes(static_cast<std::size_t>(k) * w * h, 0.0f) {}

    float* plane(int k) { return planes.data() + static_cast<std::size_t>(k) * width * height; }
    const float* plane(int k) const {
        return planes.data() + static_cast<std::size_t>(k) * width * height;
    }
    std::size_t plane_size() const { return static_cast<std::size_t>(width) * height; }
};

/// Exponential smoothing of cost planes across frames:
/// out = alpha * current + (1 - alpha) * previous. A null previous volume
/// passes the current one through unchanged.
ProbVolume temporal_average(const ProbVolume* previous, const ProbVolume& current, double alpha);

} // namespace hef

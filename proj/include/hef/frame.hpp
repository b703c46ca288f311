#pragma once

#include <cstddef>
#include <vector>

#include "hef/timeutil.hpp"

namespace hef {

/// Single-channel row-major float image; the currency of the whole pipeline.
/// Treated as an immutable value once an operation has returned it.
struct FrameBuffer {
    int width = 0;
    int height = 0;
    std::vector<float> data; // width * height, row-major
    Timestamp timestamp = 0;
    int frame_index = 0;

    FrameBuffer() = default;
    FrameBuffer(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

    std::size_t size() const { return data.size(); }
    bool same_size(const FrameBuffer& other) const {
        return width == other.width && height == other.height;
    }
};

/// True when every sample is finite (no NaN/Inf).
bool all_finite(const FrameBuffer& frame);

/// Sample mean and standard deviation (population form), double accumulation.
void frame_mean_std(const FrameBuffer& frame, double& mean, double& std_dev);

} // namespace hef

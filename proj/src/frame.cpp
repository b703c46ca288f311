#include "hef/frame.hpp"

#include <cmath>

namespace hef {

bool all_finite(const FrameBuffer& frame) {
    for (float v : frame.data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void frame_mean_std(const FrameBuffer& frame, double& mean, double& std_dev) {
    double sum = 0.0;
    for (float v : frame.data) sum += v;
    const double n = static_cast<double>(frame.size());
    mean = n > 0 ? sum / n : 0.0;
    double ss = 0.0;
    for (float v : frame.data) {
        const double d = v - mean;
        ss += d * d;
    }
    std_dev = n > 0 ? std::sqrt(ss / n) : 0.0;
}

} // namespace hef

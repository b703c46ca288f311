#include "hef/prob_volume.hpp"

#include "hef/error.hpp"

namespace hef {

ProbVolume temporal_average(const ProbVolume* previous, const ProbVolume& current, double alpha) {
    if (!previous)
        return current;
    if (previous->width != current.width || previous->height != current.height ||
        previous->num_classes != current.num_classes)
        throw_error(ErrorCode::DimensionMismatch, "temporal_average: volume shapes differ");
    ProbVolume out(current.width, current.height, current.num_classes);
    out.timestamp = current.timestamp;
    out.frame_index = current.frame_index;
    const float a = static_cast<float>(alpha);
    const float b = 1.0f - a;
    for (std::size_t i = 0; i < out.planes.size(); ++i)
        out.planes[i] = a * current.planes[i] + b * previous->planes[i];
    return out;
}

} // namespace hef

#include "hef/segment.hpp"

#include <vector>

#include "hef/error.hpp"
#include "hef/image_io.hpp"
#include "hef/potts.hpp"

namespace hef {

LabelMap segment_frame(const ProbVolume& probs, double lambda_data, int max_iters) {
    if (!(lambda_data > 0.0))
        throw_error(ErrorCode::BadConfig, "segment_frame: lambda_data must be positive");
    if (max_iters < 1)
        throw_error(ErrorCode::BadConfig, "segment_frame: max_iters must be positive");
    PottsProblem problem;
    problem.costs = probs;
    problem.lambda = lambda_data;
    problem.max_iters = max_iters;
    LabelMap labels = round_labeling(potts_relax(problem));
    labels.timestamp = probs.timestamp;
    labels.frame_index = probs.frame_index;
    return labels;
}

void write_label_pgm(const LabelMap& labels, const std::string& path) {
    static constexpr std::uint8_t kPalette[4] = {0, 85, 170, 255};
    std::vector<std::uint8_t> shades(labels.labels.size());
    for (std::size_t i = 0; i < shades.size(); ++i)
        shades[i] = kPalette[labels.labels[i] & 3];
    write_pgm8(path, shades, labels.width, labels.height);
}

} // namespace hef

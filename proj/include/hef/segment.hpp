#pragma once

#include <string>

#include "hef/label_map.hpp"
#include "hef/prob_volume.hpp"

namespace hef {

/// Hard segmentation of one frame: relaxed Potts over the cost planes with
/// data weight lambda_data, then argmax rounding. Size filtering belongs to
/// postprocessing, not here. max_iters caps the relaxation sweeps; the
/// rounding only needs the per-pixel winner, which settles long before the
/// relaxed energy does.
LabelMap segment_frame(const ProbVolume& probs, double lambda_data, int max_iters = 1500);

/// Debug dump with the class palette {0, 85, 170, 255}.
void write_label_pgm(const LabelMap& labels, const std::string& path);

} // namespace hef

#pragma once

#include "hef/frame.hpp"

namespace hef {

/// Translation between two frames, in pixels. Positive u1 moves content
/// rightward, positive u2 downward (image y axis).
struct DisplacementVector {
    double u1 = 0.0;
    double u2 = 0.0;
};

struct BandpassParams {
    double lambda1 = 0.9;
    double lambda2 = 0.1;
    // Solver budget per TV-L1 solve. The default runs to the solver's own
    // stopping rule; the frame pipeline trades tail precision for throughput.
    int max_iters = 2000;
    double tol = 1e-5;
};

/// Standardize to zero mean, unit standard deviation (population form).
/// Throws DegenerateFrame when the input is constant.
FrameBuffer normalize(const FrameBuffer& frame);

/// Estimate the translation mapping `moving` onto `reference`:
/// apply_shift(moving, d) ~= reference. Works on gradient-magnitude images
/// over a Gaussian pyramid, solving the 2x2 least-squares normal equations
/// with three warp-and-refine passes per level. Throws
/// SingularStructureTensor when every level is featureless.
DisplacementVector register_translation(const FrameBuffer& reference, const FrameBuffer& moving,
                                        int levels = 5);

/// Translate the frame content by d with bilinear resampling; samples past
/// the border replicate the edge. d = (0,0) returns the frame unchanged.
FrameBuffer apply_shift(const FrameBuffer& frame, const DisplacementVector& d);

/// Difference of two TV-L1 solves (fidelity lambda1 > lambda2): structure
/// at scales between 2/lambda1 and 2/lambda2 pixels survives, smaller noise
/// and larger background are both removed.
FrameBuffer structural_bandpass(const FrameBuffer& frame, const BandpassParams& params);

} // namespace hef

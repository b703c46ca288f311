#pragma once

#include "hef/frame.hpp"

namespace hef {

/// Solar disk center and radius in pixel coordinates.
struct DiskGeometry {
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 0.0;
};

struct HeliographicPos {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

/// Locates the solar limb and fits a circle to it.
///
/// Edge candidates are threshold crossings (midpoint of the 10th/90th
/// intensity percentiles) along radial scanlines from the brightness
/// centroid; an algebraic Kasa fit seeds one geometric refinement pass that
/// snaps each edge point to the steepest intensity drop near the fitted
/// circle before refitting. Throws DiskNotFound when fewer than 32 edge
/// points survive or the fit RMS residual exceeds 5 px.
DiskGeometry estimate_disk(const FrameBuffer& frame);

/// Orthographic de-projection of an on-disk pixel to heliographic
/// latitude/longitude, P-angle 0, supplied B0 tilt. Throws OffDisk when the
/// pixel is not strictly inside the limb.
HeliographicPos pixel_to_heliographic(const DiskGeometry& geom, double px, double py,
                                      double b0_deg = 0.0);

/// Forward orthographic projection; inverse of pixel_to_heliographic.
void heliographic_to_pixel(const DiskGeometry& geom, const HeliographicPos& pos, double b0_deg,
                           double& px, double& py);

/// Great-circle separation in degrees between two heliographic positions.
double great_circle_deg(const HeliographicPos& a, const HeliographicPos& b);

} // namespace hef

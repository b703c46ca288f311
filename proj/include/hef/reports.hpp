#pragma once

#include <string>
#include <vector>

#include "hef/disk.hpp"
#include "hef/tracking.hpp"

namespace hef {

/// Importance class bounds in corrected square degrees. The gaps of the
/// published table are split at their midpoints.
struct ImportanceScale {
    double s_max = 2.05;
    double one_max = 5.15;
    double two_max = 12.45;
    double three_max = 24.75;
};

struct FlareReport {
    int id = 0;
    Timestamp start = 0;
    Timestamp peak = 0;
    Timestamp end = 0;
    std::string importance; // "S", "1", "2", "3", "4"
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double area_msh = 0.0; // peak corrected area, millionths of solar hemisphere
    double rel_intensity = 0.0;
};

struct EruptionReport {
    int id = 0;
    Timestamp start = 0;         // first time the filament was seen
    Timestamp disappearance = 0; // when the absence window elapsed
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double length_px = 0.0; // skeleton length at the last sighting
};

inline constexpr double kMshPerSquareDegree = 48.5;

std::string importance_from_sq_deg(double sq_deg, const ImportanceScale& scale = {});

/// Build the report for a flare track. With photometric stats the event
/// window runs from the first to the last frame at or above half the
/// track's peak brightening, the peak is the brightest frame, and the area
/// comes from the half-maximum pixel counts; tracks without photometry fall
/// back to the full extent, maximum mean intensity, and segmented areas.
/// The area is foreshortening-corrected at each frame's centroid and taken
/// at its maximum over the window. Throws OffDiskCentroid when the
/// peak-frame centroid is outside the disk.
FlareReport classify_flare(const EventTrack& track, const DiskGeometry& geom,
                           const ImportanceScale& scale = {});

/// Transition active filament tracks that have been unseen for window_s
/// seconds: near the limb (radial > limb_radial) they end silently, anywhere
/// else with at least min_lifetime sightings they erupt, once per track.
std::vector<EruptionReport> detect_eruptions(TrackStore& store, Timestamp now, double window_s,
                                             const DiskGeometry& geom,
                                             double limb_radial = 0.95, int min_lifetime = 3);

std::string flare_to_ndjson(const FlareReport& report);
std::string eruption_to_ndjson(const EruptionReport& report);

} // namespace hef

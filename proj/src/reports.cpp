#include "hef/reports.hpp"

#include <cmath>

#include <json.hpp>

#include "hef/error.hpp"
#include "hef/timeutil.hpp"

namespace hef {

namespace {

double foreshortening_cos(const DiskGeometry& geom, double cx, double cy) {
    const double rho = std::hypot(cx - geom.center_x, cy - geom.center_y) / geom.radius;
    if (rho >= 1.0)
        return 0.0;
    return std::sqrt(1.0 - rho * rho);
}

} // namespace

std::string importance_from_sq_deg(double sq_deg, const ImportanceScale& scale) {
    if (sq_deg < scale.s_max)
        return "S";
    if (sq_deg < scale.one_max)
        return "1";
    if (sq_deg < scale.two_max)
        return "2";
    if (sq_deg < scale.three_max)
        return "3";
    return "4";
}

FlareReport classify_flare(const EventTrack& track, const DiskGeometry& geom,
                           const ImportanceScale& scale) {
    if (track.frames.empty())
        throw_error(ErrorCode::BadConfig, "classify_flare: track has no frames");

    // The event window follows the light curve, not the track extent: when
    // photometric stats are present, start and end are the first and last
    // frames at or above half the track's peak brightening, and the area is
    // taken from the half-maximum pixel counts. Tracks without photometry
    // fall back to the raw extent and segmented areas.
    double track_peak = 0.0;
    for (const TrackFrameStat& f : track.frames)
        track_peak = std::max(track_peak, f.peak_excess);

    std::size_t lo = 0;
    std::size_t hi = track.frames.size() - 1;
    if (track_peak > 0.0) {
        while (lo < hi && track.frames[lo].peak_excess < 0.5 * track_peak) ++lo;
        while (hi > lo && track.frames[hi].peak_excess < 0.5 * track_peak) --hi;
    }

    const TrackFrameStat* peak = &track.frames[lo];
    for (std::size_t i = lo; i <= hi; ++i) {
        const TrackFrameStat& f = track.frames[i];
        const bool better = track_peak > 0.0 ? f.peak_excess > peak->peak_excess
                                             : f.mean_intensity > peak->mean_intensity;
        if (better) peak = &f;
    }

    double peak_msh = -1.0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const TrackFrameStat& f = track.frames[i];
        const double cos_theta = foreshortening_cos(geom, f.centroid_x, f.centroid_y);
        if (cos_theta <= 0.0)
            continue;
        const long long px = f.area_half > 0 ? f.area_half : f.area;
        const double msh = static_cast<double>(px) * 1e6 /
                           (2.0 * M_PI * geom.radius * geom.radius * cos_theta);
        peak_msh = std::max(peak_msh, msh);
    }
    if (peak_msh < 0.0 || foreshortening_cos(geom, peak->centroid_x, peak->centroid_y) <= 0.0)
        throw_error(ErrorCode::OffDiskCentroid, "classify_flare: centroid beyond the limb");

    const HeliographicPos pos =
        pixel_to_heliographic(geom, peak->centroid_x, peak->centroid_y);

    FlareReport report;
    report.id = track.id;
    report.start = track.frames[lo].timestamp;
    report.end = track.frames[hi].timestamp;
    report.peak = peak->timestamp;
    report.area_msh = peak_msh;
    report.importance = importance_from_sq_deg(peak_msh / kMshPerSquareDegree, scale);
    report.lat_deg = pos.lat_deg;
    report.lon_deg = pos.lon_deg;
    report.rel_intensity =
        peak->disk_mean != 0.0 ? peak->mean_intensity / peak->disk_mean : 0.0;
    return report;
}

std::vector<EruptionReport> detect_eruptions(TrackStore& store, Timestamp now, double window_s,
                                             const DiskGeometry& geom, double limb_radial,
                                             int min_lifetime) {
    std::vector<EruptionReport> reports;
    const Timestamp window_us = static_cast<Timestamp>(window_s * 1000000.0);
    for (EventTrack& track : store.tracks()) {
        if (track.class_id != kClassFilament || track.status != TrackStatus::Active)
            continue;
        if (track.last_seen > now - window_us)
            continue;
        const TrackFrameStat& last = track.frames.back();
        const double radial =
            std::hypot(last.centroid_x - geom.center_x, last.centroid_y - geom.center_y) /
            geom.radius;
        if (radial > limb_radial) {
            track.status = TrackStatus::Ended; // rotated past the limb, not an eruption
            continue;
        }
        if (static_cast<int>(track.frames.size()) < min_lifetime)
            continue;
        track.status = TrackStatus::Erupted;

        EruptionReport report;
        report.id = track.id;
        report.start = track.first_seen;
        report.disappearance = now;
        report.length_px = last.length_px;
        if (radial < 1.0) {
            const HeliographicPos pos =
                pixel_to_heliographic(geom, last.centroid_x, last.centroid_y);
            report.lat_deg = pos.lat_deg;
            report.lon_deg = pos.lon_deg;
        }
        reports.push_back(report);
    }
    return reports;
}

std::string flare_to_ndjson(const FlareReport& report) {
    nlohmann::ordered_json j;
    j["type"] = "flare";
    j["id"] = report.id;
    j["start"] = format_rfc3339(report.start);
    j["peak"] = format_rfc3339(report.peak);
    j["end"] = format_rfc3339(report.end);
    j["importance"] = report.importance;
    j["lat_deg"] = report.lat_deg;
    j["lon_deg"] = report.lon_deg;
    j["area_msh"] = report.area_msh;
    j["rel_intensity"] = report.rel_intensity;
    return j.dump();
}

std::string eruption_to_ndjson(const EruptionReport& report) {
    nlohmann::ordered_json j;
    j["type"] = "filament_eruption";
    j["id"] = report.id;
    j["start"] = format_rfc3339(report.start);
    j["end"] = format_rfc3339(report.disappearance);
    j["lat_deg"] = report.lat_deg;
    j["lon_deg"] = report.lon_deg;
    j["length_px"] = report.length_px;
    return j.dump();
}

} // namespace hef

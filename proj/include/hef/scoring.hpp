#pragma once

#include <string>
#include <vector>

#include "hef/components.hpp"
#include "hef/reports.hpp"

namespace hef {

/// One row of the reference catalog (hand-transcribed event lists).
struct ReferenceEvent {
    std::string type; // "flare" or "filament_eruption"
    Timestamp start = 0;
    Timestamp end = 0;
    std::string importance; // flares only, empty otherwise
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

struct MatchCounts {
    long long true_positives = 0;
    long long false_positives = 0;
    long long false_negatives = 0;
};

/// Matching tolerances. The flare values follow the published rule (10 min,
/// 10 degrees, same importance); the eruption values are our convention.
struct MatchTolerances {
    double flare_time_s = 600.0;
    double flare_deg = 10.0;
    double eruption_time_s = 1800.0;
    double eruption_deg = 15.0;
};

/// Greedy one-to-one matching in chronological order. A flare detection
/// matches a reference when |dstart| and |dend| are within flare_time_s,
/// importance is equal, and the locations are within flare_deg great-circle
/// degrees.
MatchCounts match_flares(const std::vector<FlareReport>& detected,
                         const std::vector<ReferenceEvent>& reference,
                         const MatchTolerances& tol = {});

/// Same discipline for eruptions: the disappearance time must fall within
/// eruption_time_s of the reference start and the location within
/// eruption_deg degrees.
MatchCounts match_eruptions(const std::vector<EruptionReport>& detected,
                            const std::vector<ReferenceEvent>& reference,
                            const MatchTolerances& tol = {});

struct PrfScores {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    bool degenerate = false; // a denominator was zero; the affected scores are 0
};

PrfScores prf(const MatchCounts& counts);

/// Intersection over union of two same-sized masks; 1 when both are empty.
double mask_iou(const BinaryMask& predicted, const BinaryMask& truth);

/// Reads the catalog CSV: header `type,start,end,importance,lat,lon`,
/// RFC 3339 timestamps. Throws CorruptHeader naming the offending line.
std::vector<ReferenceEvent> read_reference_csv(const std::string& path);

struct DetectionSet {
    std::vector<FlareReport> flares;
    std::vector<EruptionReport> eruptions;
};

/// Reads the NDJSON event stream emitted by detection. Throws CorruptHeader
/// naming the offending line.
DetectionSet read_detections_ndjson(const std::string& path);

} // namespace hef

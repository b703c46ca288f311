#include "hef/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hef/disk.hpp"
#include "hef/error.hpp"
#include "hef/timeutil.hpp"

namespace hef {

namespace {

double sep_deg(double lat_a, double lon_a, double lat_b, double lon_b) {
    return great_circle_deg({lat_a, lon_a}, {lat_b, lon_b});
}

// shared greedy one-to-one matcher: detections and references are walked in
// chronological order, each detection takes the earliest unused reference it
// is compatible with
template <typename Det, typename Accept>
MatchCounts greedy_match(const std::vector<Det>& detected,
                         const std::vector<ReferenceEvent>& reference, Timestamp Det::*when,
                         Accept accept) {
    std::vector<std::size_t> det_order(detected.size());
    std::iota(det_order.begin(), det_order.end(), 0);
    std::stable_sort(det_order.begin(), det_order.end(), [&](std::size_t a, std::size_t b) {
        return detected[a].*when < detected[b].*when;
    });
    std::vector<std::size_t> ref_order(reference.size());
    std::iota(ref_order.begin(), ref_order.end(), 0);
    std::stable_sort(ref_order.begin(), ref_order.end(), [&](std::size_t a, std::size_t b) {
        return reference[a].start < reference[b].start;
    });

    std::vector<char> used(reference.size(), 0);
    MatchCounts counts;
    for (std::size_t di : det_order) {
        bool matched = false;
        for (std::size_t ri : ref_order) {
            if (used[ri] || !accept(detected[di], reference[ri]))
                continue;
            used[ri] = 1;
            matched = true;
            break;
        }
        if (matched)
            ++counts.true_positives;
        else
            ++counts.false_positives;
    }
    counts.false_negatives =
        static_cast<long long>(reference.size()) - counts.true_positives;
    return counts;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trimmed(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_double_field(const std::string& text, const std::string& path, int line_no) {
    const std::string t = trimmed(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
        throw_error(ErrorCode::CorruptHeader,
                    path + " line " + std::to_string(line_no) + ": bad number '" + text + "'");
    return v;
}

Timestamp parse_time_field(const std::string& text, const std::string& path, int line_no) {
    const auto ts = parse_rfc3339(trimmed(text));
    if (!ts)
        throw_error(ErrorCode::CorruptHeader, path + " line " + std::to_string(line_no) +
                                                  ": bad timestamp '" + text + "'");
    return *ts;
}

} // namespace

MatchCounts match_flares(const std::vector<FlareReport>& detected,
                         const std::vector<ReferenceEvent>& reference,
                         const MatchTolerances& tol) {
    const Timestamp dt_max = static_cast<Timestamp>(tol.flare_time_s * kMicrosPerSecond);
    return greedy_match(detected, reference, &FlareReport::start,
                        [&](const FlareReport& d, const ReferenceEvent& r) {
                            return r.type == "flare" &&
                                   std::llabs(d.start - r.start) <= dt_max &&
                                   std::llabs(d.end - r.end) <= dt_max &&
                                   d.importance == r.importance &&
                                   sep_deg(d.lat_deg, d.lon_deg, r.lat_deg, r.lon_deg) <=
                                       tol.flare_deg;
                        });
}

MatchCounts match_eruptions(const std::vector<EruptionReport>& detected,
                            const std::vector<ReferenceEvent>& reference,
                            const MatchTolerances& tol) {
    const Timestamp dt_max = static_cast<Timestamp>(tol.eruption_time_s * kMicrosPerSecond);
    return greedy_match(detected, reference, &EruptionReport::disappearance,
                        [&](const EruptionReport& d, const ReferenceEvent& r) {
                            return r.type == "filament_eruption" &&
                                   std::llabs(d.disappearance - r.start) <= dt_max &&
                                   sep_deg(d.lat_deg, d.lon_deg, r.lat_deg, r.lon_deg) <=
                                       tol.eruption_deg;
                        });
}

PrfScores prf(const MatchCounts& counts) {
    PrfScores s;
    const double tp = static_cast<double>(counts.true_positives);
    const long long det = counts.true_positives + counts.false_positives;
    const long long ref = counts.true_positives + counts.false_negatives;
    if (det > 0)
        s.precision = tp / static_cast<double>(det);
    else
        s.degenerate = true;
    if (ref > 0)
        s.recall = tp / static_cast<double>(ref);
    else
        s.degenerate = true;
    if (s.precision + s.recall > 0.0)
        s.f_score = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

double mask_iou(const BinaryMask& predicted, const BinaryMask& truth) {
    if (predicted.width != truth.width || predicted.height != truth.height)
        throw_error(ErrorCode::DimensionMismatch,
                    "mask_iou: mask shapes differ (" + std::to_string(predicted.width) + "x" +
                        std::to_string(predicted.height) + " vs " +
                        std::to_string(truth.width) + "x" + std::to_string(truth.height) + ")");
    long long inter = 0, uni = 0;
    for (std::size_t i = 0; i < predicted.data.size(); ++i) {
        const bool p = predicted.data[i] != 0;
        const bool t = truth.data[i] != 0;
        inter += p && t;
        uni += p || t;
    }
    if (uni == 0)
        return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<ReferenceEvent> read_reference_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw_error(ErrorCode::IoError, "cannot open reference catalog " + path);

    std::vector<ReferenceEvent> events;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty())
            continue;
        if (!header_seen) {
            std::string header = line;
            header.erase(std::remove_if(header.begin(), header.end(),
                                        [](char ch) { return ch == ' ' || ch == '\r'; }),
                         header.end());
            if (header != "type,start,end,importance,lat,lon")
                throw_error(ErrorCode::CorruptHeader,
                            path + " line " + std::to_string(line_no) +
                                ": expected header 'type,start,end,importance,lat,lon'");
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 6)
            throw_error(ErrorCode::CorruptHeader, path + " line " + std::to_string(line_no) +
                                                      ": expected 6 fields, got " +
                                                      std::to_string(fields.size()));
        ReferenceEvent ev;
        ev.type = trimmed(fields[0]);
        if (ev.type != "flare" && ev.type != "filament_eruption")
            throw_error(ErrorCode::CorruptHeader, path + " line " + std::to_string(line_no) +
                                                      ": unknown event type '" + fields[0] +
                                                      "'");
        ev.start = parse_time_field(fields[1], path, line_no);
        ev.end = parse_time_field(fields[2], path, line_no);
        if (ev.end < ev.start)
            throw_error(ErrorCode::CorruptHeader,
                        path + " line " + std::to_string(line_no) + ": end precedes start");
        ev.importance = trimmed(fields[3]);
        ev.lat_deg = parse_double_field(fields[4], path, line_no);
        ev.lon_deg = parse_double_field(fields[5], path, line_no);
        events.push_back(std::move(ev));
    }
    if (!header_seen)
        throw_error(ErrorCode::CorruptHeader, path + ": empty catalog, header missing");
    return events;
}

DetectionSet read_detections_ndjson(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw_error(ErrorCode::IoError, "cannot open detections file " + path);

    DetectionSet set;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty())
            continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw_error(ErrorCode::CorruptHeader,
                        path + " line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            const std::string type = j.at("type").get<std::string>();
            if (type == "flare") {
                FlareReport r;
                r.id = j.at("id").get<int>();
                r.start = parse_time_field(j.at("start").get<std::string>(), path, line_no);
                r.peak = parse_time_field(j.at("peak").get<std::string>(), path, line_no);
                r.end = parse_time_field(j.at("end").get<std::string>(), path, line_no);
                r.importance = j.at("importance").get<std::string>();
                r.lat_deg = j.at("lat_deg").get<double>();
                r.lon_deg = j.at("lon_deg").get<double>();
                r.area_msh = j.value("area_msh", 0.0);
                r.rel_intensity = j.value("rel_intensity", 0.0);
                set.flares.push_back(std::move(r));
            } else if (type == "filament_eruption") {
                EruptionReport r;
                r.id = j.at("id").get<int>();
                r.start = parse_time_field(j.at("start").get<std::string>(), path, line_no);
                r.disappearance =
                    parse_time_field(j.at("end").get<std::string>(), path, line_no);
                r.lat_deg = j.at("lat_deg").get<double>();
                r.lon_deg = j.at("lon_deg").get<double>();
                r.length_px = j.value("length_px", 0.0);
                set.eruptions.push_back(std::move(r));
            } else {
                throw_error(ErrorCode::CorruptHeader,
                            path + " line " + std::to_string(line_no) +
                                ": unknown record type '" + type + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw_error(ErrorCode::CorruptHeader,
                        path + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return set;
}

} // namespace hef

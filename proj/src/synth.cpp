#include "hef/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hef/error.hpp"
#include "hef/reports.hpp"
#include "hef/rng.hpp"

namespace hef {

namespace {

constexpr double kEdgeSoft = 1.5; // half-width of every soft edge, px

[[noreturn]] void bad(const std::string& msg) {
    throw_error(ErrorCode::InvalidScenario, msg);
}

// linear edge profile: 1 inside radius-soft, 0 outside radius+soft
double edge(double dist, double radius) {
    const double t = (radius + kEdgeSoft - dist) / (2.0 * kEdgeSoft);
    return std::clamp(t, 0.0, 1.0);
}

double point_segment_dist(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax;
    const double dy = by - ay;
    const double len_sq = dx * dx + dy * dy;
    double t = 0.0;
    if (len_sq > 0.0)
        t = std::clamp(((px - ax) * dx + (py - ay) * dy) / len_sq, 0.0, 1.0);
    return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

double polyline_dist(double px, double py, const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() == 1)
        return std::hypot(px - pts[0].first, py - pts[0].second);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        best = std::min(best, point_segment_dist(px, py, pts[i].first, pts[i].second,
                                                 pts[i + 1].first, pts[i + 1].second));
    return best;
}

// distance to the flare's ribbon pair (or single ribbon when sep = 0)
double flare_dist(const FlareSpec& s, double px, double py, double ox, double oy) {
    const double rad = s.angle_deg * M_PI / 180.0;
    const double ux = std::cos(rad);
    const double uy = std::sin(rad);
    const double nx = -uy;
    const double ny = ux;
    const double cx = s.x + ox;
    const double cy = s.y + oy;
    const double half = s.len / 2.0;
    double best = std::numeric_limits<double>::infinity();
    const int ribbons = s.sep > 0.0 ? 2 : 1;
    for (int k = 0; k < ribbons; ++k) {
        const double off = ribbons == 2 ? (k == 0 ? -0.5 : 0.5) * s.sep : 0.0;
        const double rx = cx + nx * off;
        const double ry = cy + ny * off;
        best = std::min(best, point_segment_dist(px, py, rx - ux * half, ry - uy * half,
                                                 rx + ux * half, ry + uy * half));
    }
    return best;
}

bool filament_drawn(const FilamentSpec& s, int frame, int total_frames) {
    const int last = s.end < 0 ? total_frames - 1 : s.end;
    if (frame < s.start || frame > last)
        return false;
    return s.erupt < 0 || frame < s.erupt;
}

// smooth low-frequency multiplicative attenuation field, one per frame
struct CloudField {
    int nx = 0, ny = 0;
    double cell = 1.0;
    std::vector<double> nodes;

    double at(double x, double y) const {
        if (nodes.empty())
            return 1.0;
        const double gx = std::clamp(x / cell, 0.0, nx - 1.001);
        const double gy = std::clamp(y / cell, 0.0, ny - 1.001);
        const int ix = static_cast<int>(gx);
        const int iy = static_cast<int>(gy);
        double tx = gx - ix;
        double ty = gy - iy;
        tx = tx * tx * (3.0 - 2.0 * tx); // smoothstep keeps the field C1
        ty = ty * ty * (3.0 - 2.0 * ty);
        const double v00 = nodes[static_cast<std::size_t>(iy) * nx + ix];
        const double v10 = nodes[static_cast<std::size_t>(iy) * nx + ix + 1];
        const double v01 = nodes[static_cast<std::size_t>(iy + 1) * nx + ix];
        const double v11 = nodes[static_cast<std::size_t>(iy + 1) * nx + ix + 1];
        return (v00 * (1 - tx) + v10 * tx) * (1 - ty) + (v01 * (1 - tx) + v11 * tx) * ty;
    }
};

CloudField make_cloud_field(int width, int height, double strength, Rng& rng) {
    CloudField field;
    if (strength <= 0.0)
        return field;
    // node spacing >= 128 px so the field stays below the structural bandpass
    field.cell = 128.0;
    field.nx = static_cast<int>(width / field.cell) + 2;
    field.ny = static_cast<int>(height / field.cell) + 2;
    field.nodes.resize(static_cast<std::size_t>(field.nx) * field.ny);
    for (double& v : field.nodes)
        v = 1.0 - strength * rng.uniform();
    return field;
}

struct ObjectAccum {
    long long area = 0;
    double sx = 0.0;
    double sy = 0.0;
};

Timestamp frame_time(const Scenario& sc, int frame) {
    return sc.start_time +
           static_cast<Timestamp>(std::llround(frame * sc.cadence_s * 1e6));
}

void validate(const Scenario& sc, double cx0, double cy0, double radius) {
    if (sc.width < 64 || sc.height < 64 || sc.width > 8192 || sc.height > 8192)
        bad("frame size must be within 64..8192");
    if (sc.frames < 1)
        bad("need at least one frame");
    if (sc.cadence_s <= 0.0)
        bad("cadence must be positive");
    if (radius < 16.0)
        bad("disk radius too small");
    if (sc.limb_u < 0.0 || sc.limb_u > 1.0)
        bad("limb darkening strength must be in [0,1]");
    if (sc.disk_level <= 0.0 || sc.disk_level > 4095.0)
        bad("disk level must be in (0,4095]");
    if (sc.sky_level < 0.0 || sc.sky_level >= sc.disk_level)
        bad("sky level must be below the disk level");
    if (sc.cloud_strength < 0.0 || sc.cloud_strength > 0.95)
        bad("cloud strength must be in [0,0.95]");
    if (sc.noise_sigma < 0.0)
        bad("noise sigma must be non-negative");

    for (int f : {0, sc.frames - 1}) {
        const double cx = cx0 + sc.drift_x * f;
        const double cy = cy0 + sc.drift_y * f;
        if (cx - radius < 2.0 || cx + radius > sc.width - 3.0 || cy - radius < 2.0 ||
            cy + radius > sc.height - 3.0)
            bad("disk leaves the frame during the sequence");
    }

    const double rim = 0.98 * radius;
    auto check_reach = [&](double x, double y, double reach, const char* what) {
        if (std::hypot(x - cx0, y - cy0) + reach + kEdgeSoft > rim)
            bad(std::string(what) + " extends beyond the disk");
    };
    for (const FilamentSpec& s : sc.filaments) {
        if (s.points.empty())
            bad("filament needs at least one point");
        if (s.width < 2.0)
            bad("filament width must be >= 2 px");
        if (s.contrast <= -1.0 || s.contrast >= 0.0)
            bad("filament contrast must be in (-1,0)");
        if (s.start < 0)
            bad("filament start frame must be >= 0");
        if (s.end >= 0 && s.end < s.start)
            bad("filament end precedes start");
        if (s.erupt == 0)
            bad("filament eruption frame must leave at least one visible frame");
        for (const auto& [x, y] : s.points)
            check_reach(x, y, s.width / 2.0, "filament");
    }
    for (const FlareSpec& s : sc.flares) {
        if (s.contrast <= 0.0)
            bad("flare contrast must be positive");
        if (s.len <= 0.0 || s.width <= 0.0 || s.sep < 0.0)
            bad("flare geometry must be positive");
        if (s.rise < 1 || s.decay < 1)
            bad("flare rise and decay must be >= 1 frame");
        if (s.onset < 0)
            bad("flare onset must be >= 0");
        check_reach(s.x, s.y, s.len / 2.0 + s.sep / 2.0 + s.width / 2.0, "flare");
    }
    for (const SunspotSpec& s : sc.sunspots) {
        if (s.r <= 0.0)
            bad("sunspot radius must be positive");
        if (s.contrast <= -1.0 || s.contrast >= 0.0)
            bad("sunspot contrast must be in (-1,0)");
        check_reach(s.x, s.y, s.r, "sunspot");
    }
    for (const PlageSpec& s : sc.plages) {
        if (s.r <= 0.0)
            bad("plage radius must be positive");
        if (s.brightness <= 0.0 || s.brightness > 2.0)
            bad("plage brightness must be in (0,2]");
        check_reach(s.x, s.y, s.r, "plage");
    }
}

} // namespace

double flare_amplitude(const FlareSpec& spec, int frame) {
    if (frame < spec.onset)
        return 0.0;
    const int peak = spec.onset + spec.rise - 1;
    if (frame <= peak)
        return std::min(1.0, static_cast<double>(frame - spec.onset + 1) / spec.rise);
    return std::max(0.0, 1.0 - static_cast<double>(frame - peak) / spec.decay);
}

std::vector<FrameBuffer> generate_sequence(const Scenario& scenario, SynthTruth* truth) {
    const Scenario& sc = scenario;
    const double cx0 = sc.center_x >= 0.0 ? sc.center_x : sc.width / 2.0;
    const double cy0 = sc.center_y >= 0.0 ? sc.center_y : sc.height / 2.0;
    const double radius = sc.radius > 0.0 ? sc.radius : 0.43 * std::min(sc.width, sc.height);
    validate(sc, cx0, cy0, radius);

    const std::size_t n_fil = sc.filaments.size();
    const std::size_t n_fla = sc.flares.size();

    // per-object per-frame pixel statistics, for the event log
    std::vector<std::vector<ObjectAccum>> flare_acc(n_fla,
                                                    std::vector<ObjectAccum>(sc.frames));
    struct LastSighting {
        int frame = -1;
        ObjectAccum acc;
    };
    std::vector<LastSighting> fil_last(n_fil);

    std::vector<FrameBuffer> frames;
    frames.reserve(sc.frames);
    if (truth) {
        *truth = SynthTruth{};
        truth->masks.reserve(sc.frames);
        truth->geoms.reserve(sc.frames);
    }

    for (int f = 0; f < sc.frames; ++f) {
        Rng rng(sc.seed + 0x632be59bd9b4e019ULL * (static_cast<std::uint64_t>(f) + 1));
        const CloudField cloud = make_cloud_field(sc.width, sc.height, sc.cloud_strength, rng);

        const double cx = cx0 + sc.drift_x * f;
        const double cy = cy0 + sc.drift_y * f;
        const double ox = sc.drift_x * f; // objects ride with the disk
        const double oy = sc.drift_y * f;

        FrameBuffer frame(sc.width, sc.height);
        frame.frame_index = f;
        frame.timestamp = frame_time(sc, f);
        LabelMap mask(sc.width, sc.height);
        mask.frame_index = f;
        mask.timestamp = frame.timestamp;

        std::vector<char> fil_on(n_fil, 0);
        std::vector<std::vector<std::pair<double, double>>> fil_pts(n_fil);
        for (std::size_t i = 0; i < n_fil; ++i) {
            fil_on[i] = filament_drawn(sc.filaments[i], f, sc.frames) ? 1 : 0;
            if (!fil_on[i]) continue;
            fil_pts[i].reserve(sc.filaments[i].points.size());
            for (const auto& p : sc.filaments[i].points)
                fil_pts[i].emplace_back(p.first + ox, p.second + oy);
        }
        std::vector<double> fla_amp(n_fla, 0.0);
        for (std::size_t i = 0; i < n_fla; ++i)
            fla_amp[i] = flare_amplitude(sc.flares[i], f);

        std::vector<ObjectAccum> fil_acc(n_fil);

        for (int y = 0; y < sc.height; ++y) {
            for (int x = 0; x < sc.width; ++x) {
                const double dc = std::hypot(x - cx, y - cy);
                const double rho = dc / radius;
                const double rim = edge(dc, radius);

                double base = sc.sky_level;
                if (rim > 0.0) {
                    const double cos_theta = std::sqrt(std::max(0.0, 1.0 - rho * rho));
                    const double disk_val =
                        sc.disk_level * (1.0 - sc.limb_u * (1.0 - cos_theta));
                    base = disk_val * rim + sc.sky_level * (1.0 - rim);
                }

                double factor = 1.0;
                std::uint8_t label = rho < 1.0 ? static_cast<std::uint8_t>(kClassBackground)
                                               : kMaskOffDisk;

                for (std::size_t i = 0; i < n_fil; ++i) {
                    if (!fil_on[i])
                        continue;
                    const FilamentSpec& s = sc.filaments[i];
                    const double d = polyline_dist(x, y, fil_pts[i]);
                    const double e = edge(d, s.width / 2.0);
                    if (e > 0.0)
                        factor *= 1.0 + s.contrast * e;
                    if (rho < 1.0 && d <= s.width / 2.0) {
                        if (label == kClassBackground)
                            label = static_cast<std::uint8_t>(kClassFilament);
                        fil_acc[i].area += 1;
                        fil_acc[i].sx += x;
                        fil_acc[i].sy += y;
                    }
                }

                for (const SunspotSpec& s : sc.sunspots) {
                    const double d = std::hypot(x - (s.x + ox), y - (s.y + oy));
                    const double e = edge(d, s.r);
                    if (e > 0.0)
                        factor *= 1.0 + s.contrast * e;
                    if (rho < 1.0 && d <= s.r)
                        label = static_cast<std::uint8_t>(kClassSunspot);
                }

                for (const PlageSpec& s : sc.plages) {
                    const double d = std::hypot(x - (s.x + ox), y - (s.y + oy));
                    // smooth dome (biweight), not a sharp patch: real plage
                    // fades out gradually
                    if (d < s.r) {
                        const double t = 1.0 - (d / s.r) * (d / s.r);
                        factor *= 1.0 + s.brightness * t * t;
                    }
                    // plage stays background in the ground truth
                }

                for (std::size_t i = 0; i < n_fla; ++i) {
                    if (fla_amp[i] <= 0.0)
                        continue;
                    const FlareSpec& s = sc.flares[i];
                    const double d = flare_dist(s, x, y, ox, oy);
                    const double e = edge(d, s.width / 2.0);
                    if (e > 0.0)
                        factor *= 1.0 + s.contrast * fla_amp[i] * e;
                    // drawn truth: pixels at half the peak lift or more
                    if (rho < 1.0 && fla_amp[i] * e >= 0.5) {
                        label = static_cast<std::uint8_t>(kClassFlare);
                        flare_acc[i][f].area += 1;
                        flare_acc[i][f].sx += x;
                        flare_acc[i][f].sy += y;
                    }
                }

                double value = base * factor * cloud.at(x, y);
                if (sc.noise_sigma > 0.0)
                    value += sc.noise_sigma * rng.normal();
                const long long q =
                    std::clamp<long long>(std::llround(value), 0, 4095);
                frame.at(x, y) = static_cast<float>(q);
                mask.at(x, y) = label;
            }
        }
        for (std::size_t i = 0; i < n_fil; ++i)
            if (fil_on[i] && fil_acc[i].area > 0)
                fil_last[i] = {f, fil_acc[i]};

        if (truth) {
            truth->masks.push_back(std::move(mask));
            truth->geoms.push_back(DiskGeometry{cx, cy, radius});
        }
        frames.push_back(std::move(frame));
    }

    if (truth) {
        constexpr long long kMinTruthArea = 10;
        for (std::size_t i = 0; i < n_fla; ++i) {
            FlareTruth ft;
            ft.spec_index = static_cast<int>(i);
            long long peak_area = 0;
            for (int f = 0; f < sc.frames; ++f) {
                const ObjectAccum& a = flare_acc[i][f];
                if (a.area < kMinTruthArea)
                    continue;
                if (ft.start_frame < 0)
                    ft.start_frame = f;
                ft.end_frame = f;
                if (a.area > peak_area) {
                    peak_area = a.area;
                    ft.peak_frame = f;
                }
            }
            if (ft.start_frame < 0)
                continue; // never reached visible size
            ft.start = frame_time(sc, ft.start_frame);
            ft.peak = frame_time(sc, ft.peak_frame);
            ft.end = frame_time(sc, ft.end_frame);

            const ObjectAccum& pk = flare_acc[i][ft.peak_frame];
            const double pcx = pk.sx / static_cast<double>(pk.area);
            const double pcy = pk.sy / static_cast<double>(pk.area);
            const DiskGeometry& geom = truth->geoms[ft.peak_frame];
            const double rho =
                std::hypot(pcx - geom.center_x, pcy - geom.center_y) / geom.radius;
            const double cos_theta = std::sqrt(std::max(0.0, 1.0 - rho * rho));
            ft.area_msh = static_cast<double>(pk.area) * 1e6 /
                          (2.0 * M_PI * geom.radius * geom.radius * cos_theta);
            ft.importance = importance_from_sq_deg(ft.area_msh / kMshPerSquareDegree);
            const HeliographicPos pos = pixel_to_heliographic(geom, pcx, pcy);
            ft.lat_deg = pos.lat_deg;
            ft.lon_deg = pos.lon_deg;
            truth->flares.push_back(std::move(ft));
        }

        for (std::size_t i = 0; i < n_fil; ++i) {
            const FilamentSpec& s = sc.filaments[i];
            if (s.erupt < 0 || s.erupt >= sc.frames || fil_last[i].frame < 0)
                continue;
            EruptionTruth et;
            et.spec_index = static_cast<int>(i);
            et.frame = s.erupt;
            et.time = frame_time(sc, s.erupt);
            const ObjectAccum& a = fil_last[i].acc;
            const DiskGeometry& geom = truth->geoms[fil_last[i].frame];
            const HeliographicPos pos = pixel_to_heliographic(
                geom, a.sx / static_cast<double>(a.area), a.sy / static_cast<double>(a.area));
            et.lat_deg = pos.lat_deg;
            et.lon_deg = pos.lon_deg;
            truth->eruptions.push_back(std::move(et));
        }
    }

    return frames;
}

namespace {

std::string trimmed(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& text, int line_no) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
        bad("line " + std::to_string(line_no) + ": bad number '" + text + "'");
    return v;
}

int to_int(const std::string& text, int line_no) {
    const double v = to_double(text, line_no);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        bad("line " + std::to_string(line_no) + ": expected integer, got '" + text + "'");
    return static_cast<int>(v);
}

std::vector<std::pair<double, double>> to_points(const std::string& text, int line_no) {
    std::vector<std::pair<double, double>> pts;
    std::stringstream ss(text);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        const auto comma = pair.find(',');
        if (comma == std::string::npos)
            bad("line " + std::to_string(line_no) + ": point must be 'x,y'");
        pts.push_back({to_double(pair.substr(0, comma), line_no),
                       to_double(pair.substr(comma + 1), line_no)});
    }
    if (pts.empty())
        bad("line " + std::to_string(line_no) + ": empty point list");
    return pts;
}

// key=value tokens of an object line
std::vector<std::pair<std::string, std::string>> object_fields(const std::string& text,
                                                               int line_no) {
    std::vector<std::pair<std::string, std::string>> fields;
    std::stringstream ss(text);
    std::string token;
    while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0)
            bad("line " + std::to_string(line_no) + ": expected key=value, got '" + token +
                "'");
        fields.push_back({token.substr(0, eq), token.substr(eq + 1)});
    }
    return fields;
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    Scenario sc;
    std::stringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos)
            raw = raw.substr(0, hash);
        const std::string line = trimmed(raw);
        if (line.empty())
            continue;

        const auto colon = line.find(':');
        const auto equals = line.find('=');
        if (colon != std::string::npos && (equals == std::string::npos || colon < equals)) {
            const std::string kind = trimmed(line.substr(0, colon));
            const auto fields = object_fields(line.substr(colon + 1), line_no);
            if (kind == "filament") {
                FilamentSpec s;
                for (const auto& [k, v] : fields) {
                    if (k == "points") s.points = to_points(v, line_no);
                    else if (k == "width") s.width = to_double(v, line_no);
                    else if (k == "contrast") s.contrast = to_double(v, line_no);
                    else if (k == "start") s.start = to_int(v, line_no);
                    else if (k == "end") s.end = to_int(v, line_no);
                    else if (k == "erupt") s.erupt = to_int(v, line_no);
                    else bad("line " + std::to_string(line_no) + ": unknown filament key '" + k + "'");
                }
                sc.filaments.push_back(std::move(s));
            } else if (kind == "flare") {
                FlareSpec s;
                for (const auto& [k, v] : fields) {
                    if (k == "x") s.x = to_double(v, line_no);
                    else if (k == "y") s.y = to_double(v, line_no);
                    else if (k == "len") s.len = to_double(v, line_no);
                    else if (k == "width") s.width = to_double(v, line_no);
                    else if (k == "angle") s.angle_deg = to_double(v, line_no);
                    else if (k == "sep") s.sep = to_double(v, line_no);
                    else if (k == "contrast") s.contrast = to_double(v, line_no);
                    else if (k == "onset") s.onset = to_int(v, line_no);
                    else if (k == "rise") s.rise = to_int(v, line_no);
                    else if (k == "decay") s.decay = to_int(v, line_no);
                    else bad("line " + std::to_string(line_no) + ": unknown flare key '" + k + "'");
                }
                sc.flares.push_back(s);
            } else if (kind == "sunspot") {
                SunspotSpec s;
                for (const auto& [k, v] : fields) {
                    if (k == "x") s.x = to_double(v, line_no);
                    else if (k == "y") s.y = to_double(v, line_no);
                    else if (k == "r") s.r = to_double(v, line_no);
                    else if (k == "contrast") s.contrast = to_double(v, line_no);
                    else bad("line " + std::to_string(line_no) + ": unknown sunspot key '" + k + "'");
                }
                sc.sunspots.push_back(s);
            } else if (kind == "plage") {
                PlageSpec s;
                for (const auto& [k, v] : fields) {
                    if (k == "x") s.x = to_double(v, line_no);
                    else if (k == "y") s.y = to_double(v, line_no);
                    else if (k == "r") s.r = to_double(v, line_no);
                    else if (k == "brightness") s.brightness = to_double(v, line_no);
                    else bad("line " + std::to_string(line_no) + ": unknown plage key '" + k + "'");
                }
                sc.plages.push_back(s);
            } else {
                bad("line " + std::to_string(line_no) + ": unknown object '" + kind + "'");
            }
            continue;
        }

        if (equals == std::string::npos)
            bad("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trimmed(line.substr(0, equals));
        const std::string value = trimmed(line.substr(equals + 1));
        if (key == "size") {
            sc.width = sc.height = to_int(value, line_no);
        } else if (key == "width") {
            sc.width = to_int(value, line_no);
        } else if (key == "height") {
            sc.height = to_int(value, line_no);
        } else if (key == "frames") {
            sc.frames = to_int(value, line_no);
        } else if (key == "cadence_s") {
            sc.cadence_s = to_double(value, line_no);
        } else if (key == "seed") {
            const double v = to_double(value, line_no);
            if (v < 0 || v != std::floor(v))
                bad("line " + std::to_string(line_no) + ": seed must be a non-negative integer");
            sc.seed = static_cast<std::uint64_t>(v);
        } else if (key == "start") {
            const auto ts = parse_rfc3339(value);
            if (!ts)
                bad("line " + std::to_string(line_no) + ": bad start timestamp");
            sc.start_time = *ts;
        } else if (key == "disk.center_x") {
            sc.center_x = to_double(value, line_no);
        } else if (key == "disk.center_y") {
            sc.center_y = to_double(value, line_no);
        } else if (key == "disk.radius") {
            sc.radius = to_double(value, line_no);
        } else if (key == "disk.drift_x") {
            sc.drift_x = to_double(value, line_no);
        } else if (key == "disk.drift_y") {
            sc.drift_y = to_double(value, line_no);
        } else if (key == "disk.level") {
            sc.disk_level = to_double(value, line_no);
        } else if (key == "limb_u") {
            sc.limb_u = to_double(value, line_no);
        } else if (key == "sky_level") {
            sc.sky_level = to_double(value, line_no);
        } else if (key == "cloud_strength") {
            sc.cloud_strength = to_double(value, line_no);
        } else if (key == "noise_sigma") {
            sc.noise_sigma = to_double(value, line_no);
        } else {
            bad("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw_error(ErrorCode::IoError, "cannot open scenario " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string event_log_json(const Scenario& scenario, const SynthTruth& truth) {
    nlohmann::ordered_json j;
    j["frames"] = scenario.frames;
    j["cadence_s"] = scenario.cadence_s;
    j["flares"] = nlohmann::ordered_json::array();
    for (const FlareTruth& ft : truth.flares) {
        nlohmann::ordered_json e;
        e["spec_index"] = ft.spec_index;
        e["start_frame"] = ft.start_frame;
        e["peak_frame"] = ft.peak_frame;
        e["end_frame"] = ft.end_frame;
        e["start"] = format_rfc3339(ft.start);
        e["peak"] = format_rfc3339(ft.peak);
        e["end"] = format_rfc3339(ft.end);
        e["importance"] = ft.importance;
        e["lat_deg"] = ft.lat_deg;
        e["lon_deg"] = ft.lon_deg;
        e["area_msh"] = ft.area_msh;
        j["flares"].push_back(std::move(e));
    }
    j["eruptions"] = nlohmann::ordered_json::array();
    for (const EruptionTruth& et : truth.eruptions) {
        nlohmann::ordered_json e;
        e["spec_index"] = et.spec_index;
        e["frame"] = et.frame;
        e["time"] = format_rfc3339(et.time);
        e["lat_deg"] = et.lat_deg;
        e["lon_deg"] = et.lon_deg;
        j["eruptions"].push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

std::string reference_csv(const SynthTruth& truth) {
    std::string out = "type,start,end,importance,lat,lon\n";
    char buf[160];
    for (const FlareTruth& ft : truth.flares) {
        std::snprintf(buf, sizeof(buf), "flare,%s,%s,%s,%.4f,%.4f\n",
                      format_rfc3339(ft.start).c_str(), format_rfc3339(ft.end).c_str(),
                      ft.importance.c_str(), ft.lat_deg, ft.lon_deg);
        out += buf;
    }
    for (const EruptionTruth& et : truth.eruptions) {
        std::snprintf(buf, sizeof(buf), "filament_eruption,%s,%s,,%.4f,%.4f\n",
                      format_rfc3339(et.time).c_str(), format_rfc3339(et.time).c_str(),
                      et.lat_deg, et.lon_deg);
        out += buf;
    }
    return out;
}

} // namespace hef

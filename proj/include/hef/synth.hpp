#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hef/disk.hpp"
#include "hef/frame.hpp"
#include "hef/label_map.hpp"
#include "hef/timeutil.hpp"

namespace hef {

/// Mask value for pixels outside the synthetic disk (ignored in training).
inline constexpr std::uint8_t kMaskOffDisk = 255;

struct FilamentSpec {
    std::vector<std::pair<double, double>> points; // polyline, frame-0 pixels
    double width = 8.0;    // full stroke width
    double contrast = -0.9; // multiplicative, relative to local disk
    int start = 0;
    int end = -1;   // last frame drawn, -1 = sequence end
    int erupt = -1; // first frame absent, -1 = never
};

struct FlareSpec {
    double x = 0.0, y = 0.0; // center, frame-0 pixels
    double len = 30.0;       // ribbon length along the axis
    double width = 10.0;     // ribbon width
    double angle_deg = 0.0;
    double sep = 0.0; // distance between the two ribbons, 0 = single ribbon
    double contrast = 2.0;
    int onset = 0;
    int rise = 3;
    int decay = 8;
};

struct SunspotSpec {
    double x = 0.0, y = 0.0;
    double r = 8.0;
    double contrast = -0.65;
};

struct PlageSpec {
    double x = 0.0, y = 0.0;
    double r = 25.0;
    double brightness = 0.3;
};

struct Scenario {
    int width = 512;
    int height = 512;
    int frames = 60;
    double cadence_s = 30.0;
    std::uint64_t seed = 1;
    Timestamp start_time = 1341216000000000LL; // 2012-07-02T08:00:00Z

    double center_x = -1.0; // -1 = frame center
    double center_y = -1.0;
    double radius = -1.0; // -1 = 0.43 * min(width, height)
    double drift_x = 0.0; // disk drift per frame; objects ride along
    double drift_y = 0.0;

    double limb_u = 0.85;      // limb-darkening strength
    double disk_level = 2800.0; // quiet center intensity, 12-bit DN
    double sky_level = 40.0;
    double cloud_strength = 0.0; // 0 = clear sky, else max attenuation depth
    double noise_sigma = 0.0;    // Gaussian, DN

    std::vector<FilamentSpec> filaments;
    std::vector<FlareSpec> flares;
    std::vector<SunspotSpec> sunspots;
    std::vector<PlageSpec> plages;
};

/// Event log entries derived from the painted ground truth.
struct FlareTruth {
    int spec_index = 0;
    int start_frame = -1; // first/last frame with >= 10 px drawn
    int peak_frame = -1;
    int end_frame = -1;
    Timestamp start = 0;
    Timestamp peak = 0;
    Timestamp end = 0;
    std::string importance;
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double area_msh = 0.0;
};

struct EruptionTruth {
    int spec_index = 0;
    int frame = 0; // first frame the filament is gone
    Timestamp time = 0;
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

struct SynthTruth {
    std::vector<LabelMap> masks;     // per frame; kMaskOffDisk outside the limb
    std::vector<DiskGeometry> geoms; // true per-frame geometry
    std::vector<FlareTruth> flares;
    std::vector<EruptionTruth> eruptions;
};

/// Parses the scenario text format: `key = value` lines plus one-line object
/// declarations ("filament: points=x,y;x,y width=8 ..."). '#' starts a
/// comment. Throws InvalidScenario on unknown keys or bad values.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Flare amplitude profile: 0 before onset, linear rise to 1 over `rise`
/// frames, then linear decay to 0 over `decay` frames.
double flare_amplitude(const FlareSpec& spec, int frame);

/// Renders the scenario: limb-darkened drifting disk, multiplicative objects
/// and clouds, Gaussian noise, quantized to 12-bit. Bit-identical for equal
/// scenarios. `truth` (optional) receives per-frame label maps, the true
/// geometry, and the event log.
std::vector<FrameBuffer> generate_sequence(const Scenario& scenario, SynthTruth* truth);

/// Serialization used by the synth command: frames as 16-bit PGM with
/// timestamped names, masks as 8-bit PGM, the event log as JSON, and the
/// reference catalog CSV the eval command reads.
std::string event_log_json(const Scenario& scenario, const SynthTruth& truth);
std::string reference_csv(const SynthTruth& truth);

} // namespace hef

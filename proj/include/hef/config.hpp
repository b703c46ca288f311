#pragma once

#include <cstdint>
#include <string>

namespace hef {

/// Every tunable of the pipeline, addressable by its dotted key (e.g.
/// "segment.lambda_data") in config files and --set overrides.
struct PipelineConfig {
    double preprocess_lambda1 = 0.9;
    double preprocess_lambda2 = 0.1;
    int preprocess_pyramid_levels = 5;
    int preprocess_solver_iters = 200; // TV-L1 sweep budget per bandpass solve

    int classmodel_components = 3;
    double classmodel_temporal_alpha = 0.5;
    std::uint64_t classmodel_train_seed = 1;
    int classmodel_max_samples = 20000; // per-class training subsample cap

    double segment_lambda_data = 5.0;
    int segment_solver_iters = 80; // Potts relaxation sweep budget

    double events_group_dist_filament = 25.0;
    double events_group_dist_flare = 150.0;
    int events_vote_window = 5;
    double events_sunspot_border_px = 20.0;
    double events_compactness_max = 0.6;
    int events_min_area = 10;
    double events_eruption_window_s = 900.0;
    double events_limb_radial = 0.95; // set above 1 to disable the limb guard
    int events_min_lifetime = 3;
    // Flare components (and finished tracks) whose mean intensity stays
    // below this multiple of the disk mean are discarded as bright-plage
    // false positives. The disk mean includes limb darkening, so quiet-sun
    // center sits near 1.4 and flares at 2.5 and up.
    double events_flare_min_rel_intensity = 1.9;

    double eval_flare_time_s = 600.0;
    double eval_flare_deg = 10.0;
    double eval_eruption_time_s = 1800.0;
    double eval_eruption_deg = 15.0;
};

/// Parses `key = value` lines ('#' comments). Unknown keys or unparseable
/// values throw BadConfig with the line number.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);

/// Applies one "key=value" override (the --set flag). Throws BadConfig.
void apply_override(PipelineConfig& config, const std::string& assignment);

/// Range checks across fields; call after loading and overrides.
void validate_config(const PipelineConfig& config);

/// Effective settings as sorted `key = value` lines.
std::string dump_config(const PipelineConfig& config);

} // namespace hef

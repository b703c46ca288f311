#include "hef/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "hef/error.hpp"

namespace hef {

namespace {

enum class FieldKind { Double, Int, U64 };

struct FieldEntry {
    const char* key;
    FieldKind kind;
    double PipelineConfig::*d = nullptr;
    int PipelineConfig::*i = nullptr;
    std::uint64_t PipelineConfig::*u = nullptr;
};

const std::vector<FieldEntry>& fields() {
    static const std::vector<FieldEntry> table = {
        {"preprocess.lambda1", FieldKind::Double, &PipelineConfig::preprocess_lambda1},
        {"preprocess.lambda2", FieldKind::Double, &PipelineConfig::preprocess_lambda2},
        {"preprocess.pyramid_levels", FieldKind::Int, nullptr,
         &PipelineConfig::preprocess_pyramid_levels},
        {"preprocess.solver_iters", FieldKind::Int, nullptr,
         &PipelineConfig::preprocess_solver_iters},
        {"classmodel.components", FieldKind::Int, nullptr, &PipelineConfig::classmodel_components},
        {"classmodel.temporal_alpha", FieldKind::Double,
         &PipelineConfig::classmodel_temporal_alpha},
        {"classmodel.train_seed", FieldKind::U64, nullptr, nullptr,
         &PipelineConfig::classmodel_train_seed},
        {"classmodel.max_samples", FieldKind::Int, nullptr,
         &PipelineConfig::classmodel_max_samples},
        {"segment.lambda_data", FieldKind::Double, &PipelineConfig::segment_lambda_data},
        {"segment.solver_iters", FieldKind::Int, nullptr, &PipelineConfig::segment_solver_iters},
        {"events.group_dist_filament", FieldKind::Double,
         &PipelineConfig::events_group_dist_filament},
        {"events.group_dist_flare", FieldKind::Double, &PipelineConfig::events_group_dist_flare},
        {"events.vote_window", FieldKind::Int, nullptr, &PipelineConfig::events_vote_window},
        {"events.sunspot_border_px", FieldKind::Double,
         &PipelineConfig::events_sunspot_border_px},
        {"events.compactness_max", FieldKind::Double, &PipelineConfig::events_compactness_max},
        {"events.min_area", FieldKind::Int, nullptr, &PipelineConfig::events_min_area},
        {"events.eruption_window_s", FieldKind::Double,
         &PipelineConfig::events_eruption_window_s},
        {"events.limb_radial", FieldKind::Double, &PipelineConfig::events_limb_radial},
        {"events.min_lifetime", FieldKind::Int, nullptr, &PipelineConfig::events_min_lifetime},
        {"events.flare_min_rel_intensity", FieldKind::Double,
         &PipelineConfig::events_flare_min_rel_intensity},
        {"eval.flare_time_s", FieldKind::Double, &PipelineConfig::eval_flare_time_s},
        {"eval.flare_deg", FieldKind::Double, &PipelineConfig::eval_flare_deg},
        {"eval.eruption_time_s", FieldKind::Double, &PipelineConfig::eval_eruption_time_s},
        {"eval.eruption_deg", FieldKind::Double, &PipelineConfig::eval_eruption_deg},
    };
    return table;
}

std::string trimmed(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

void set_field(PipelineConfig& config, const std::string& key, const std::string& value,
               const std::string& where) {
    for (const FieldEntry& f : fields()) {
        if (key != f.key)
            continue;
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (value.empty() || end != value.c_str() + value.size() || !std::isfinite(v))
            throw_error(ErrorCode::BadConfig, where + ": bad value '" + value + "' for " + key);
        switch (f.kind) {
        case FieldKind::Double:
            config.*(f.d) = v;
            return;
        case FieldKind::Int:
            if (v != std::floor(v) || std::abs(v) > 1e9)
                throw_error(ErrorCode::BadConfig,
                            where + ": " + key + " expects an integer, got '" + value + "'");
            config.*(f.i) = static_cast<int>(v);
            return;
        case FieldKind::U64:
            if (v < 0 || v != std::floor(v))
                throw_error(ErrorCode::BadConfig, where + ": " + key +
                                                      " expects a non-negative integer, got '" +
                                                      value + "'");
            config.*(f.u) = static_cast<std::uint64_t>(v);
            return;
        }
    }
    throw_error(ErrorCode::BadConfig, where + ": unknown config key '" + key + "'");
}

} // namespace

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig config;
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
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw_error(ErrorCode::BadConfig,
                        "config line " + std::to_string(line_no) + ": expected 'key = value'");
        set_field(config, trimmed(line.substr(0, eq)), trimmed(line.substr(eq + 1)),
                  "config line " + std::to_string(line_no));
    }
    return config;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw_error(ErrorCode::IoError, "cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_override(PipelineConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw_error(ErrorCode::BadConfig, "--set expects key=value, got '" + assignment + "'");
    set_field(config, trimmed(assignment.substr(0, eq)), trimmed(assignment.substr(eq + 1)),
              "--set " + assignment);
}

void validate_config(const PipelineConfig& c) {
    auto fail = [](const std::string& msg) { throw_error(ErrorCode::BadConfig, msg); };
    if (c.preprocess_lambda2 <= 0.0 || c.preprocess_lambda1 <= c.preprocess_lambda2)
        fail("preprocess.lambda1 must exceed preprocess.lambda2 > 0");
    if (c.preprocess_pyramid_levels < 1 || c.preprocess_pyramid_levels > 12)
        fail("preprocess.pyramid_levels must be in 1..12");
    if (c.preprocess_solver_iters < 1)
        fail("preprocess.solver_iters must be positive");
    if (c.classmodel_components < 1 || c.classmodel_components > 32)
        fail("classmodel.components must be in 1..32");
    if (c.classmodel_temporal_alpha <= 0.0 || c.classmodel_temporal_alpha > 1.0)
        fail("classmodel.temporal_alpha must be in (0,1]");
    if (c.classmodel_max_samples < 100)
        fail("classmodel.max_samples must be at least 100");
    if (c.segment_lambda_data <= 0.0)
        fail("segment.lambda_data must be positive");
    if (c.segment_solver_iters < 1)
        fail("segment.solver_iters must be positive");
    if (c.events_group_dist_filament <= 0.0 || c.events_group_dist_flare <= 0.0)
        fail("grouping distances must be positive");
    if (c.events_vote_window < 1)
        fail("events.vote_window must be at least 1");
    if (c.events_sunspot_border_px < 0.0)
        fail("events.sunspot_border_px must be non-negative");
    if (c.events_compactness_max <= 0.0 || c.events_compactness_max > 1.0)
        fail("events.compactness_max must be in (0,1]");
    if (c.events_min_area < 1)
        fail("events.min_area must be at least 1");
    if (c.events_eruption_window_s <= 0.0)
        fail("events.eruption_window_s must be positive");
    if (c.events_limb_radial <= 0.0)
        fail("events.limb_radial must be positive");
    if (c.events_min_lifetime < 1)
        fail("events.min_lifetime must be at least 1");
    if (c.events_flare_min_rel_intensity < 0.0)
        fail("events.flare_min_rel_intensity must be non-negative");
    if (c.eval_flare_time_s <= 0.0 || c.eval_eruption_time_s <= 0.0)
        fail("eval time tolerances must be positive");
    if (c.eval_flare_deg <= 0.0 || c.eval_eruption_deg <= 0.0)
        fail("eval distance tolerances must be positive");
}

std::string dump_config(const PipelineConfig& config) {
    std::string out;
    char buf[128];
    for (const FieldEntry& f : fields()) {
        switch (f.kind) {
        case FieldKind::Double:
            std::snprintf(buf, sizeof(buf), "%s = %g\n", f.key, config.*(f.d));
            break;
        case FieldKind::Int:
            std::snprintf(buf, sizeof(buf), "%s = %d\n", f.key, config.*(f.i));
            break;
        case FieldKind::U64:
            std::snprintf(buf, sizeof(buf), "%s = %llu\n", f.key,
                          static_cast<unsigned long long>(config.*(f.u)));
            break;
        }
        out += buf;
    }
    return out;
}

} // namespace hef

#pragma once

#include <string>

#include "hef/config.hpp"
#include "hef/error.hpp"

namespace hef {

struct TrainArgs {
    std::string frames_dir;
    std::string masks_dir;
    std::string model_out;
};

struct DetectArgs {
    std::string frames_dir;
    std::string model_path;
    std::string out_path;  // empty or "-" writes NDJSON to stdout
    std::string debug_dir; // empty disables debug dumps
};

struct EvalArgs {
    std::string detections_path;
    std::string reference_path;
    std::string out_path; // optional; the report always goes to stdout
};

struct SynthArgs {
    std::string scenario_path;
    std::string out_dir;
};

int cmd_train(const PipelineConfig& config, const TrainArgs& args);
int cmd_detect(const PipelineConfig& config, const DetectArgs& args);
int cmd_eval(const PipelineConfig& config, const EvalArgs& args);
int cmd_synth(const PipelineConfig& config, const SynthArgs& args);

/// 2 for input/usage-class failures (bad config, malformed inputs, missing
/// samples), 1 for runtime processing failures.
int exit_code_for(const Error& error);

} // namespace hef

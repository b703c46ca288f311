#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hef/commands.hpp"
#include "hef/config.hpp"

namespace {

hef::PipelineConfig build_config(const std::string& config_path,
                                 const std::vector<std::string>& overrides, bool print) {
    hef::PipelineConfig config;
    if (!config_path.empty()) config = hef::load_config(config_path);
    for (const std::string& kv : overrides) hef::apply_override(config, kv);
    hef::validate_config(config);
    if (print) std::fputs(hef::dump_config(config).c_str(), stdout);
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"H-alpha flare and filament event detection"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    bool print_config = false;
    app.add_option("--config", config_path, "configuration file (dotted keys)");
    app.add_option("--set", overrides, "override one key, e.g. --set segment.lambda_data=4")
        ->take_all();
    app.add_flag("--print-config", print_config, "dump the effective configuration");

    hef::TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "fit the class model from annotated frames");
    train->add_option("--frames", train_args.frames_dir, "frame directory")->required();
    train->add_option("--masks", train_args.masks_dir, "label mask directory")->required();
    train->add_option("--model-out", train_args.model_out, "output model path")->required();

    hef::DetectArgs detect_args;
    CLI::App* detect = app.add_subcommand("detect", "run detection over a frame sequence");
    detect->add_option("--frames", detect_args.frames_dir, "frame directory")->required();
    detect->add_option("--model", detect_args.model_path, "trained model path")->required();
    detect->add_option("--out", detect_args.out_path, "NDJSON output path ('-' for stdout)");
    detect->add_option("--debug-dir", detect_args.debug_dir, "write per-frame debug images here");

    hef::EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "score detections against a reference catalog");
    eval->add_option("--detections", eval_args.detections_path, "NDJSON detections")->required();
    eval->add_option("--reference", eval_args.reference_path, "reference catalog CSV")->required();
    eval->add_option("--out", eval_args.out_path, "also write the JSON report here");

    hef::SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "render a synthetic scenario");
    synth->add_option("--scenario", synth_args.scenario_path, "scenario description file")
        ->required();
    synth->add_option("--out-dir", synth_args.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        hef::PipelineConfig config = build_config(config_path, overrides, print_config);
        if (train->parsed()) return hef::cmd_train(config, train_args);
        if (detect->parsed()) return hef::cmd_detect(config, detect_args);
        if (eval->parsed()) return hef::cmd_eval(config, eval_args);
        return hef::cmd_synth(config, synth_args);
    } catch (const hef::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return hef::exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

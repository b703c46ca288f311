#include "hef/commands.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hef/gmm.hpp"
#include "hef/image_io.hpp"
#include "hef/pipeline.hpp"
#include "hef/scoring.hpp"
#include "hef/synth.hpp"
#include "hef/timeutil.hpp"

namespace hef {

namespace {

const char* kClassNames[kNumClasses] = {"sunspot", "filament", "flare", "background"};

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw_error(ErrorCode::IoError, "cannot create " + path + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
    out << text;
    if (!out) throw_error(ErrorCode::IoError, "short write to " + path);
}

nlohmann::ordered_json score_json(const MatchCounts& counts) {
    PrfScores scores = prf(counts);
    nlohmann::ordered_json j;
    j["true_positives"] = counts.true_positives;
    j["false_positives"] = counts.false_positives;
    j["false_negatives"] = counts.false_negatives;
    j["precision"] = scores.precision;
    j["recall"] = scores.recall;
    j["f_score"] = scores.f_score;
    if (scores.degenerate) j["degenerate"] = true;
    return j;
}

} // namespace

int cmd_train(const PipelineConfig& config, const TrainArgs& args) {
    std::vector<std::string> frames = list_frame_files(args.frames_dir);
    std::vector<std::string> masks = list_frame_files(args.masks_dir);
    if (frames.empty()) throw_error(ErrorCode::BadConfig, "no frames in " + args.frames_dir);
    if (frames.size() != masks.size())
        throw_error(ErrorCode::BadConfig,
                    std::to_string(frames.size()) + " frames vs " + std::to_string(masks.size()) +
                        " masks; the directories must pair up one to one");

    std::vector<TrainInput> inputs;
    inputs.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) inputs.push_back({frames[i], masks[i]});

    TrainSummary summary;
    GmmModel model = train_model(config, inputs, &summary);
    save_model(model, args.model_out);

    for (int k = 0; k < kNumClasses; ++k)
        std::printf("class %d (%s): %lld px labeled, %lld used\n", k, kClassNames[k],
                    summary.samples_per_class[k], summary.samples_used[k]);
    std::printf("final log-likelihood: %.6f\n", summary.final_log_likelihood);
    std::printf("model written to %s\n", args.model_out.c_str());
    return 0;
}

int cmd_detect(const PipelineConfig& config, const DetectArgs& args) {
    GmmModel model = load_model(args.model_path);
    SequenceManifest manifest = build_manifest(list_frame_files(args.frames_dir));
    if (!args.debug_dir.empty()) ensure_directory(args.debug_dir);

    const bool to_stdout = args.out_path.empty() || args.out_path == "-";
    std::ofstream file;
    if (!to_stdout) {
        file.open(args.out_path, std::ios::binary);
        if (!file) throw_error(ErrorCode::IoError, "cannot write " + args.out_path);
    }
    std::ostream& out = to_stdout ? std::cout : file;

    DetectPipeline pipeline(config, std::move(model), args.debug_dir);
    long long emitted = 0;
    auto emit = [&](const std::vector<std::string>& records) {
        for (const std::string& line : records) {
            out << line << '\n';
            ++emitted;
        }
        out.flush(); // keep completed events on disk even if we stop mid-sequence
    };

    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& entry = manifest.entries[i];
        FrameBuffer frame;
        try {
            frame = load_frame(entry.path, static_cast<int>(i));
        } catch (const Error& e) {
            std::fprintf(stderr, "frame %zu (%s): skipped: %s\n", i, entry.path.c_str(), e.what());
            continue;
        }
        frame.frame_index = static_cast<int>(i);
        frame.timestamp = entry.timestamp;
        emit(pipeline.process_frame(frame));
    }
    emit(pipeline.finish());

    if (!to_stdout && !file) throw_error(ErrorCode::IoError, "short write to " + args.out_path);
    std::fprintf(stderr, "%d frames processed, %d skipped, %lld events\n", pipeline.processed(),
                 pipeline.skipped(), emitted);
    return 0;
}

int cmd_eval(const PipelineConfig& config, const EvalArgs& args) {
    DetectionSet detections = read_detections_ndjson(args.detections_path);
    std::vector<ReferenceEvent> reference = read_reference_csv(args.reference_path);

    MatchTolerances tol;
    tol.flare_time_s = config.eval_flare_time_s;
    tol.flare_deg = config.eval_flare_deg;
    tol.eruption_time_s = config.eval_eruption_time_s;
    tol.eruption_deg = config.eval_eruption_deg;

    // Scores are grouped by UTC day, matching within each day: detections are
    // keyed by the timestamp their matching rule compares (flare start,
    // eruption disappearance).
    struct DayBucket {
        std::vector<FlareReport> flares;
        std::vector<EruptionReport> eruptions;
        std::vector<ReferenceEvent> ref_flares;
        std::vector<ReferenceEvent> ref_eruptions;
    };
    std::map<std::string, DayBucket> days;
    for (const FlareReport& r : detections.flares) days[utc_date(r.start)].flares.push_back(r);
    for (const EruptionReport& r : detections.eruptions)
        days[utc_date(r.disappearance)].eruptions.push_back(r);
    for (const ReferenceEvent& r : reference) {
        if (r.type == "flare")
            days[utc_date(r.start)].ref_flares.push_back(r);
        else
            days[utc_date(r.start)].ref_eruptions.push_back(r);
    }

    MatchCounts flare_total, eruption_total;
    nlohmann::ordered_json day_reports = nlohmann::ordered_json::array();
    for (const auto& [date, bucket] : days) {
        MatchCounts fc = match_flares(bucket.flares, bucket.ref_flares, tol);
        MatchCounts ec = match_eruptions(bucket.eruptions, bucket.ref_eruptions, tol);
        flare_total.true_positives += fc.true_positives;
        flare_total.false_positives += fc.false_positives;
        flare_total.false_negatives += fc.false_negatives;
        eruption_total.true_positives += ec.true_positives;
        eruption_total.false_positives += ec.false_positives;
        eruption_total.false_negatives += ec.false_negatives;

        nlohmann::ordered_json day;
        day["date"] = date;
        day["flares"] = score_json(fc);
        day["eruptions"] = score_json(ec);
        day_reports.push_back(std::move(day));
    }

    nlohmann::ordered_json report;
    report["days"] = std::move(day_reports);
    report["totals"]["flares"] = score_json(flare_total);
    report["totals"]["eruptions"] = score_json(eruption_total);

    std::string text = report.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!args.out_path.empty()) write_text(args.out_path, text);
    return 0;
}

int cmd_synth(const PipelineConfig& config, const SynthArgs& args) {
    (void)config; // generation is driven entirely by the scenario file
    Scenario scenario = load_scenario(args.scenario_path);

    const std::string frames_dir = args.out_dir + "/frames";
    const std::string masks_dir = args.out_dir + "/masks";
    ensure_directory(frames_dir);
    ensure_directory(masks_dir);

    SynthTruth truth;
    std::vector<FrameBuffer> frames = generate_sequence(scenario, &truth);

    char name[80];
    for (std::size_t i = 0; i < frames.size(); ++i) {
        CivilTime civil = timestamp_to_civil(frames[i].timestamp);
        std::snprintf(name, sizeof name, "/synth_%06zu_%04d%02d%02d_%02d%02d%02d.pgm", i,
                      civil.year, civil.month, civil.day, civil.hour, civil.minute, civil.second);
        write_pgm16(frames_dir + name, frames[i]);

        const LabelMap& mask = truth.masks[i];
        std::snprintf(name, sizeof name, "/mask_%06zu.pgm", i);
        write_pgm8(masks_dir + name, mask.labels, mask.width, mask.height);
    }

    write_text(args.out_dir + "/events.json", event_log_json(scenario, truth));
    write_text(args.out_dir + "/reference.csv", reference_csv(truth));

    std::printf("%zu frames, %zu flares, %zu eruptions -> %s\n", frames.size(),
                truth.flares.size(), truth.eruptions.size(), args.out_dir.c_str());
    return 0;
}

int exit_code_for(const Error& error) {
    switch (error.code()) {
    case ErrorCode::BadConfig:
    case ErrorCode::InvalidScenario:
    case ErrorCode::CorruptHeader:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::MissingTimestamp:
    case ErrorCode::InsufficientSamples:
    case ErrorCode::IoError:
        return 2;
    default:
        return 1;
    }
}

} // namespace hef

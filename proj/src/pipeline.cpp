#include "hef/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "hef/components.hpp"
#include "hef/error.hpp"
#include "hef/filters.hpp"
#include "hef/image_io.hpp"
#include "hef/reports.hpp"
#include "hef/rng.hpp"
#include "hef/segment.hpp"
#include "hef/skeleton.hpp"

namespace hef {

namespace {

// Bandpassed values above this count as bright (plage or flare) for the
// roundness filter, on top of pixels already labeled flare.
constexpr float kBrightLevel = 1.0f;

double group_mean(const Component& g, const FrameBuffer& frame) {
    if (g.area <= 0) return 0.0;
    double sum = 0.0;
    for (const PixelRun& r : g.runs)
        for (int x = r.x0; x <= r.x1; ++x) sum += frame.at(x, r.y);
    return sum / static_cast<double>(g.area);
}

double disk_mean(const FrameBuffer& frame, const DiskGeometry& geom) {
    double sum = 0.0;
    long long n = 0;
    for (int y = 0; y < frame.height; ++y) {
        double dy = (y - geom.center_y) / geom.radius;
        for (int x = 0; x < frame.width; ++x) {
            double dx = (x - geom.center_x) / geom.radius;
            if (dx * dx + dy * dy < 1.0) {
                sum += frame.at(x, y);
                ++n;
            }
        }
    }
    if (n == 0) throw_error(ErrorCode::DiskNotFound, "disk lies outside the frame");
    return sum / static_cast<double>(n);
}

void write_scaled_pgm(const std::string& path, const float* data, int width, int height) {
    std::size_t n = static_cast<std::size_t>(width) * height;
    float lo = data[0], hi = data[0];
    for (std::size_t i = 1; i < n; ++i) {
        lo = std::min(lo, data[i]);
        hi = std::max(hi, data[i]);
    }
    float span = hi - lo;
    if (span <= 0.0f) span = 1.0f;
    std::vector<std::uint8_t> bytes(n);
    for (std::size_t i = 0; i < n; ++i)
        bytes[i] = static_cast<std::uint8_t>(std::lround((data[i] - lo) / span * 255.0f));
    write_pgm8(path, bytes, width, height);
}

} // namespace

GmmModel train_model(const PipelineConfig& config, const std::vector<TrainInput>& inputs,
                     TrainSummary* summary) {
    if (inputs.empty()) throw_error(ErrorCode::BadConfig, "no training frames");

    BandpassParams bp;
    bp.lambda1 = config.preprocess_lambda1;
    bp.lambda2 = config.preprocess_lambda2;
    bp.max_iters = config.preprocess_solver_iters;
    std::array<std::vector<FeatureSample>, kNumClasses> per_class;

    for (std::size_t i = 0; i < inputs.size(); ++i) {
        FrameBuffer raw = load_frame(inputs[i].frame_path, static_cast<int>(i));
        int mw = 0, mh = 0;
        std::vector<std::uint8_t> mask = read_pgm8(inputs[i].mask_path, mw, mh);
        if (mw != raw.width || mh != raw.height)
            throw_error(ErrorCode::DimensionMismatch,
                        inputs[i].mask_path + ": mask is " + std::to_string(mw) + "x" +
                            std::to_string(mh) + ", frame is " + std::to_string(raw.width) + "x" +
                            std::to_string(raw.height));

        DiskGeometry geom = estimate_disk(raw);
        FrameBuffer band = structural_bandpass(normalize(raw), bp);

        for (int y = 0; y < band.height; ++y) {
            double dy = (y - geom.center_y) / geom.radius;
            for (int x = 0; x < band.width; ++x) {
                std::uint8_t label = mask[static_cast<std::size_t>(y) * mw + x];
                if (label >= kNumClasses) continue; // 255 marks off-disk / unlabeled
                double dx = (x - geom.center_x) / geom.radius;
                double radial = std::sqrt(dx * dx + dy * dy);
                if (radial >= 1.0) continue;
                per_class[label].push_back({band.at(x, y), radial, label});
            }
        }
    }

    // Per-class subsampling keeps training time bounded on large sets;
    // partial Fisher-Yates so the draw is deterministic for a given seed.
    Rng rng(config.classmodel_train_seed ^ 0x7261696e5f737562ULL);
    std::vector<FeatureSample> samples;
    for (int k = 0; k < kNumClasses; ++k) {
        auto& pool = per_class[k];
        std::size_t cap = static_cast<std::size_t>(config.classmodel_max_samples);
        if (summary) summary->samples_per_class[k] = static_cast<long long>(pool.size());
        if (pool.size() > cap) {
            for (std::size_t j = 0; j < cap; ++j) {
                std::size_t pick = j + rng.uniform_index(pool.size() - j);
                std::swap(pool[j], pool[pick]);
            }
            pool.resize(cap);
        }
        if (summary) summary->samples_used[k] = static_cast<long long>(pool.size());
        samples.insert(samples.end(), pool.begin(), pool.end());
    }

    std::vector<std::vector<double>> traces;
    GmmModel model = fit_gmm_em(samples, config.classmodel_components,
                                config.classmodel_train_seed, &traces);
    if (summary) {
        summary->final_log_likelihood = 0.0;
        for (const auto& trace : traces)
            if (!trace.empty()) summary->final_log_likelihood += trace.back();
    }
    return model;
}

DetectPipeline::DetectPipeline(const PipelineConfig& config, GmmModel model, std::string debug_dir)
    : config_(config), model_(std::move(model)), debug_dir_(std::move(debug_dir)),
      store_(config.events_vote_window) {}

std::vector<std::string> DetectPipeline::process_frame(const FrameBuffer& raw) {
    std::vector<std::string> records;
    try {
        FrameBuffer norm = normalize(raw);
        if (!geometry_) geometry_ = estimate_disk(raw);

        // Bandpass features come from the z-scored frame; intensity ratios
        // (rel_intensity, disk mean) from the raw one, equally aligned.
        FrameBuffer aligned, aligned_raw;
        if (!reference_) {
            reference_ = norm;
            aligned = std::move(norm);
            aligned_raw = raw;
        } else {
            DisplacementVector d =
                register_translation(*reference_, norm, config_.preprocess_pyramid_levels);
            aligned = apply_shift(norm, d);
            aligned_raw = apply_shift(raw, d);
        }
        aligned.timestamp = raw.timestamp;
        aligned.frame_index = raw.frame_index;

        BandpassParams bp;
        bp.lambda1 = config_.preprocess_lambda1;
        bp.lambda2 = config_.preprocess_lambda2;
        bp.max_iters = config_.preprocess_solver_iters;
        FrameBuffer band = structural_bandpass(aligned, bp);
        band.timestamp = raw.timestamp;
        band.frame_index = raw.frame_index;

        ProbVolume probs = class_prob_volume(band, *geometry_, model_);
        probs.timestamp = raw.timestamp;
        probs.frame_index = raw.frame_index;
        ProbVolume smooth = temporal_average(prev_probs_ ? &*prev_probs_ : nullptr, probs,
                                             config_.classmodel_temporal_alpha);
        smooth.timestamp = raw.timestamp;
        smooth.frame_index = raw.frame_index;
        prev_probs_ = smooth;

        LabelMap map =
            segment_frame(smooth, config_.segment_lambda_data, config_.segment_solver_iters);
        map.timestamp = raw.timestamp;
        map.frame_index = raw.frame_index;

        if (!debug_dir_.empty()) write_debug(band, smooth, map, raw.frame_index);

        // Brightness veto: flare pixels must be backed by raw intensity well
        // above the disk mean. Plage rings around spots read flare-like in
        // the bandpass but never reach flare brightness, and the veto also
        // trims the dim skirt the bandpass smears around real ribbons, so
        // the measured area tracks the bright core the catalogs would list.
        double dmean = disk_mean(aligned_raw, *geometry_);
        const float flare_cut =
            static_cast<float>(config_.events_flare_min_rel_intensity * dmean);
        for (std::size_t i = 0; i < map.labels.size(); ++i)
            if (map.labels[i] == kClassFlare && aligned_raw.data[i] < flare_cut)
                map.labels[i] = static_cast<std::uint8_t>(kClassBackground);

        auto spots = extract_components(map, kClassSunspot, config_.events_min_area);
        auto fils = extract_components(map, kClassFilament, config_.events_min_area);
        auto flares = extract_components(map, kClassFlare, config_.events_min_area);

        auto fil_groups = group_components(fils, config_.events_group_dist_filament);
        auto flare_groups = group_components(flares, config_.events_group_dist_flare);

        BinaryMask bright(map.width, map.height);
        for (std::size_t i = 0; i < bright.data.size(); ++i)
            bright.data[i] =
                (band.data[i] > kBrightLevel || map.labels[i] == kClassFlare) ? 1 : 0;
        fil_groups = filter_false_filaments(fil_groups, spots, bright, *geometry_,
                                            config_.events_sunspot_border_px,
                                            config_.events_compactness_max);

        // Photometry per flare group: background from the median of a thin
        // ring around the inflated bounding box, lift of the brightest pixel
        // over it, and the pixel count at or above half that lift. Timing
        // and area read off these follow the half-maximum convention the
        // catalogs use, independent of how far the segmentation bleeds.
        auto flare_photometry = [&](GroupObservation& o) {
            const Component& g = o.group;
            constexpr int kInflate = 12;
            constexpr int kRing = 2;
            const int bx0 = std::max(0, g.min_x - kInflate);
            const int by0 = std::max(0, g.min_y - kInflate);
            const int bx1 = std::min(aligned_raw.width - 1, g.max_x + kInflate);
            const int by1 = std::min(aligned_raw.height - 1, g.max_y + kInflate);
            std::vector<float> ring;
            for (int y = by0; y <= by1; ++y) {
                const bool edge_row = y < by0 + kRing || y > by1 - kRing;
                const float* row = &aligned_raw.data[static_cast<std::size_t>(y) *
                                                     aligned_raw.width];
                for (int x = bx0; x <= bx1; ++x)
                    if (edge_row || x < bx0 + kRing || x > bx1 - kRing)
                        ring.push_back(row[x]);
            }
            double bg = dmean;
            if (!ring.empty()) {
                auto mid = ring.begin() + ring.size() / 2;
                std::nth_element(ring.begin(), mid, ring.end());
                if (*mid > 0.0f) bg = *mid;
            }
            float vmax = 0.0f;
            for (const PixelRun& r : g.runs) {
                const float* row = &aligned_raw.data[static_cast<std::size_t>(r.y) *
                                                     aligned_raw.width];
                for (int x = r.x0; x <= r.x1; ++x) vmax = std::max(vmax, row[x]);
            }
            if (vmax <= bg) return;
            o.peak_excess = (vmax - bg) / bg;
            const float half = static_cast<float>(bg + 0.5 * (vmax - bg));
            long long n = 0;
            for (const PixelRun& r : g.runs) {
                const float* row = &aligned_raw.data[static_cast<std::size_t>(r.y) *
                                                     aligned_raw.width];
                for (int x = r.x0; x <= r.x1; ++x)
                    if (row[x] >= half) ++n;
            }
            o.area_half = n;
        };

        auto make_observations = [&](std::vector<Component>& groups, bool with_length) {
            std::vector<GroupObservation> obs;
            obs.reserve(groups.size());
            for (Component& g : groups) {
                g.frame_index = raw.frame_index;
                g.timestamp = raw.timestamp;
                GroupObservation o;
                o.mean_intensity = group_mean(g, aligned_raw);
                o.disk_mean = dmean;
                if (with_length) o.length_px = skeleton_length(skeletonize(g));
                o.group = std::move(g);
                obs.push_back(std::move(o));
            }
            return obs;
        };
        auto fil_obs = make_observations(fil_groups, true);
        auto flare_obs = make_observations(flare_groups, false);
        for (GroupObservation& o : flare_obs) flare_photometry(o);

        store_.update(kClassFilament, raw.frame_index, raw.timestamp, fil_obs);
        store_.update(kClassFlare, raw.frame_index, raw.timestamp, flare_obs);

        records = harvest_flares(
            store_.end_stale(kClassFlare, raw.frame_index, config_.events_vote_window));
        for (const EruptionReport& rep :
             detect_eruptions(store_, raw.timestamp, config_.events_eruption_window_s, *geometry_,
                              config_.events_limb_radial, config_.events_min_lifetime))
            records.push_back(eruption_to_ndjson(rep));

        ++processed_;
    } catch (const Error& e) {
        ++skipped_;
        std::fprintf(stderr, "frame %d (%s): skipped: %s\n", raw.frame_index,
                     format_rfc3339(raw.timestamp).c_str(), e.what());
    }
    return records;
}

std::vector<std::string> DetectPipeline::finish() {
    std::vector<std::string> records;
    if (geometry_) records = harvest_flares(store_.end_all(kClassFlare));
    store_.end_all(kClassFilament); // end silently; pending absences stay undeclared
    return records;
}

std::vector<std::string> DetectPipeline::harvest_flares(const std::vector<int>& ended_ids) {
    std::vector<std::string> out;
    for (int id : ended_ids) {
        const EventTrack* track = store_.find(id);
        if (!track) continue;
        try {
            FlareReport report = classify_flare(*track, *geometry_);
            if (report.rel_intensity < config_.events_flare_min_rel_intensity) {
                std::fprintf(stderr,
                             "flare track %d: dropped: peak relative intensity %.3f below %.3f\n",
                             id, report.rel_intensity, config_.events_flare_min_rel_intensity);
                continue;
            }
            out.push_back(flare_to_ndjson(report));
        } catch (const Error& e) {
            std::fprintf(stderr, "flare track %d: dropped: %s\n", id, e.what());
        }
    }
    return out;
}

void DetectPipeline::write_debug(const FrameBuffer& band, const ProbVolume& probs,
                                 const LabelMap& map, int frame_index) const {
    char name[64];
    std::snprintf(name, sizeof name, "/band_%06d.pgm", frame_index);
    write_scaled_pgm(debug_dir_ + name, band.data.data(), band.width, band.height);
    for (int k = 0; k < probs.num_classes; ++k) {
        std::snprintf(name, sizeof name, "/nll_%06d_c%d.pgm", frame_index, k);
        write_scaled_pgm(debug_dir_ + name, probs.plane(k), probs.width, probs.height);
    }
    std::snprintf(name, sizeof name, "/labels_%06d.pgm", frame_index);
    write_label_pgm(map, debug_dir_ + name);
}

} // namespace hef

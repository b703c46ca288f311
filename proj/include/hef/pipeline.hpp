#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hef/config.hpp"
#include "hef/disk.hpp"
#include "hef/frame.hpp"
#include "hef/gmm.hpp"
#include "hef/preprocess.hpp"
#include "hef/prob_volume.hpp"
#include "hef/tracking.hpp"

namespace hef {

struct TrainInput {
    std::string frame_path;
    std::string mask_path;
};

struct TrainSummary {
    std::array<long long, kNumClasses> samples_per_class{};
    std::array<long long, kNumClasses> samples_used{};
    double final_log_likelihood = 0.0; // summed over classes
};

/// Full training path: load each frame, normalize, bandpass, gather labeled
/// on-disk pixels (mask value 0..3; 255 and off-disk ignored), subsample per
/// class, fit the mixtures. Masks are pixel-aligned with their frames, so no
/// registration happens here.
GmmModel train_model(const PipelineConfig& config, const std::vector<TrainInput>& inputs,
                     TrainSummary* summary = nullptr);

/// Stateful frame-by-frame detection: normalize, register to the first good
/// frame, bandpass, class costs, temporal averaging, Potts segmentation,
/// grouping/filtering/tracking, reports. Per-frame failures are logged to
/// stderr and the frame is skipped.
class DetectPipeline {
public:
    DetectPipeline(const PipelineConfig& config, GmmModel model, std::string debug_dir = "");

    /// Feeds one frame (timestamp and frame_index set by the caller).
    /// Returns the NDJSON records completed by this frame.
    std::vector<std::string> process_frame(const FrameBuffer& raw);

    /// Sequence finished: ends open flare tracks and returns their records.
    /// Pending filament absences are not declared eruptions (the window may
    /// extend past the data).
    std::vector<std::string> finish();

    int processed() const { return processed_; }
    int skipped() const { return skipped_; }
    const std::optional<DiskGeometry>& geometry() const { return geometry_; }

private:
    std::vector<std::string> harvest_flares(const std::vector<int>& ended_ids);
    void write_debug(const FrameBuffer& band, const ProbVolume& probs, const LabelMap& map,
                     int frame_index) const;

    PipelineConfig config_;
    GmmModel model_;
    std::string debug_dir_;

    std::optional<FrameBuffer> reference_;
    std::optional<DiskGeometry> geometry_;
    std::optional<ProbVolume> prev_probs_;
    TrackStore store_;
    int processed_ = 0;
    int skipped_ = 0;
};

} // namespace hef

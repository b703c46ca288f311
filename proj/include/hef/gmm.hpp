#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hef/disk.hpp"
#include "hef/frame.hpp"
#include "hef/label_map.hpp"
#include "hef/prob_volume.hpp"

namespace hef {

inline constexpr double kNllMax = 50.0;
inline constexpr double kCovFloor = 1e-6;
inline constexpr double kOffDiskRadial = 1.02;

/// One labeled training pixel: bandpassed intensity plus the distance from
/// the disk center normalized by the disk radius.
struct FeatureSample {
    double intensity = 0.0;
    double radial = 0.0;
    int label = kClassBackground;
};

struct GmmComponent {
    double weight = 0.0;
    std::array<double, 2> mean{};
    std::array<double, 4> cov{}; // row-major 2x2, symmetric
};

struct GmmClass {
    std::vector<GmmComponent> components;
};

/// Mixture models for all classes over z-scored (intensity, radial)
/// features; the standardization statistics travel with the model.
struct GmmModel {
    int num_classes = 0;
    int components_per_class = 0;
    std::array<double, 2> feat_mean{};
    std::array<double, 2> feat_std{{1.0, 1.0}};
    std::vector<GmmClass> classes;
};

/// Expectation maximization per class, k-means++ style initialization seeded
/// deterministically. Requires at least 10 samples per component and class.
/// Per-class log-likelihood traces (one entry per iteration) are appended to
/// ll_traces when given.
GmmModel fit_gmm_em(const std::vector<FeatureSample>& samples, int components,
                    std::uint64_t seed, std::vector<std::vector<double>>* ll_traces = nullptr);

/// Negative log density of the class mixture at one feature pair, evaluated
/// in log space and clamped to [0, kNllMax].
double gmm_nll(const GmmModel& model, int class_id, double intensity, double radial);

/// Per-class NLL planes for a whole frame. Pixels with normalized radial
/// distance beyond kOffDiskRadial are forced to background (plane 0 there,
/// all others kNllMax).
ProbVolume class_prob_volume(const FrameBuffer& frame, const DiskGeometry& geom,
                             const GmmModel& model);

void save_model(const GmmModel& model, const std::string& path);
GmmModel load_model(const std::string& path);

} // namespace hef

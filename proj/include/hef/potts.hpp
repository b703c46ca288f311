#pragma once

#include <vector>

#include "hef/label_map.hpp"
#include "hef/prob_volume.hpp"

namespace hef {

struct PottsProblem {
    ProbVolume costs;
    double lambda = 5.0;
    int max_iters = 1500;
    int check_interval = 50;
    double tol = 1e-5;
};

/// Soft per-pixel class weights living on the probability simplex.
struct RelaxedLabeling {
    int width = 0;
    int height = 0;
    int num_classes = 0;
    std::vector<float> planes; // K * width * height, plane-major

    RelaxedLabeling() = default;
    RelaxedLabeling(int w, int h, int k)
        : width(w), height(h), num_classes(k),
          planes(static_cast<std::size_t>(k) * w * h, 0.0f) {}

    float* plane(int k) { return planes.data() + static_cast<std::size_t>(k) * width * height; }
    const float* plane(int k) const {
        return planes.data() + static_cast<std::size_t>(k) * width * height;
    }
};

/// Relaxed multi-label Potts energy: sum over classes of half the total
/// variation of each class plane plus lambda times the pointwise cost.
double potts_energy(const RelaxedLabeling& u, const ProbVolume& costs, double lambda);

/// Same functional evaluated on a hard labeling (one-hot planes).
double potts_energy(const LabelMap& labels, const ProbVolume& costs, double lambda);

/// Primal-dual solve of the relaxed Potts problem. The relaxation is convex,
/// so the sampled energies decrease monotonically up to solver tolerance.
/// energy_trace, when given, receives the energy at iteration 0 and at every
/// check_interval iterations thereafter.
RelaxedLabeling potts_relax(const PottsProblem& problem,
                            std::vector<double>* energy_trace = nullptr);

/// Argmax rounding; ties resolve to the lowest class index.
LabelMap round_labeling(const RelaxedLabeling& u);

} // namespace hef

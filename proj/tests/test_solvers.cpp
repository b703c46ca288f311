#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "hef/error.hpp"
#include "hef/potts.hpp"
#include "hef/rng.hpp"
#include "hef/tvl1.hpp"

using namespace hef;

namespace {

FrameBuffer disk_frame(int size, double radius, float contrast, float background) {
    FrameBuffer f(size, size, background);
    const double c = size / 2;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double dx = x - c;
            const double dy = y - c;
            if (dx * dx + dy * dy <= radius * radius)
                f.at(x, y) = background + contrast;
        }
    return f;
}

double max_abs_inside(const FrameBuffer& u, double radius, float background) {
    const double c = u.width / 2;
    double worst = 0.0;
    for (int y = 0; y < u.height; ++y)
        for (int x = 0; x < u.width; ++x) {
            const double dx = x - c;
            const double dy = y - c;
            if (dx * dx + dy * dy <= radius * radius)
                worst = std::max(worst, std::abs(static_cast<double>(u.at(x, y)) - background));
        }
    return worst;
}

// Exhaustive minimum over every hard labeling of a small grid.
double brute_force_min(const ProbVolume& costs, double lambda) {
    const int n = costs.width * costs.height;
    const int kc = costs.num_classes;
    long long total = 1;
    for (int i = 0; i < n; ++i)
        total *= kc;
    double best = std::numeric_limits<double>::infinity();
    LabelMap labels(costs.width, costs.height);
    for (long long code = 0; code < total; ++code) {
        long long c = code;
        for (int i = 0; i < n; ++i) {
            labels.labels[i] = static_cast<std::uint8_t>(c % kc);
            c /= kc;
        }
        best = std::min(best, potts_energy(labels, costs, lambda));
    }
    return best;
}

} // namespace

TEST_CASE("tvl1 energy matches hand-evaluated cases") {
    FrameBuffer u(2, 2);
    u.at(0, 0) = 0.0f;
    u.at(1, 0) = 1.0f;
    u.at(0, 1) = 0.0f;
    u.at(1, 1) = 1.0f;
    CHECK(tvl1_energy(u, u, 3.7) == doctest::Approx(2.0).epsilon(1e-12));

    FrameBuffer f(2, 2, 3.0f);
    FrameBuffer g(2, 2, 4.0f);
    CHECK(tvl1_energy(f, f, 0.5) == doctest::Approx(0.0));
    CHECK(tvl1_energy(g, f, 0.5) == doctest::Approx(2.0));

    FrameBuffer other(3, 2, 0.0f);
    CHECK_THROWS_WITH_AS(tvl1_energy(u, other, 1.0), doctest::Contains("DimensionMismatch"),
                         Error);
}

TEST_CASE("tvl1 denoise keeps a constant frame fixed") {
    Tvl1Problem prob;
    prob.observation = FrameBuffer(16, 12, 2.5f);
    prob.lambda = 0.3;
    FrameBuffer u = tvl1_denoise(prob);
    for (float v : u.data)
        CHECK(v == 2.5f);
}

TEST_CASE("tvl1 denoise removes or keeps a disk depending on lambda") {
    const double radius = 10.0;

    Tvl1Problem remove;
    remove.observation = disk_frame(64, radius, 1.0f, 0.0f);
    remove.lambda = 0.1; // below 2/r = 0.2
    FrameBuffer gone = tvl1_denoise(remove);
    CHECK(max_abs_inside(gone, radius, 0.0f) < 0.05);

    Tvl1Problem keep = remove;
    keep.lambda = 0.9; // above 2/r
    FrameBuffer kept = tvl1_denoise(keep);
    CHECK(kept.at(32, 32) >= 0.9f);
}

TEST_CASE("tvl1 disk decision is invariant to intensity scaling") {
    const double radius = 10.0;
    for (float a : {0.5f, 2.0f}) {
        Tvl1Problem remove;
        remove.observation = disk_frame(64, radius, a, 0.0f);
        remove.lambda = 0.1;
        FrameBuffer gone = tvl1_denoise(remove);
        CHECK(max_abs_inside(gone, radius, 0.0f) < 0.05 * a);

        Tvl1Problem keep = remove;
        keep.lambda = 0.9;
        FrameBuffer kept = tvl1_denoise(keep);
        CHECK(kept.at(32, 32) >= 0.9f * a);
    }
}

TEST_CASE("tvl1 result never exceeds the observation energy") {
    Rng rng(77);
    FrameBuffer f(32, 32);
    for (float& v : f.data)
        v = static_cast<float>(rng.normal(0.0, 1.0));
    for (double lambda : {0.05, 0.5, 1.5}) {
        Tvl1Problem prob;
        prob.observation = f;
        prob.lambda = lambda;
        FrameBuffer u = tvl1_denoise(prob);
        CHECK(tvl1_energy(u, f, lambda) <= tvl1_energy(f, f, lambda) + 1e-9);
    }
}

TEST_CASE("tvl1 rejects a non-finite observation") {
    Tvl1Problem prob;
    prob.observation = FrameBuffer(8, 8, 1.0f);
    prob.observation.at(3, 3) = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_WITH_AS(tvl1_denoise(prob), doctest::Contains("NonFinite"), Error);
}

TEST_CASE("potts relax picks the uniformly cheaper class") {
    PottsProblem prob;
    prob.costs = ProbVolume(8, 8, 2);
    for (std::size_t i = 0; i < prob.costs.plane_size(); ++i) {
        prob.costs.plane(0)[i] = 0.0f;
        prob.costs.plane(1)[i] = 1.0f;
    }
    prob.lambda = 1.0;
    RelaxedLabeling u = potts_relax(prob);
    for (std::size_t i = 0; i < prob.costs.plane_size(); ++i) {
        CHECK(u.plane(0)[i] >= 0.99f);
        const float sum = u.plane(0)[i] + u.plane(1)[i];
        CHECK(std::abs(sum - 1.0f) <= 1e-4f);
        for (int k = 0; k < 2; ++k) {
            CHECK(u.plane(k)[i] >= -1e-6f);
            CHECK(u.plane(k)[i] <= 1.0f + 1e-6f);
        }
    }
}

TEST_CASE("potts relax reaches within 5% of the exhaustive optimum") {
    for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
        Rng rng(seed);
        PottsProblem prob;
        prob.costs = ProbVolume(3, 3, 2);
        for (float& c : prob.costs.planes)
            c = static_cast<float>(rng.uniform_index(4));
        prob.lambda = 1.0;
        const double reference = brute_force_min(prob.costs, prob.lambda);
        LabelMap rounded = round_labeling(potts_relax(prob));
        const double achieved = potts_energy(rounded, prob.costs, prob.lambda);
        CHECK(achieved <= reference * 1.05 + 1e-9);
        CHECK(achieved >= reference - 1e-9);
    }
}

TEST_CASE("potts relax with three classes matches the exhaustive optimum on 3x3") {
    Rng rng(99);
    PottsProblem prob;
    prob.costs = ProbVolume(3, 3, 3);
    for (float& c : prob.costs.planes)
        c = static_cast<float>(rng.uniform_index(4));
    prob.lambda = 1.0;
    const double reference = brute_force_min(prob.costs, prob.lambda);
    LabelMap rounded = round_labeling(potts_relax(prob));
    CHECK(potts_energy(rounded, prob.costs, prob.lambda) <= reference * 1.05 + 1e-9);
}

TEST_CASE("potts relax collapses a checkerboard when the regularizer dominates") {
    PottsProblem prob;
    prob.costs = ProbVolume(8, 8, 2);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * 8 + x;
            const bool even = ((x + y) % 2) == 0;
            prob.costs.plane(0)[i] = even ? 0.0f : 1.0f;
            prob.costs.plane(1)[i] = even ? 1.0f : 0.9f;
        }
    prob.lambda = 0.05; // data nearly free, perimeter dominates

    // class 0 wins on total cost, so the uniform-0 labeling has lower energy
    LabelMap uniform0(8, 8);
    LabelMap uniform1(8, 8);
    std::fill(uniform1.labels.begin(), uniform1.labels.end(), 1);
    CHECK(potts_energy(uniform0, prob.costs, prob.lambda) <
          potts_energy(uniform1, prob.costs, prob.lambda));

    LabelMap rounded = round_labeling(potts_relax(prob));
    for (std::uint8_t l : rounded.labels)
        CHECK(l == 0);
}

TEST_CASE("potts relax follows the pointwise argmin when costs dominate") {
    PottsProblem prob;
    prob.costs = ProbVolume(16, 8, 2);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 16; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * 16 + x;
            const bool left = x < 8;
            prob.costs.plane(0)[i] = left ? 0.0f : 2.0f;
            prob.costs.plane(1)[i] = left ? 2.0f : 0.0f;
        }
    prob.lambda = 5.0;
    LabelMap rounded = round_labeling(potts_relax(prob));
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 16; ++x)
            CHECK(rounded.at(x, y) == (x < 8 ? 0 : 1));
}

TEST_CASE("potts energy trace is non-increasing within relative slack") {
    Rng rng(5);
    PottsProblem prob;
    prob.costs = ProbVolume(16, 16, 3);
    for (float& c : prob.costs.planes)
        c = static_cast<float>(rng.uniform(0.0, 3.0));
    prob.lambda = 1.0;
    std::vector<double> trace;
    potts_relax(prob, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i] <= trace[i - 1] + 1e-6 * std::max(1.0, std::abs(trace[i - 1])));
}

TEST_CASE("potts relax rejects non-finite costs") {
    PottsProblem prob;
    prob.costs = ProbVolume(4, 4, 2);
    prob.costs.plane(1)[5] = std::numeric_limits<float>::infinity();
    CHECK_THROWS_WITH_AS(potts_relax(prob), doctest::Contains("NonFinite"), Error);
}

TEST_CASE("round labeling rounds by argmax with low-index ties") {
    RelaxedLabeling u(2, 1, 2);
    u.plane(0)[0] = 0.7f;
    u.plane(1)[0] = 0.3f;
    u.plane(0)[1] = 0.5f;
    u.plane(1)[1] = 0.5f;
    LabelMap m = round_labeling(u);
    CHECK(m.labels[0] == 0);
    CHECK(m.labels[1] == 0);

    RelaxedLabeling hot(3, 1, 3);
    hot.plane(2)[0] = 1.0f;
    hot.plane(0)[1] = 1.0f;
    hot.plane(1)[2] = 1.0f;
    LabelMap hm = round_labeling(hot);
    CHECK(hm.labels[0] == 2);
    CHECK(hm.labels[1] == 0);
    CHECK(hm.labels[2] == 1);
}

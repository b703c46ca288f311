#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "hef/error.hpp"
#include "hef/gmm.hpp"
#include "hef/rng.hpp"

using namespace hef;

namespace {

void add_blob(std::vector<FeatureSample>& out, Rng& rng, int label, int count, double mi,
              double mr, double sigma) {
    for (int i = 0; i < count; ++i) {
        FeatureSample s;
        s.intensity = rng.normal(mi, sigma);
        s.radial = std::abs(rng.normal(mr, sigma));
        s.label = label;
        out.push_back(s);
    }
}

// One tight blob per class, far apart in intensity.
std::vector<FeatureSample> four_class_samples(std::uint64_t seed, int per_class) {
    Rng rng(seed);
    std::vector<FeatureSample> samples;
    add_blob(samples, rng, kClassSunspot, per_class, -3.0, 0.4, 0.2);
    add_blob(samples, rng, kClassFilament, per_class, -1.0, 0.5, 0.2);
    add_blob(samples, rng, kClassFlare, per_class, 3.0, 0.5, 0.2);
    add_blob(samples, rng, kClassBackground, per_class, 0.5, 0.6, 0.2);
    return samples;
}

GmmModel identity_model_one_component(const std::array<double, 2>& mean) {
    GmmModel model;
    model.num_classes = 1;
    model.components_per_class = 1;
    model.feat_mean = {0.0, 0.0};
    model.feat_std = {1.0, 1.0};
    model.classes.resize(1);
    GmmComponent c;
    c.weight = 1.0;
    c.mean = mean;
    c.cov = {1.0, 0.0, 0.0, 1.0};
    model.classes[0].components.push_back(c);
    return model;
}

} // namespace

TEST_CASE("single-component EM equals the sample mean and covariance") {
    std::vector<FeatureSample> samples = four_class_samples(21, 500);
    GmmModel model = fit_gmm_em(samples, 1, 7);

    // reference stats of class 1 in raw feature units
    double sx = 0.0, sy = 0.0;
    int n = 0;
    for (const FeatureSample& s : samples)
        if (s.label == kClassFilament) {
            sx += s.intensity;
            sy += s.radial;
            ++n;
        }
    const double mx = sx / n;
    const double my = sy / n;
    double cxx = 0.0, cxy = 0.0, cyy = 0.0;
    for (const FeatureSample& s : samples)
        if (s.label == kClassFilament) {
            cxx += (s.intensity - mx) * (s.intensity - mx);
            cxy += (s.intensity - mx) * (s.radial - my);
            cyy += (s.radial - my) * (s.radial - my);
        }
    cxx /= n;
    cxy /= n;
    cyy /= n;

    const GmmComponent& c = model.classes[kClassFilament].components[0];
    const double f0 = model.feat_std[0];
    const double f1 = model.feat_std[1];
    CHECK(std::abs(model.feat_mean[0] + f0 * c.mean[0] - mx) < 1e-9);
    CHECK(std::abs(model.feat_mean[1] + f1 * c.mean[1] - my) < 1e-9);
    CHECK(std::abs(f0 * f0 * c.cov[0] - cxx) < 1e-9);
    CHECK(std::abs(f0 * f1 * c.cov[1] - cxy) < 1e-9);
    CHECK(std::abs(f1 * f1 * c.cov[3] - cyy) < 1e-9);
    CHECK(c.weight == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("EM recovers a known Gaussian") {
    Rng rng(42);
    std::vector<FeatureSample> samples;
    const double sigma = 0.5;
    const int n = 400;
    add_blob(samples, rng, kClassSunspot, n, -4.0, 2.0, sigma);
    add_blob(samples, rng, kClassFilament, n, -1.5, 2.0, sigma);
    add_blob(samples, rng, kClassFlare, n, 1.5, 2.0, sigma);
    add_blob(samples, rng, kClassBackground, n, 4.0, 2.0, sigma);

    GmmModel model = fit_gmm_em(samples, 1, 3);
    const GmmComponent& c = model.classes[kClassFlare].components[0];
    const double mean_i = model.feat_mean[0] + model.feat_std[0] * c.mean[0];
    const double mean_r = model.feat_mean[1] + model.feat_std[1] * c.mean[1];
    const double bound = 3.0 * sigma / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean_i - 1.5) < bound);
    CHECK(std::abs(mean_r - 2.0) < bound);

    const double var_i = model.feat_std[0] * model.feat_std[0] * c.cov[0];
    const double var_r = model.feat_std[1] * model.feat_std[1] * c.cov[3];
    CHECK(var_i == doctest::Approx(sigma * sigma).epsilon(0.2));
    CHECK(var_r == doctest::Approx(sigma * sigma).epsilon(0.2));
}

TEST_CASE("EM separates two distant modes") {
    Rng rng(8);
    std::vector<FeatureSample> samples;
    add_blob(samples, rng, kClassSunspot, 300, 0.0, 0.2, 0.1);
    add_blob(samples, rng, kClassFilament, 300, 0.0, 0.2, 0.1);
    add_blob(samples, rng, kClassBackground, 300, 0.0, 0.2, 0.1);
    add_blob(samples, rng, kClassFlare, 300, 0.0, 0.2, 0.1);
    add_blob(samples, rng, kClassFlare, 700, 5.0, 0.8, 0.1);

    GmmModel model = fit_gmm_em(samples, 2, 5);
    const auto& comps = model.classes[kClassFlare].components;
    REQUIRE(comps.size() == 2);

    auto raw_mean = [&](const GmmComponent& c) {
        return std::array<double, 2>{model.feat_mean[0] + model.feat_std[0] * c.mean[0],
                                     model.feat_mean[1] + model.feat_std[1] * c.mean[1]};
    };
    std::array<double, 2> a = raw_mean(comps[0]);
    std::array<double, 2> b = raw_mean(comps[1]);
    int low = a[0] < b[0] ? 0 : 1;
    std::array<double, 2> lo_mean = low == 0 ? a : b;
    std::array<double, 2> hi_mean = low == 0 ? b : a;

    const double separation = std::hypot(5.0 - 0.0, 0.8 - 0.2);
    CHECK(std::hypot(lo_mean[0] - 0.0, lo_mean[1] - 0.2) < 0.05 * separation);
    CHECK(std::hypot(hi_mean[0] - 5.0, hi_mean[1] - 0.8) < 0.05 * separation);
    CHECK(std::abs(comps[low].weight - 0.3) < 0.05);
    CHECK(std::abs(comps[1 - low].weight - 0.7) < 0.05);
}

TEST_CASE("EM log-likelihood is non-decreasing every iteration") {
    std::vector<FeatureSample> samples = four_class_samples(77, 400);
    std::vector<std::vector<double>> traces;
    fit_gmm_em(samples, 3, 11, &traces);
    REQUIRE(traces.size() == kNumClasses);
    for (const auto& trace : traces) {
        REQUIRE(!trace.empty());
        CHECK(trace.size() <= 500);
        for (std::size_t i = 1; i < trace.size(); ++i)
            CHECK(trace[i] >= trace[i - 1] - 1e-9 * std::max(1.0, std::abs(trace[i - 1])));
    }
}

TEST_CASE("EM is deterministic for a fixed seed") {
    std::vector<FeatureSample> samples = four_class_samples(5, 200);
    GmmModel a = fit_gmm_em(samples, 2, 99);
    GmmModel b = fit_gmm_em(samples, 2, 99);
    REQUIRE(a.classes.size() == b.classes.size());
    for (std::size_t k = 0; k < a.classes.size(); ++k)
        for (std::size_t m = 0; m < a.classes[k].components.size(); ++m) {
            const GmmComponent& ca = a.classes[k].components[m];
            const GmmComponent& cb = b.classes[k].components[m];
            CHECK(ca.weight == cb.weight);
            CHECK(ca.mean == cb.mean);
            CHECK(ca.cov == cb.cov);
        }
}

TEST_CASE("EM demands enough samples per class") {
    std::vector<FeatureSample> samples = four_class_samples(1, 50);
    samples.resize(samples.size() - 45); // starve the last class
    CHECK_THROWS_WITH_AS(fit_gmm_em(samples, 1, 0), doctest::Contains("InsufficientSamples"),
                         Error);
}

TEST_CASE("gmm_nll closed forms") {
    GmmModel model = identity_model_one_component({0.0, 0.0});
    CHECK(gmm_nll(model, 0, 0.0, 0.0) == doctest::Approx(1.8378770664093453).epsilon(1e-9));
    CHECK(gmm_nll(model, 0, 100.0, 0.0) == 50.0);

    GmmModel sym;
    sym.num_classes = 1;
    sym.components_per_class = 2;
    sym.feat_mean = {0.0, 0.0};
    sym.feat_std = {1.0, 1.0};
    sym.classes.resize(1);
    GmmComponent c1;
    c1.weight = 0.5;
    c1.mean = {1.0, 0.5};
    c1.cov = {0.8, 0.1, 0.1, 0.6};
    GmmComponent c2 = c1;
    c2.mean = {-1.0, -0.5};
    sym.classes[0].components = {c1, c2};
    const double fwd = gmm_nll(sym, 0, 0.3, 0.4);
    const double rev = gmm_nll(sym, 0, -0.3, -0.4);
    CHECK(std::abs(fwd - rev) < 1e-12);
}

TEST_CASE("gmm_nll matches a direct density evaluation") {
    Rng rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        GmmModel model;
        model.num_classes = 1;
        model.components_per_class = 3;
        model.feat_mean = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        model.feat_std = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
        model.classes.resize(1);
        double wsum = 0.0;
        for (int m = 0; m < 3; ++m) {
            GmmComponent c;
            c.weight = rng.uniform(0.1, 1.0);
            wsum += c.weight;
            c.mean = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            const double a = rng.uniform(-0.8, 0.8);
            const double b = rng.uniform(-0.8, 0.8);
            const double d = rng.uniform(-0.8, 0.8);
            c.cov = {a * a + b * b + 0.1, a * b + b * d, a * b + b * d, b * b + d * d + 0.1};
            model.classes[0].components.push_back(c);
        }
        for (GmmComponent& c : model.classes[0].components)
            c.weight /= wsum;

        const double fi = rng.uniform(-3.0, 3.0);
        const double fr = rng.uniform(-3.0, 3.0);
        const double zx = (fi - model.feat_mean[0]) / model.feat_std[0];
        const double zy = (fr - model.feat_mean[1]) / model.feat_std[1];
        double density = 0.0;
        for (const GmmComponent& c : model.classes[0].components) {
            const double a = c.cov[0], b = c.cov[1], d = c.cov[3];
            const double det = a * d - b * b;
            const double dx = zx - c.mean[0];
            const double dy = zy - c.mean[1];
            const double q = (d * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
            density += c.weight / (2.0 * M_PI * std::sqrt(det)) * std::exp(-0.5 * q);
        }
        const double expected = std::clamp(-std::log(density), 0.0, 50.0);
        CHECK(gmm_nll(model, 0, fi, fr) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("class_prob_volume forces off-disk pixels to background") {
    std::vector<FeatureSample> samples = four_class_samples(3, 200);
    GmmModel model = fit_gmm_em(samples, 1, 1);

    FrameBuffer frame(64, 64, 0.5f);
    DiskGeometry geom{32.0, 32.0, 20.0};
    ProbVolume vol = class_prob_volume(frame, geom, model);

    const std::size_t corner = 0; // far outside the disk
    CHECK(vol.plane(kClassBackground)[corner] == 0.0f);
    CHECK(vol.plane(kClassSunspot)[corner] == 50.0f);
    CHECK(vol.plane(kClassFilament)[corner] == 50.0f);
    CHECK(vol.plane(kClassFlare)[corner] == 50.0f);
    for (float v : vol.planes) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0f);
    }
}

TEST_CASE("class_prob_volume matches pointwise Bayes classification") {
    std::vector<FeatureSample> samples = four_class_samples(9, 300);
    GmmModel model = fit_gmm_em(samples, 1, 2);

    Rng rng(31);
    FrameBuffer frame(48, 48);
    for (float& v : frame.data)
        v = static_cast<float>(rng.uniform(-4.0, 4.0));
    DiskGeometry geom{24.0, 24.0, 20.0};
    ProbVolume vol = class_prob_volume(frame, geom, model);

    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x) {
            const double radial = std::hypot(x - geom.center_x, y - geom.center_y) / geom.radius;
            if (radial > 1.02)
                continue;
            int expected = 0;
            double best = 1e300;
            for (int k = 0; k < kNumClasses; ++k) {
                const double nll = gmm_nll(model, k, frame.at(x, y), radial);
                if (nll < best) {
                    best = nll;
                    expected = k;
                }
            }
            int got = 0;
            float bestf = vol.plane(0)[static_cast<std::size_t>(y) * 48 + x];
            for (int k = 1; k < kNumClasses; ++k) {
                const float v = vol.plane(k)[static_cast<std::size_t>(y) * 48 + x];
                if (v < bestf) {
                    bestf = v;
                    got = k;
                }
            }
            CHECK(got == expected);
        }
}

TEST_CASE("pixel at a class mode minimizes that class plane") {
    std::vector<FeatureSample> samples = four_class_samples(13, 300);
    GmmModel model = fit_gmm_em(samples, 1, 4);

    FrameBuffer frame(64, 64, 0.5f);
    DiskGeometry geom{32.0, 32.0, 28.0};
    // drop a filament-like intensity at a mid-disk pixel
    frame.at(40, 32) = -1.0f;
    ProbVolume vol = class_prob_volume(frame, geom, model);
    const std::size_t i = static_cast<std::size_t>(32) * 64 + 40;
    for (int k = 0; k < kNumClasses; ++k)
        if (k != kClassFilament)
            CHECK(vol.plane(kClassFilament)[i] < vol.plane(k)[i]);
}

TEST_CASE("temporal_average blends cost volumes") {
    ProbVolume zero(8, 8, kNumClasses);
    ProbVolume one(8, 8, kNumClasses);
    for (float& v : one.planes)
        v = 1.0f;

    ProbVolume blended = temporal_average(&zero, one, 0.25);
    for (float v : blended.planes)
        CHECK(v == 0.25f);

    ProbVolume identity = temporal_average(&zero, one, 1.0);
    for (float v : identity.planes)
        CHECK(v == 1.0f);

    ProbVolume fixed = temporal_average(&one, one, 0.37);
    for (float v : fixed.planes)
        CHECK(v == 1.0f);

    ProbVolume first = temporal_average(nullptr, one, 0.5);
    for (float v : first.planes)
        CHECK(v == 1.0f);

    ProbVolume small(4, 4, kNumClasses);
    CHECK_THROWS_WITH_AS(temporal_average(&small, one, 0.5),
                         doctest::Contains("DimensionMismatch"), Error);
}

TEST_CASE("model save/load round trip is exact") {
    std::vector<FeatureSample> samples = four_class_samples(17, 150);
    GmmModel model = fit_gmm_em(samples, 2, 6);
    const char* path = "tmp_model_roundtrip.txt";
    save_model(model, path);
    GmmModel loaded = load_model(path);
    std::remove(path);

    CHECK(loaded.num_classes == model.num_classes);
    CHECK(loaded.components_per_class == model.components_per_class);
    for (int d = 0; d < 2; ++d) {
        CHECK(std::abs(loaded.feat_mean[d] - model.feat_mean[d]) < 1e-12);
        CHECK(std::abs(loaded.feat_std[d] - model.feat_std[d]) < 1e-12);
    }
    for (std::size_t k = 0; k < model.classes.size(); ++k)
        for (std::size_t m = 0; m < model.classes[k].components.size(); ++m) {
            const GmmComponent& a = model.classes[k].components[m];
            const GmmComponent& b = loaded.classes[k].components[m];
            CHECK(std::abs(a.weight - b.weight) < 1e-12);
            for (int d = 0; d < 2; ++d)
                CHECK(std::abs(a.mean[d] - b.mean[d]) < 1e-12);
            for (int d = 0; d < 4; ++d)
                CHECK(std::abs(a.cov[d] - b.cov[d]) < 1e-12);
        }
}

TEST_CASE("model loader rejects junk") {
    CHECK_THROWS_WITH_AS(load_model("does_not_exist_model.txt"), doctest::Contains("IoError"),
                         Error);
    const char* path = "tmp_model_junk.txt";
    {
        std::ofstream out(path);
        out << "not a model at all\n";
    }
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("CorruptHeader"), Error);
    std::remove(path);
}

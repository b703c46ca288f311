#include "hef/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "hef/error.hpp"
#include "hef/rng.hpp"

namespace hef {

namespace {

constexpr int kMaxComponents = 32;
constexpr double kLog2Pi = 1.8378770664093453;

// Symmetrize and clamp eigenvalues to kCovFloor; true when clamping bit.
bool floor_covariance(std::array<double, 4>& cov) {
    const double a = cov[0];
    const double b = 0.5 * (cov[1] + cov[2]);
    const double c = cov[3];
    const double tr = a + c;
    const double disc = std::sqrt(std::max((a - c) * (a - c) + 4.0 * b * b, 0.0));
    double l1 = 0.5 * (tr + disc);
    double l2 = 0.5 * (tr - disc);
    if (l2 >= kCovFloor) {
        cov[1] = cov[2] = b;
        return false;
    }
    double v1x = b;
    double v1y = l1 - a;
    const double norm = std::hypot(v1x, v1y);
    if (norm < 1e-30) {
        v1x = a >= c ? 1.0 : 0.0;
        v1y = a >= c ? 0.0 : 1.0;
    } else {
        v1x /= norm;
        v1y /= norm;
    }
    const double v2x = -v1y;
    const double v2y = v1x;
    l1 = std::max(l1, kCovFloor);
    l2 = std::max(l2, kCovFloor);
    cov[0] = l1 * v1x * v1x + l2 * v2x * v2x;
    cov[1] = cov[2] = l1 * v1x * v1y + l2 * v2x * v2y;
    cov[3] = l1 * v1y * v1y + l2 * v2y * v2y;
    return true;
}

struct PreparedComponent {
    double log_w_norm = 0.0; // log w - log(2pi) - 0.5 log det
    double inv00 = 0.0, inv01 = 0.0, inv11 = 0.0;
    double mx = 0.0, my = 0.0;
};

PreparedComponent prepare(const GmmComponent& comp) {
    const double a = comp.cov[0];
    const double b = 0.5 * (comp.cov[1] + comp.cov[2]);
    const double c = comp.cov[3];
    const double det = a * c - b * b;
    PreparedComponent p;
    p.inv00 = c / det;
    p.inv01 = -b / det;
    p.inv11 = a / det;
    const double w = std::max(comp.weight, 1e-300);
    p.log_w_norm = std::log(w) - kLog2Pi - 0.5 * std::log(det);
    p.mx = comp.mean[0];
    p.my = comp.mean[1];
    return p;
}

double log_density(const std::vector<PreparedComponent>& comps, double zx, double zy) {
    std::array<double, kMaxComponents> logs;
    double peak = -std::numeric_limits<double>::infinity();
    const int m = static_cast<int>(comps.size());
    for (int i = 0; i < m; ++i) {
        const PreparedComponent& p = comps[i];
        const double dx = zx - p.mx;
        const double dy = zy - p.my;
        const double q = p.inv00 * dx * dx + 2.0 * p.inv01 * dx * dy + p.inv11 * dy * dy;
        logs[i] = p.log_w_norm - 0.5 * q;
        peak = std::max(peak, logs[i]);
    }
    double sum = 0.0;
    for (int i = 0; i < m; ++i)
        sum += std::exp(logs[i] - peak);
    return peak + std::log(sum);
}

double clamp_nll(double log_dens) {
    return std::clamp(-log_dens, 0.0, kNllMax);
}

GmmClass fit_class(const std::vector<std::array<double, 2>>& x, int m_comps, Rng& rng,
                   std::vector<double>* trace) {
    const int n = static_cast<int>(x.size());

    // k-means++ seeding of the component means
    std::vector<std::array<double, 2>> centers;
    centers.push_back(x[rng.uniform_index(n)]);
    std::vector<double> d2(n);
    while (static_cast<int>(centers.size()) < m_comps) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) {
                const double dx = x[i][0] - c[0];
                const double dy = x[i][1] - c[1];
                best = std::min(best, dx * dx + dy * dy);
            }
            d2[i] = best;
            total += best;
        }
        if (!(total > 0.0)) {
            centers.push_back(x[rng.uniform_index(n)]);
            continue;
        }
        const double threshold = rng.uniform() * total;
        double acc = 0.0;
        int pick = n - 1;
        for (int i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= threshold) {
                pick = i;
                break;
            }
        }
        centers.push_back(x[pick]);
    }

    // class-wide scatter as the shared starting covariance
    std::array<double, 2> mu{};
    for (const auto& s : x) {
        mu[0] += s[0];
        mu[1] += s[1];
    }
    mu[0] /= n;
    mu[1] /= n;
    std::array<double, 4> scatter{};
    for (const auto& s : x) {
        const double dx = s[0] - mu[0];
        const double dy = s[1] - mu[1];
        scatter[0] += dx * dx;
        scatter[1] += dx * dy;
        scatter[3] += dy * dy;
    }
    scatter[0] /= n;
    scatter[1] /= n;
    scatter[2] = scatter[1];
    scatter[3] /= n;
    floor_covariance(scatter);

    GmmClass cls;
    cls.components.resize(m_comps);
    for (int m = 0; m < m_comps; ++m) {
        cls.components[m].weight = 1.0 / m_comps;
        cls.components[m].mean = centers[m];
        cls.components[m].cov = scatter;
    }

    std::vector<double> resp(static_cast<std::size_t>(m_comps) * n);
    std::vector<int> floor_streak(m_comps, 0);
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < 500; ++iter) {
        std::vector<PreparedComponent> prepared;
        prepared.reserve(m_comps);
        for (const auto& comp : cls.components)
            prepared.push_back(prepare(comp));

        double ll = 0.0;
        for (int i = 0; i < n; ++i) {
            std::array<double, kMaxComponents> logs;
            double peak = -std::numeric_limits<double>::infinity();
            for (int m = 0; m < m_comps; ++m) {
                const PreparedComponent& p = prepared[m];
                const double dx = x[i][0] - p.mx;
                const double dy = x[i][1] - p.my;
                const double q =
                    p.inv00 * dx * dx + 2.0 * p.inv01 * dx * dy + p.inv11 * dy * dy;
                logs[m] = p.log_w_norm - 0.5 * q;
                peak = std::max(peak, logs[m]);
            }
            double sum = 0.0;
            for (int m = 0; m < m_comps; ++m)
                sum += std::exp(logs[m] - peak);
            const double lse = peak + std::log(sum);
            ll += lse;
            for (int m = 0; m < m_comps; ++m)
                resp[static_cast<std::size_t>(m) * n + i] = std::exp(logs[m] - lse);
        }
        if (!std::isfinite(ll))
            throw_error(ErrorCode::NonFinite, "fit_gmm_em: log-likelihood diverged");
        if (trace)
            trace->push_back(ll);
        const bool converged =
            iter > 0 && std::abs(ll - prev_ll) <= 1e-6 * std::max(1.0, std::abs(prev_ll));
        prev_ll = ll;
        if (converged)
            break;

        for (int m = 0; m < m_comps; ++m) {
            const double* r = resp.data() + static_cast<std::size_t>(m) * n;
            double nk = 0.0;
            for (int i = 0; i < n; ++i)
                nk += r[i];
            if (nk < 1e-9)
                throw_error(ErrorCode::DegenerateComponent,
                            "fit_gmm_em: component lost all responsibility");
            double mean_x = 0.0, mean_y = 0.0;
            for (int i = 0; i < n; ++i) {
                mean_x += r[i] * x[i][0];
                mean_y += r[i] * x[i][1];
            }
            mean_x /= nk;
            mean_y /= nk;
            std::array<double, 4> cov{};
            for (int i = 0; i < n; ++i) {
                const double dx = x[i][0] - mean_x;
                const double dy = x[i][1] - mean_y;
                cov[0] += r[i] * dx * dx;
                cov[1] += r[i] * dx * dy;
                cov[3] += r[i] * dy * dy;
            }
            cov[0] /= nk;
            cov[1] /= nk;
            cov[2] = cov[1];
            cov[3] /= nk;
            if (floor_covariance(cov)) {
                if (++floor_streak[m] >= 10)
                    throw_error(ErrorCode::DegenerateComponent,
                                "fit_gmm_em: covariance pinned at the floor");
            } else {
                floor_streak[m] = 0;
            }
            cls.components[m].weight = nk / n;
            cls.components[m].mean = {mean_x, mean_y};
            cls.components[m].cov = cov;
        }
    }
    return cls;
}

} // namespace

GmmModel fit_gmm_em(const std::vector<FeatureSample>& samples, int components,
                    std::uint64_t seed, std::vector<std::vector<double>>* ll_traces) {
    if (components < 1 || components > kMaxComponents)
        throw_error(ErrorCode::BadConfig, "fit_gmm_em: component count out of range");
    if (samples.empty())
        throw_error(ErrorCode::InsufficientSamples, "fit_gmm_em: no samples");

    GmmModel model;
    model.num_classes = kNumClasses;
    model.components_per_class = components;

    double sum0 = 0.0, sum1 = 0.0;
    for (const FeatureSample& s : samples) {
        if (s.label < 0 || s.label >= kNumClasses)
            throw_error(ErrorCode::BadConfig, "fit_gmm_em: label out of range");
        sum0 += s.intensity;
        sum1 += s.radial;
    }
    const double n_all = static_cast<double>(samples.size());
    model.feat_mean = {sum0 / n_all, sum1 / n_all};
    double var0 = 0.0, var1 = 0.0;
    for (const FeatureSample& s : samples) {
        var0 += (s.intensity - model.feat_mean[0]) * (s.intensity - model.feat_mean[0]);
        var1 += (s.radial - model.feat_mean[1]) * (s.radial - model.feat_mean[1]);
    }
    model.feat_std = {std::sqrt(var0 / n_all), std::sqrt(var1 / n_all)};
    for (double& sd : model.feat_std)
        if (sd < 1e-12)
            sd = 1.0;

    std::vector<std::vector<std::array<double, 2>>> per_class(kNumClasses);
    for (const FeatureSample& s : samples)
        per_class[s.label].push_back({(s.intensity - model.feat_mean[0]) / model.feat_std[0],
                                      (s.radial - model.feat_mean[1]) / model.feat_std[1]});

    if (ll_traces)
        ll_traces->assign(kNumClasses, {});
    model.classes.resize(kNumClasses);
    for (int k = 0; k < kNumClasses; ++k) {
        if (static_cast<int>(per_class[k].size()) < 10 * components) {
            std::ostringstream msg;
            msg << "fit_gmm_em: class " << k << " has " << per_class[k].size()
                << " samples, needs " << 10 * components;
            throw_error(ErrorCode::InsufficientSamples, msg.str());
        }
        Rng rng(mix_seed(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1)));
        model.classes[k] =
            fit_class(per_class[k], components, rng, ll_traces ? &(*ll_traces)[k] : nullptr);
    }
    return model;
}

double gmm_nll(const GmmModel& model, int class_id, double intensity, double radial) {
    if (class_id < 0 || class_id >= static_cast<int>(model.classes.size()))
        throw_error(ErrorCode::BadConfig, "gmm_nll: class id out of range");
    std::vector<PreparedComponent> prepared;
    prepared.reserve(model.classes[class_id].components.size());
    for (const auto& comp : model.classes[class_id].components)
        prepared.push_back(prepare(comp));
    const double zx = (intensity - model.feat_mean[0]) / model.feat_std[0];
    const double zy = (radial - model.feat_mean[1]) / model.feat_std[1];
    return clamp_nll(log_density(prepared, zx, zy));
}

ProbVolume class_prob_volume(const FrameBuffer& frame, const DiskGeometry& geom,
                             const GmmModel& model) {
    if (static_cast<int>(model.classes.size()) != kNumClasses)
        throw_error(ErrorCode::BadConfig, "class_prob_volume: model must cover all classes");
    std::vector<std::vector<PreparedComponent>> prepared(kNumClasses);
    for (int k = 0; k < kNumClasses; ++k)
        for (const auto& comp : model.classes[k].components)
            prepared[k].push_back(prepare(comp));

    ProbVolume vol(frame.width, frame.height, kNumClasses);
    vol.timestamp = frame.timestamp;
    vol.frame_index = frame.frame_index;
    const double inv_r = 1.0 / geom.radius;
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * frame.width + x;
            const double radial =
                std::hypot(x - geom.center_x, y - geom.center_y) * inv_r;
            if (radial > kOffDiskRadial) {
                for (int k = 0; k < kNumClasses; ++k)
                    vol.plane(k)[i] = k == kClassBackground ? 0.0f
                                                            : static_cast<float>(kNllMax);
                continue;
            }
            const double zx = (frame.data[i] - model.feat_mean[0]) / model.feat_std[0];
            const double zy = (radial - model.feat_mean[1]) / model.feat_std[1];
            for (int k = 0; k < kNumClasses; ++k)
                vol.plane(k)[i] = static_cast<float>(clamp_nll(log_density(prepared[k], zx, zy)));
        }
    }
    return vol;
}

void save_model(const GmmModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw_error(ErrorCode::IoError, "save_model: cannot open " + path);
    out << std::setprecision(17);
    out << "hefgmm 1\n";
    out << "classes " << model.num_classes << " components " << model.components_per_class
        << "\n";
    out << "feat_mean " << model.feat_mean[0] << ' ' << model.feat_mean[1] << "\n";
    out << "feat_std " << model.feat_std[0] << ' ' << model.feat_std[1] << "\n";
    for (int k = 0; k < static_cast<int>(model.classes.size()); ++k) {
        out << "class " << k << "\n";
        for (const GmmComponent& c : model.classes[k].components) {
            out << c.weight;
            out << ' ' << c.mean[0] << ' ' << c.mean[1];
            for (double v : c.cov)
                out << ' ' << v;
            out << "\n";
        }
    }
    if (!out)
        throw_error(ErrorCode::IoError, "save_model: write failed for " + path);
}

GmmModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw_error(ErrorCode::IoError, "load_model: cannot open " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (!in || magic != "hefgmm" || version != 1)
        throw_error(ErrorCode::CorruptHeader, "load_model: not a model file: " + path);

    GmmModel model;
    std::string tag;
    in >> tag >> model.num_classes >> tag >> model.components_per_class;
    in >> tag >> model.feat_mean[0] >> model.feat_mean[1];
    in >> tag >> model.feat_std[0] >> model.feat_std[1];
    if (!in || model.num_classes < 1 || model.components_per_class < 1 ||
        model.components_per_class > kMaxComponents)
        throw_error(ErrorCode::CorruptHeader, "load_model: bad model header: " + path);

    model.classes.resize(model.num_classes);
    for (int k = 0; k < model.num_classes; ++k) {
        int idx = -1;
        in >> tag >> idx;
        if (!in || tag != "class" || idx != k)
            throw_error(ErrorCode::CorruptHeader, "load_model: bad class block: " + path);
        model.classes[k].components.resize(model.components_per_class);
        for (GmmComponent& c : model.classes[k].components) {
            in >> c.weight >> c.mean[0] >> c.mean[1];
            for (double& v : c.cov)
                in >> v;
        }
        if (!in)
            throw_error(ErrorCode::CorruptHeader, "load_model: truncated model file: " + path);
    }
    return model;
}

} // namespace hef

#include "hef/potts.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "hef/error.hpp"

namespace hef {

namespace {

constexpr float kStep = 0.35355339059327373f; // 1/sqrt(8), covers the gradient norm

double plane_tv(const float* u, int w, int h) {
    double acc = 0.0;
    for (int y = 0; y < h; ++y) {
        const float* row = u + static_cast<std::size_t>(y) * w;
        const float* below = (y < h - 1) ? row + w : nullptr;
        for (int x = 0; x < w; ++x) {
            float dx = (x < w - 1) ? row[x + 1] - row[x] : 0.0f;
            float dy = below ? below[x] - row[x] : 0.0f;
            acc += std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy);
        }
    }
    return acc;
}

// Euclidean projection onto the probability simplex (sort-based).
inline void project_simplex(float* v, float* scratch, int k) {
    for (int i = 0; i < k; ++i)
        scratch[i] = v[i];
    std::sort(scratch, scratch + k, std::greater<float>());
    float cum = 0.0f;
    float theta = 0.0f;
    for (int j = 0; j < k; ++j) {
        cum += scratch[j];
        float t = (cum - 1.0f) / static_cast<float>(j + 1);
        if (scratch[j] - t > 0.0f)
            theta = t;
        else
            break;
    }
    for (int i = 0; i < k; ++i)
        v[i] = std::max(v[i] - theta, 0.0f);
}

} // namespace

double potts_energy(const RelaxedLabeling& u, const ProbVolume& costs, double lambda) {
    if (u.width != costs.width || u.height != costs.height || u.num_classes != costs.num_classes)
        throw_error(ErrorCode::DimensionMismatch, "potts_energy: labeling does not match costs");
    const std::size_t n = static_cast<std::size_t>(u.width) * u.height;
    double perimeter = 0.0;
    double data = 0.0;
    for (int k = 0; k < u.num_classes; ++k) {
        const float* up = u.plane(k);
        const float* cp = costs.plane(k);
        perimeter += plane_tv(up, u.width, u.height);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += static_cast<double>(up[i]) * cp[i];
        data += acc;
    }
    return 0.5 * perimeter + lambda * data;
}

double potts_energy(const LabelMap& labels, const ProbVolume& costs, double lambda) {
    if (labels.width != costs.width || labels.height != costs.height)
        throw_error(ErrorCode::DimensionMismatch, "potts_energy: labels do not match costs");
    RelaxedLabeling u(labels.width, labels.height, costs.num_classes);
    const std::size_t n = static_cast<std::size_t>(labels.width) * labels.height;
    for (std::size_t i = 0; i < n; ++i) {
        int k = labels.labels[i];
        if (k >= costs.num_classes)
            throw_error(ErrorCode::DimensionMismatch, "potts_energy: label out of range");
        u.plane(k)[i] = 1.0f;
    }
    return potts_energy(u, costs, lambda);
}

RelaxedLabeling potts_relax(const PottsProblem& problem, std::vector<double>* energy_trace) {
    const ProbVolume& costs = problem.costs;
    const int w = costs.width;
    const int h = costs.height;
    const int kc = costs.num_classes;
    if (w <= 0 || h <= 0 || kc <= 0)
        throw_error(ErrorCode::DimensionMismatch, "potts_relax: empty cost volume");
    for (float c : costs.planes)
        if (!std::isfinite(c))
            throw_error(ErrorCode::NonFinite, "potts_relax: non-finite cost");

    const std::size_t n = static_cast<std::size_t>(w) * h;
    const float lam = static_cast<float>(problem.lambda);

    RelaxedLabeling u(w, h, kc);
    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        float bc = costs.plane(0)[i];
        for (int k = 1; k < kc; ++k) {
            float c = costs.plane(k)[i];
            if (c < bc) {
                bc = c;
                best = k;
            }
        }
        u.plane(best)[i] = 1.0f;
    }

    std::vector<float> ubar(u.planes);
    std::vector<float> p1(u.planes.size(), 0.0f);
    std::vector<float> p2(u.planes.size(), 0.0f);

    RelaxedLabeling best = u;
    double best_energy = potts_energy(u, costs, problem.lambda);
    double prev_energy = best_energy;
    if (energy_trace) {
        energy_trace->clear();
        energy_trace->push_back(best_energy);
    }

    std::vector<float> cand(kc);
    std::vector<float> scratch(kc);

    for (int iter = 1; iter <= problem.max_iters; ++iter) {
        // Dual ascent per class, projected onto the radius-1/2 ball. The last
        // column/row components stay zero (Neumann gradient), so the uniform
        // divergence below is the exact adjoint.
        for (int k = 0; k < kc; ++k) {
            const std::size_t off = static_cast<std::size_t>(k) * n;
            const float* ub = ubar.data() + off;
            float* q1 = p1.data() + off;
            float* q2 = p2.data() + off;
            for (int y = 0; y < h; ++y) {
                const std::size_t r = static_cast<std::size_t>(y) * w;
                const bool last_row = (y == h - 1);
                for (int x = 0; x < w; ++x) {
                    std::size_t i = r + x;
                    float dx = (x < w - 1) ? ub[i + 1] - ub[i] : 0.0f;
                    float dy = last_row ? 0.0f : ub[i + w] - ub[i];
                    float a = q1[i] + kStep * dx;
                    float b = q2[i] + kStep * dy;
                    float mag = std::sqrt(a * a + b * b);
                    if (mag > 0.5f) {
                        float s = 0.5f / mag;
                        a *= s;
                        b *= s;
                    }
                    q1[i] = a;
                    q2[i] = b;
                }
            }
        }

        // Primal descent with pointwise simplex projection, extragradient fused.
        for (int y = 0; y < h; ++y) {
            const std::size_t r = static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) {
                std::size_t i = r + x;
                for (int k = 0; k < kc; ++k) {
                    const std::size_t off = static_cast<std::size_t>(k) * n;
                    const float* q1 = p1.data() + off;
                    const float* q2 = p2.data() + off;
                    float div = q1[i] + q2[i];
                    if (x > 0)
                        div -= q1[i - 1];
                    if (y > 0)
                        div -= q2[i - w];
                    cand[k] = u.planes[off + i] + kStep * (div - lam * costs.planes[off + i]);
                }
                project_simplex(cand.data(), scratch.data(), kc);
                for (int k = 0; k < kc; ++k) {
                    const std::size_t j = static_cast<std::size_t>(k) * n + i;
                    float old = u.planes[j];
                    u.planes[j] = cand[k];
                    ubar[j] = 2.0f * cand[k] - old;
                }
            }
        }

        if (iter % problem.check_interval == 0 || iter == problem.max_iters) {
            double e = potts_energy(u, costs, problem.lambda);
            if (!std::isfinite(e))
                throw_error(ErrorCode::NonFinite, "potts_relax: energy diverged");
            if (energy_trace)
                energy_trace->push_back(e);
            if (e < best_energy) {
                best_energy = e;
                best = u;
            }
            double denom = std::max(1.0, std::abs(prev_energy));
            if (std::abs(prev_energy - e) <= problem.tol * denom)
                break;
            prev_energy = e;
        }
    }
    return best;
}

LabelMap round_labeling(const RelaxedLabeling& u) {
    LabelMap out(u.width, u.height);
    const std::size_t n = static_cast<std::size_t>(u.width) * u.height;
    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        float bv = u.plane(0)[i];
        for (int k = 1; k < u.num_classes; ++k) {
            float v = u.plane(k)[i];
            if (v > bv) {
                bv = v;
                best = k;
            }
        }
        out.labels[i] = static_cast<std::uint8_t>(best);
    }
    return out;
}

} // namespace hef

#include "hef/tvl1.hpp"

#include <algorithm>
#include <cmath>

#include "hef/error.hpp"

namespace hef {

namespace {

constexpr double kStep = 0.35355339059327373; // 1/sqrt(8), ||grad||^2 <= 8 in 2D

// Box 2x2 downsample (odd tails average what is there).
FrameBuffer downsample2(const FrameBuffer& f) {
    const int cw = (f.width + 1) / 2;
    const int ch = (f.height + 1) / 2;
    FrameBuffer c(cw, ch);
    for (int y = 0; y < ch; ++y) {
        const int y0 = 2 * y;
        const int y1 = std::min(y0 + 1, f.height - 1);
        for (int x = 0; x < cw; ++x) {
            const int x0 = 2 * x;
            const int x1 = std::min(x0 + 1, f.width - 1);
            c.at(x, y) = 0.25f * (f.at(x0, y0) + f.at(x1, y0) + f.at(x0, y1) + f.at(x1, y1));
        }
    }
    return c;
}

// Pixel-replication upsample of a coarse plane onto a w x h grid.
void upsample2(const std::vector<float>& coarse, int cw, int ch, std::vector<float>& fine, int w,
               int h) {
    fine.resize(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        const float* crow = coarse.data() + static_cast<std::size_t>(std::min(y / 2, ch - 1)) * cw;
        float* frow = fine.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) frow[x] = crow[std::min(x / 2, cw - 1)];
    }
}

struct WarmStart {
    std::vector<float> u, p1, p2;
};

FrameBuffer solve(const Tvl1Problem& problem, const WarmStart* warm,
                  std::vector<double>* energy_trace, WarmStart* state_out);

// Solve a 2x coarser instance of the same continuum problem (grid spacing
// doubles, so the fidelity weight doubles) and replicate its state up as the
// fine initialization.
WarmStart coarse_init(const Tvl1Problem& problem) {
    Tvl1Problem coarse;
    coarse.observation = downsample2(problem.observation);
    coarse.lambda = 2.0 * problem.lambda;
    coarse.max_iters = problem.max_iters;
    coarse.check_interval = problem.check_interval;
    coarse.tol = problem.tol;
    coarse.coarse_to_fine = true;

    WarmStart coarse_state;
    solve(coarse, nullptr, nullptr, &coarse_state);

    const int cw = coarse.observation.width;
    const int ch = coarse.observation.height;
    WarmStart fine;
    upsample2(coarse_state.u, cw, ch, fine.u, problem.observation.width,
              problem.observation.height);
    upsample2(coarse_state.p1, cw, ch, fine.p1, problem.observation.width,
              problem.observation.height);
    upsample2(coarse_state.p2, cw, ch, fine.p2, problem.observation.width,
              problem.observation.height);
    return fine;
}

FrameBuffer solve(const Tvl1Problem& problem, const WarmStart* warm,
                  std::vector<double>* energy_trace, WarmStart* state_out) {
    const FrameBuffer& f = problem.observation;
    const int w = f.width;
    const int h = f.height;
    const std::size_t n = f.size();

    WarmStart pyramid;
    if (!warm && problem.coarse_to_fine && std::min(w, h) >= 64) {
        pyramid = coarse_init(problem);
        warm = &pyramid;
    }

    std::vector<float> u = warm ? warm->u : std::vector<float>(f.data.begin(), f.data.end());
    std::vector<float> u_bar = u;
    std::vector<float> p1 = warm ? warm->p1 : std::vector<float>(n, 0.0f);
    std::vector<float> p2 = warm ? warm->p2 : std::vector<float>(n, 0.0f);

    const float sigma = static_cast<float>(kStep);
    const float tau = static_cast<float>(kStep);
    const float tl = static_cast<float>(kStep * problem.lambda);

    FrameBuffer result = f;
    double best_energy = tvl1_energy(result, f, problem.lambda);
    if (energy_trace) energy_trace->push_back(best_energy);
    double prev_energy = best_energy;

    const int check = std::max(1, problem.check_interval);
    const float* __restrict fd = f.data.data();

    for (int iter = 1; iter <= problem.max_iters; ++iter) {
        // dual ascent + projection onto the unit ball
        for (int y = 0; y < h; ++y) {
            const std::size_t row = static_cast<std::size_t>(y) * w;
            const float* __restrict ub = u_bar.data() + row;
            const float* __restrict ub_down = y + 1 < h ? ub + w : nullptr;
            float* __restrict q1 = p1.data() + row;
            float* __restrict q2 = p2.data() + row;
            if (ub_down) {
                for (int x = 0; x < w - 1; ++x) {
                    const float a = q1[x] + sigma * (ub[x + 1] - ub[x]);
                    const float b = q2[x] + sigma * (ub_down[x] - ub[x]);
                    const float denom = std::max(1.0f, std::sqrt(a * a + b * b));
                    q1[x] = a / denom;
                    q2[x] = b / denom;
                }
                const int x = w - 1;
                const float b = q2[x] + sigma * (ub_down[x] - ub[x]);
                const float denom = std::max(1.0f, std::sqrt(q1[x] * q1[x] + b * b));
                q1[x] /= denom;
                q2[x] = b / denom;
            } else {
                for (int x = 0; x < w - 1; ++x) {
                    const float a = q1[x] + sigma * (ub[x + 1] - ub[x]);
                    const float denom = std::max(1.0f, std::sqrt(a * a + q2[x] * q2[x]));
                    q1[x] = a / denom;
                    q2[x] /= denom;
                }
                const int x = w - 1;
                const float denom = std::max(1.0f, std::sqrt(q1[x] * q1[x] + q2[x] * q2[x]));
                q1[x] /= denom;
                q2[x] /= denom;
            }
        }
        // primal descent, L1 prox toward f, extragradient
        for (int y = 0; y < h; ++y) {
            const std::size_t row = static_cast<std::size_t>(y) * w;
            const float* __restrict q1 = p1.data() + row;
            const float* __restrict q2 = p2.data() + row;
            const float* __restrict q2_up = y > 0 ? q2 - w : nullptr;
            const float* __restrict fr = fd + row;
            float* __restrict ur = u.data() + row;
            float* __restrict br = u_bar.data() + row;
            {
                const float div = q1[0] + q2[0] - (q2_up ? q2_up[0] : 0.0f);
                const float v = ur[0] + tau * div;
                const float d = v - fr[0];
                const float un = d > tl ? v - tl : (d < -tl ? v + tl : fr[0]);
                br[0] = 2.0f * un - ur[0];
                ur[0] = un;
            }
            if (q2_up) {
                for (int x = 1; x < w; ++x) {
                    const float div = q1[x] + q2[x] - q1[x - 1] - q2_up[x];
                    const float v = ur[x] + tau * div;
                    const float d = v - fr[x];
                    const float un = d > tl ? v - tl : (d < -tl ? v + tl : fr[x]);
                    br[x] = 2.0f * un - ur[x];
                    ur[x] = un;
                }
            } else {
                for (int x = 1; x < w; ++x) {
                    const float div = q1[x] + q2[x] - q1[x - 1];
                    const float v = ur[x] + tau * div;
                    const float d = v - fr[x];
                    const float un = d > tl ? v - tl : (d < -tl ? v + tl : fr[x]);
                    br[x] = 2.0f * un - ur[x];
                    ur[x] = un;
                }
            }
        }

        if (iter % check == 0 || iter == problem.max_iters) {
            FrameBuffer candidate = f;
            candidate.data.assign(u.begin(), u.end());
            const double energy = tvl1_energy(candidate, f, problem.lambda);
            if (!std::isfinite(energy)) {
                throw_error(ErrorCode::NonFinite, "TV-L1 iterate diverged");
            }
            if (energy_trace) energy_trace->push_back(energy);
            if (energy < best_energy) {
                best_energy = energy;
                result.data = candidate.data;
            }
            const double rel = std::abs(prev_energy - energy) /
                               std::max(std::abs(prev_energy), 1e-12);
            if (rel < problem.tol) break;
            prev_energy = energy;
        }
    }
    if (state_out) {
        state_out->u = std::move(u);
        state_out->p1 = std::move(p1);
        state_out->p2 = std::move(p2);
    }
    result.timestamp = f.timestamp;
    result.frame_index = f.frame_index;
    return result;
}

} // namespace

double tvl1_energy(const FrameBuffer& u, const FrameBuffer& f, double lambda) {
    if (!u.same_size(f)) {
        throw_error(ErrorCode::DimensionMismatch, "tvl1_energy frame sizes differ");
    }
    const int w = u.width;
    const int h = u.height;
    double tv = 0.0;
    double data = 0.0;
    for (int y = 0; y < h; ++y) {
        const float* row = &u.data[static_cast<std::size_t>(y) * w];
        const float* row_down = y + 1 < h ? row + w : nullptr;
        for (int x = 0; x < w; ++x) {
            const double gx = x + 1 < w ? row[x + 1] - row[x] : 0.0;
            const double gy = row_down ? row_down[x] - row[x] : 0.0;
            tv += std::sqrt(gx * gx + gy * gy);
        }
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        data += std::abs(static_cast<double>(u.data[i]) - f.data[i]);
    }
    return tv + lambda * data;
}

FrameBuffer tvl1_denoise(const Tvl1Problem& problem, std::vector<double>* energy_trace) {
    const FrameBuffer& f = problem.observation;
    if (f.width <= 0 || f.height <= 0) {
        throw_error(ErrorCode::DimensionMismatch, "empty observation");
    }
    if (problem.lambda < 0 || problem.max_iters < 1 || problem.tol <= 0) {
        throw_error(ErrorCode::BadConfig, "invalid TV-L1 problem parameters");
    }
    return solve(problem, nullptr, energy_trace, nullptr);
}

} // namespace hef

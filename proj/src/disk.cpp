#include "hef/disk.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hef/error.hpp"

namespace hef {

namespace {

constexpr double kDegPerRad = 180.0 / M_PI;

struct Point {
    double x;
    double y;
};

double percentile(std::vector<float> values, double q) {
    if (values.empty()) return 0.0;
    const std::size_t idx =
        static_cast<std::size_t>(q * static_cast<double>(values.size() - 1) + 0.5);
    std::nth_element(values.begin(), values.begin() + idx, values.end());
    return values[idx];
}

// Bilinear sample with border clamp.
double sample(const FrameBuffer& f, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(f.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(f.height - 1));
    const int x0 = std::min(static_cast<int>(x), f.width - 2 >= 0 ? f.width - 2 : 0);
    const int y0 = std::min(static_cast<int>(y), f.height - 2 >= 0 ? f.height - 2 : 0);
    const double fx = x - x0;
    const double fy = y - y0;
    const double v00 = f.at(x0, y0);
    const double v10 = f.at(std::min(x0 + 1, f.width - 1), y0);
    const double v01 = f.at(x0, std::min(y0 + 1, f.height - 1));
    const double v11 = f.at(std::min(x0 + 1, f.width - 1), std::min(y0 + 1, f.height - 1));
    return v00 * (1 - fx) * (1 - fy) + v10 * fx * (1 - fy) + v01 * (1 - fx) * fy +
           v11 * fx * fy;
}

// Kasa algebraic circle fit: linear least squares on x^2+y^2 + Dx + Ey + F = 0.
bool kasa_fit(const std::vector<Point>& pts, double& cx, double& cy, double& r) {
    const double n = static_cast<double>(pts.size());
    if (pts.size() < 3) return false;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, sxz = 0, syz = 0, sz = 0;
    for (const Point& p : pts) {
        const double z = p.x * p.x + p.y * p.y;
        sx += p.x;
        sy += p.y;
        sxx += p.x * p.x;
        syy += p.y * p.y;
        sxy += p.x * p.y;
        sxz += p.x * z;
        syz += p.y * z;
        sz += z;
    }
    // Normal equations for [D, E, F]
    double a[3][4] = {
        {sxx, sxy, sx, -sxz},
        {sxy, syy, sy, -syz},
        {sx, sy, n, -sz},
    };
    // Gaussian elimination with partial pivoting
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        }
        if (std::abs(a[pivot][col]) < 1e-12) return false;
        std::swap(a[col], a[pivot]);
        for (int row = col + 1; row < 3; ++row) {
            const double factor = a[row][col] / a[col][col];
            for (int k = col; k < 4; ++k) a[row][k] -= factor * a[col][k];
        }
    }
    double sol[3];
    for (int row = 2; row >= 0; --row) {
        double rhs = a[row][3];
        for (int k = row + 1; k < 3; ++k) rhs -= a[row][k] * sol[k];
        sol[row] = rhs / a[row][row];
    }
    cx = -sol[0] / 2.0;
    cy = -sol[1] / 2.0;
    const double rr = cx * cx + cy * cy - sol[2];
    if (rr <= 0) return false;
    r = std::sqrt(rr);
    return true;
}

double fit_rms(const std::vector<Point>& pts, double cx, double cy, double r) {
    double ss = 0;
    for (const Point& p : pts) {
        const double d = std::hypot(p.x - cx, p.y - cy) - r;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(pts.size()));
}

} // namespace

DiskGeometry estimate_disk(const FrameBuffer& frame) {
    if (frame.width < 8 || frame.height < 8) {
        throw_error(ErrorCode::DiskNotFound, "frame too small");
    }
    const double p10 = percentile(frame.data, 0.10);
    const double p90 = percentile(frame.data, 0.90);
    const double threshold = 0.5 * (p10 + p90);
    if (!(p90 > p10)) {
        throw_error(ErrorCode::DiskNotFound, "flat intensity histogram, no limb contrast");
    }

    // Brightness centroid of above-threshold pixels seeds the scanline origin.
    double cx0 = 0, cy0 = 0;
    std::size_t bright = 0;
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            if (frame.at(x, y) > threshold) {
                cx0 += x;
                cy0 += y;
                ++bright;
            }
        }
    }
    if (bright < 64) {
        throw_error(ErrorCode::DiskNotFound, "no bright region above limb threshold");
    }
    cx0 /= static_cast<double>(bright);
    cy0 /= static_cast<double>(bright);

    const int num_rays = 180;
    const double max_reach = std::hypot(frame.width, frame.height);

    // Outermost above->below threshold crossing per ray, subpixel by linear
    // interpolation between successive samples.
    auto collect_crossings = [&](double cx, double cy) {
        std::vector<Point> pts;
        pts.reserve(num_rays);
        for (int k = 0; k < num_rays; ++k) {
            const double angle = 2.0 * M_PI * k / num_rays;
            const double dx = std::cos(angle);
            const double dy = std::sin(angle);
            double last_cross = -1.0;
            double prev = sample(frame, cx, cy);
            for (double t = 1.0; t < max_reach; t += 1.0) {
                const double x = cx + t * dx;
                const double y = cy + t * dy;
                if (x < 0 || y < 0 || x > frame.width - 1 || y > frame.height - 1) break;
                const double cur = sample(frame, x, y);
                if (prev > threshold && cur <= threshold) {
                    const double frac = (prev - threshold) / (prev - cur);
                    last_cross = t - 1.0 + frac;
                }
                prev = cur;
            }
            if (last_cross > 2.0) {
                pts.push_back({cx + last_cross * dx, cy + last_cross * dy});
            }
        }
        return pts;
    };

    std::vector<Point> edge = collect_crossings(cx0, cy0);
    if (edge.size() < 32) {
        throw_error(ErrorCode::DiskNotFound, "fewer than 32 limb edge points");
    }

    double cx = cx0, cy = cy0, r = 0;
    if (!kasa_fit(edge, cx, cy, r)) {
        throw_error(ErrorCode::DiskNotFound, "degenerate circle fit");
    }

    // Refinement pass: with limb darkening the threshold crossing sits inside
    // the true limb, so snap each ray's edge point to the steepest drop in a
    // window around the fitted circle, then refit.
    const double window = std::max(4.0, 0.08 * r);
    std::vector<Point> refined;
    refined.reserve(edge.size());
    for (int k = 0; k < num_rays; ++k) {
        const double angle = 2.0 * M_PI * k / num_rays;
        const double dx = std::cos(angle);
        const double dy = std::sin(angle);
        // Step response averaged over short segments on both sides of the
        // candidate edge; a single-sample difference is too noisy when the
        // rim drop is only a few times the pixel noise.
        auto drop_at = [&](double t) {
            double inner = 0.0, outer = 0.0;
            for (const double o : {0.5, 1.25, 2.0}) {
                inner += sample(frame, cx + (t - o) * dx, cy + (t - o) * dy);
                outer += sample(frame, cx + (t + o) * dx, cy + (t + o) * dy);
            }
            return (inner - outer) / 3.0;
        };
        double best_t = -1.0;
        double best_drop = 0.0;
        for (double t = r - window; t <= r + window; t += 0.5) {
            if (t < 4.0) continue;
            const double xb = cx + (t + 2.0) * dx;
            const double yb = cy + (t + 2.0) * dy;
            if (xb < 0 || yb < 0 || xb > frame.width - 1 || yb > frame.height - 1) continue;
            const double drop = drop_at(t);
            if (drop > best_drop) {
                best_drop = drop;
                best_t = t;
            }
        }
        if (best_t > 0) {
            // parabolic refinement on the drop profile around best_t
            const double h = 0.5;
            const double dm = drop_at(best_t - h);
            const double d0 = drop_at(best_t);
            const double dp = drop_at(best_t + h);
            const double denom = dm - 2 * d0 + dp;
            double t_ref = best_t;
            if (std::abs(denom) > 1e-12) {
                const double shift = 0.5 * h * (dm - dp) / denom;
                if (std::abs(shift) <= h) t_ref += shift;
            }
            refined.push_back({cx + t_ref * dx, cy + t_ref * dy});
        }
    }
    if (refined.size() >= 32) {
        double cx2 = cx, cy2 = cy, r2 = r;
        if (kasa_fit(refined, cx2, cy2, r2)) {
            cx = cx2;
            cy = cy2;
            r = r2;
            edge = std::move(refined);
        }
    }

    if (edge.size() < 32) {
        throw_error(ErrorCode::DiskNotFound, "fewer than 32 limb edge points after refinement");
    }
    const double rms = fit_rms(edge, cx, cy, r);
    if (rms > 5.0) {
        throw_error(ErrorCode::DiskNotFound, "limb fit RMS residual above 5 px");
    }
    if (r <= 0) {
        throw_error(ErrorCode::DiskNotFound, "non-positive radius");
    }
    return DiskGeometry{cx, cy, r};
}

HeliographicPos pixel_to_heliographic(const DiskGeometry& geom, double px, double py,
                                      double b0_deg) {
    const double x = (px - geom.center_x) / geom.radius;
    const double y = (geom.center_y - py) / geom.radius; // image y is down, solar north is up
    const double rho2 = x * x + y * y;
    if (rho2 >= 1.0) {
        throw_error(ErrorCode::OffDisk, "pixel outside the solar disk");
    }
    const double z = std::sqrt(1.0 - rho2);
    const double b0 = b0_deg / kDegPerRad;
    const double sin_lat = y * std::cos(b0) + z * std::sin(b0);
    const double lat = std::asin(std::clamp(sin_lat, -1.0, 1.0));
    const double lon = std::atan2(x, z * std::cos(b0) - y * std::sin(b0));
    return HeliographicPos{lat * kDegPerRad, lon * kDegPerRad};
}

void heliographic_to_pixel(const DiskGeometry& geom, const HeliographicPos& pos, double b0_deg,
                           double& px, double& py) {
    const double lat = pos.lat_deg / kDegPerRad;
    const double lon = pos.lon_deg / kDegPerRad;
    const double b0 = b0_deg / kDegPerRad;
    const double x = std::cos(lat) * std::sin(lon);
    const double y = std::sin(lat) * std::cos(b0) - std::cos(lat) * std::cos(lon) * std::sin(b0);
    px = geom.center_x + geom.radius * x;
    py = geom.center_y - geom.radius * y;
}

double great_circle_deg(const HeliographicPos& a, const HeliographicPos& b) {
    const double la = a.lat_deg / kDegPerRad;
    const double lb = b.lat_deg / kDegPerRad;
    const double dlon = (a.lon_deg - b.lon_deg) / kDegPerRad;
    const double c =
        std::sin(la) * std::sin(lb) + std::cos(la) * std::cos(lb) * std::cos(dlon);
    return std::acos(std::clamp(c, -1.0, 1.0)) * kDegPerRad;
}

} // namespace hef

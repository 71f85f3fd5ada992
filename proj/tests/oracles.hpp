#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "sonoshape/polygon.hpp"
#include "sonoshape/rasterizer.hpp"
#include "sonoshape/scene_config.hpp"

// Brute-force reference implementations, written independently of the
// library code they check.
namespace sonoshape::testing {

// Closed segment vs closed box by parametric clipping.
inline bool segment_meets_box(const Point2& a, const Point2& b, const Point2& lo, const Point2& hi) {
    double t0 = 0.0, t1 = 1.0;
    const Point2 d = b - a;
    for (int axis = 0; axis < 2; ++axis) {
        if (d[axis] == 0.0) {
            if (a[axis] < lo[axis] || a[axis] > hi[axis]) return false;
            continue;
        }
        double ta = (lo[axis] - a[axis]) / d[axis];
        double tb = (hi[axis] - a[axis]) / d[axis];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

// Cell is occupied iff any of 32x32 subsamples lies in the polygon or any edge crosses the cell.
RowMajorArray<std::uint8_t> supersampled_oracle(const ConvexPolygon& p, const SceneConfig& cfg) {
    const int m = cfg.inaccessible_dim();
    const double s = cfg.cell_size;
    const double origin = -0.5 * m * s;
    RowMajorArray<std::uint8_t> out = RowMajorArray<std::uint8_t>::Zero(m, m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            const Point2 lo(origin + c * s, origin + r * s);
            const Point2 hi = lo + Point2(s, s);
            bool hit = false;
            for (std::size_t k = 0; k < p.size() && !hit; ++k) hit = segment_meets_box(p[k], p.next(k), lo, hi);
            for (int u = 0; u < 32 && !hit; ++u)
                for (int v = 0; v < 32 && !hit; ++v)
                    hit = contains(p, lo + Point2((v + 0.5) / 32.0 * s, (u + 0.5) / 32.0 * s));
            out(r, c) = hit ? 1 : 0;
        }
    }
    return out;
}

// Explicit O(n^2) double sum over pixel pairs with the 2-D Gaussian coupling.
inline double double_sum_imed(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b, double sigma) {
    const Eigen::ArrayXXd d = a - b;
    const double scale = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);
    double total = 0.0;
    for (Eigen::Index u = 0; u < d.size(); ++u) {
        const Eigen::Index ur = u / d.cols(), uc = u % d.cols();
        for (Eigen::Index v = 0; v < d.size(); ++v) {
            const Eigen::Index vr = v / d.cols(), vc = v % d.cols();
            const double dist2 = static_cast<double>((ur - vr) * (ur - vr) + (uc - vc) * (uc - vc));
            total += scale * std::exp(-dist2 / (2.0 * sigma * sigma)) * d(ur, uc) * d(vr, vc);
        }
    }
    return std::sqrt(std::max(0.0, total));
}

}  // namespace sonoshape::testing

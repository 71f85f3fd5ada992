#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace sonoshape {

/// Gauss-Legendre rule on [0, 1] with N nodes.
template <int N, typename Scalar = double>
struct GaussLegendre {
    static_assert(N >= 1);
    Eigen::Array<Scalar, N, 1> nodes;
    Eigen::Array<Scalar, N, 1> weights;

    GaussLegendre() {
        // Newton on P_N from Chebyshev-like initial guesses; symmetric pairs.
        for (int k = 0; k < (N + 1) / 2; ++k) {
            Scalar x = std::cos(std::numbers::pi_v<Scalar> * (k + Scalar(0.75)) / (N + Scalar(0.5)));
            Scalar dp = 0;
            for (int it = 0; it < 100; ++it) {
                Scalar p0 = 1, p1 = x;
                for (int n = 2; n <= N; ++n) {
                    const Scalar p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (x * p1 - p0) / (x * x - 1);
                const Scalar step = p1 / dp;
                x -= step;
                if (std::abs(step) < Scalar(1e-16)) break;
            }
            // recompute derivative at the converged root
            Scalar p0 = 1, p1 = x;
            for (int n = 2; n <= N; ++n) {
                const Scalar p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
                p0 = p1;
                p1 = p2;
            }
            dp = N * (x * p1 - p0) / (x * x - 1);
            const Scalar w = 2 / ((1 - x * x) * dp * dp);
            nodes[k] = Scalar(0.5) * (1 - x);
            nodes[N - 1 - k] = Scalar(0.5) * (1 + x);
            weights[k] = weights[N - 1 - k] = Scalar(0.5) * w;
        }
    }

    static const GaussLegendre& instance() {
        static const GaussLegendre rule;
        return rule;
    }
};

}  // namespace sonoshape

#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "sonoshape/errors.hpp"
#include "sonoshape/rasterizer.hpp"

namespace sonoshape {

enum class ImedNormalization {
    /// Divide by the distance between all-ones and all-zeros images of the same size.
    OnesVsZeros,
    None,
};

struct IMEDConfig {
    double sigma = 1.0;  // pixels
    ImedNormalization normalization = ImedNormalization::OnesVsZeros;

    void validate() const {
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ContractError("IMEDConfig: sigma must be positive");
    }
};

/// n x n matrix of the 1-D Gaussian factor g(|a - b|) = exp(-d^2 / 2 sigma^2) / (sqrt(2 pi) sigma).
/// The 2-D pixel-coupling kernel G_uv is the product of a row and a column factor.
inline Eigen::MatrixXd imed_kernel_factor(Eigen::Index n, double sigma) {
    const double scale = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            const double d = static_cast<double>(a - b);
            k(a, b) = scale * std::exp(-d * d / (2.0 * sigma * sigma));
        }
    return k;
}

/// IMED^2 = <d, G d>, with G applied to the difference image d as a separable
/// Gaussian smoothing: rows, then columns.
template <typename DerivedA, typename DerivedB>
double imed(const Eigen::DenseBase<DerivedA>& a, const Eigen::DenseBase<DerivedB>& b, const IMEDConfig& cfg = {}) {
    cfg.validate();
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ContractError("imed: image dimensions differ");
    if (a.size() == 0) return 0.0;
    const Eigen::MatrixXd d = a.derived().template cast<double>().matrix() - b.derived().template cast<double>().matrix();
    const Eigen::MatrixXd smoothed = imed_kernel_factor(d.rows(), cfg.sigma) * d * imed_kernel_factor(d.cols(), cfg.sigma);
    // G is positive definite; clamp the rounding residue of an exactly-zero difference.
    return std::sqrt(std::max(0.0, d.cwiseProduct(smoothed).sum()));
}

/// Largest IMED between binary images of the given size: all-ones versus all-zeros.
inline double imed_diameter(Eigen::Index rows, Eigen::Index cols, double sigma) {
    return imed(Eigen::ArrayXXd::Ones(rows, cols), Eigen::ArrayXXd::Zero(rows, cols), IMEDConfig{sigma});
}

/// imed(pred, gt) divided by the binary-image diameter, a score in [0, 1].
template <typename DerivedA, typename DerivedB>
double normalized_imed(const Eigen::DenseBase<DerivedA>& pred, const Eigen::DenseBase<DerivedB>& gt,
                       const IMEDConfig& cfg = {}) {
    const double distance = imed(pred, gt, cfg);
    if (cfg.normalization == ImedNormalization::None || pred.size() == 0) return distance;
    return distance / imed_diameter(pred.rows(), pred.cols(), cfg.sigma);
}

inline double normalized_imed(const OccupancyGrid& pred, const OccupancyGrid& gt, const IMEDConfig& cfg = {}) {
    return normalized_imed(pred.bits, gt.bits, cfg);
}

}  // namespace sonoshape

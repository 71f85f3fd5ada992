#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sonoshape/bem.hpp"
#include "sonoshape/scene_config.hpp"

namespace sonoshape {

template <typename T>
using RowMajorArray = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Payload stored in cells whose loudness is unknown; the mask is authoritative.
inline constexpr float kUnknownSentinel = std::numeric_limits<float>::lowest();
/// Band energies below 10^(floor/10) are clamped so deep nulls stay finite.
inline constexpr double kLoudnessFloorDb = -120.0;

struct FrequencyNode {
    double omega;   // rad/s
    double weight;  // trapezoid weight, rad/s
};

/// Composite trapezoid nodes spanning the band edges; weights sum to the band width.
std::vector<FrequencyNode> quadrature_frequencies(std::pair<double, double> band, int n);

/// 10 log10 of the band-averaged |p|^2; returns kLoudnessFloorDb for silent input.
double loudness_at(std::span<const Complex> pressures, std::span<const FrequencyNode> nodes,
                   std::pair<double, double> band);

/// One channel L_{i,j}: loudness in dB over the region grid.
struct LoudnessGrid {
    RowMajorArray<float> values;
    RowMajorArray<std::uint8_t> mask;  // 1 where unknown
    int band_index = 0;
    int source_index = 0;
    std::string config_digest;
    /// Smallest reciprocal condition estimate over the band's surface solves (1 without an object).
    double min_rcond = 1.0;
};

/// Band loudness at arbitrary exterior points for a source at `source`.
/// A polygon with no vertices yields the free field. One surface solve per
/// quadrature frequency, reused across all points.
std::vector<double> band_loudness(const ConvexPolygon& polygon, const Point2& source, int band,
                                  const SceneConfig& cfg, std::span<const Point2> points,
                                  double* min_rcond = nullptr);

/// Loudness grid for source j and band i; unknown cells carry kUnknownSentinel.
/// Solver failures are rethrown annotated with (object, band, source, omega).
LoudnessGrid compute_grid(const ConvexPolygon& polygon, int j, int i, const SceneConfig& cfg,
                          const std::string& object_id = {});

/// Mesh wavenumber for band i: upper band edge over the sound speed.
double band_mesh_wavenumber(const SceneConfig& cfg, int i);

std::string config_digest(const SceneConfig& cfg);

}  // namespace sonoshape

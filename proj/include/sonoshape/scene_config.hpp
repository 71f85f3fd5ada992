#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sonoshape/config_file.hpp"

namespace sonoshape {

using Point2 = Eigen::Vector2d;

/// Physical and discretization constants shared by every stage.
///
/// Coordinates are in meters with the origin at the center of the simulated
/// square. Grid rows run along +y, columns along +x, both starting at the
/// minimum corner.
struct SceneConfig {
    double region_side = 5.16;
    double cell_size = 0.04;
    double inaccessible_side = 1.0;
    double source_radius = 5.0;
    int n_sources = 8;
    int n_bands = 4;
    double base_frequency = 125.0;
    double sound_speed = 343.0;
    int freq_samples_per_band = 8;
    int elements_per_wavelength = 8;

    /// Desk-scale profile: 129x129 region grid, 25x25 target grid.
    static SceneConfig desk();
    /// Full-resolution profile: 512x512 region grid, 100x100 target grid.
    static SceneConfig paper();

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;

    int grid_dim() const;
    int inaccessible_dim() const;
    /// First row/column index of the inaccessible square in the region grid.
    int inaccessible_offset() const;

    bool is_inaccessible(int row, int col) const;
    Point2 cell_center(int row, int col) const;
    /// Center of a cell in the inaccessible-region (target) grid.
    Point2 target_cell_center(int row, int col) const;
    double half_inaccessible() const { return 0.5 * inaccessible_side; }
};

enum class Access : unsigned char { Accessible = 0, Inaccessible = 1 };

struct GridPoint {
    Point2 position;
    Access access;
};

/// Source j on the circle of radius source_radius, angle j*2pi/n_sources.
Point2 source_position(const SceneConfig& cfg, int j);

/// Angular-frequency edges [w_i, w_{i+1}) of octave band i, w_i = 2pi f0 2^(i+1).
std::pair<double, double> band_edges(const SceneConfig& cfg, int i);

/// Cell centers of the full region grid, row-major from the minimum corner.
std::vector<GridPoint> grid_points(const SceneConfig& cfg);

/// Applies the scene keys of a key = value file on top of `base`.
/// Keys outside the scene schema are left for the caller; see KeyValueFile.
SceneConfig apply_scene_keys(const KeyValueFile& file, SceneConfig base);
/// Parses a file containing only scene keys; unknown keys are rejected.
SceneConfig parse_scene_config(const std::string& text, const SceneConfig& base = SceneConfig::desk());
/// Canonical key = value rendering; parse_scene_config(to_text(c)) == c.
std::string to_text(const SceneConfig& cfg);

}  // namespace sonoshape

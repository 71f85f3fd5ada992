#include "sonoshape/scene_config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sonoshape/errors.hpp"

namespace sonoshape {

namespace {

// Ratio must be a positive integer up to rounding in the decimal inputs.
int integral_ratio(double num, double den, const char* what) {
    const double ratio = num / den;
    const double rounded = std::round(ratio);
    if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * rounded) {
        throw ValidationError(std::string(what) + " is not a positive integer multiple of cell_size");
    }
    return static_cast<int>(rounded);
}

}  // namespace

SceneConfig SceneConfig::desk() { return SceneConfig{}; }

SceneConfig SceneConfig::paper() {
    SceneConfig cfg;
    cfg.region_side = 5.12;
    cfg.cell_size = 0.01;
    return cfg;
}

void SceneConfig::validate() const {
    if (!(cell_size > 0.0)) throw ValidationError("cell_size must be positive");
    const int n = integral_ratio(region_side, cell_size, "region_side");
    const int m = integral_ratio(inaccessible_side, cell_size, "inaccessible_side");
    if (!(inaccessible_side < region_side)) {
        throw ValidationError("inaccessible_side must be smaller than region_side");
    }
    if ((n - m) % 2 != 0) {
        throw ValidationError("region and inaccessible cell counts must differ by an even number "
                              "so the inaccessible square is centered on cell boundaries");
    }
    if (!(source_radius > 0.0)) throw ValidationError("source_radius must be positive");
    if (n_sources < 1) throw ValidationError("n_sources must be >= 1");
    if (n_bands < 1) throw ValidationError("n_bands must be >= 1");
    if (!(base_frequency > 0.0)) throw ValidationError("base_frequency must be positive");
    if (!(sound_speed > 0.0)) throw ValidationError("sound_speed must be positive");
    if (freq_samples_per_band < 2) throw ValidationError("freq_samples_per_band must be >= 2");
    if (elements_per_wavelength < 4) throw ValidationError("elements_per_wavelength must be >= 4");
}

int SceneConfig::grid_dim() const {
    return static_cast<int>(std::lround(region_side / cell_size));
}

int SceneConfig::inaccessible_dim() const {
    return static_cast<int>(std::lround(inaccessible_side / cell_size));
}

int SceneConfig::inaccessible_offset() const { return (grid_dim() - inaccessible_dim()) / 2; }

bool SceneConfig::is_inaccessible(int row, int col) const {
    const int lo = inaccessible_offset();
    const int hi = lo + inaccessible_dim();
    return row >= lo && row < hi && col >= lo && col < hi;
}

Point2 SceneConfig::cell_center(int row, int col) const {
    // (index + 1/2 - n/2) is exact in binary, so mirrored cells get negated coordinates.
    const double half_n = 0.5 * grid_dim();
    return {(col + 0.5 - half_n) * cell_size, (row + 0.5 - half_n) * cell_size};
}

Point2 SceneConfig::target_cell_center(int row, int col) const {
    const double half_m = 0.5 * inaccessible_dim();
    return {(col + 0.5 - half_m) * cell_size, (row + 0.5 - half_m) * cell_size};
}

Point2 source_position(const SceneConfig& cfg, int j) {
    if (j < 0 || j >= cfg.n_sources) {
        throw ContractError("source index " + std::to_string(j) + " out of range [0, " +
                            std::to_string(cfg.n_sources) + ")");
    }
    const double theta = 2.0 * std::numbers::pi * j / cfg.n_sources;
    return {cfg.source_radius * std::cos(theta), cfg.source_radius * std::sin(theta)};
}

std::pair<double, double> band_edges(const SceneConfig& cfg, int i) {
    if (i < 0 || i >= cfg.n_bands) {
        throw ContractError("band index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(cfg.n_bands) + ")");
    }
    const double lo = 2.0 * std::numbers::pi * cfg.base_frequency * std::ldexp(1.0, i + 1);
    return {lo, 2.0 * lo};
}

std::vector<GridPoint> grid_points(const SceneConfig& cfg) {
    const int n = cfg.grid_dim();
    std::vector<GridPoint> points;
    points.reserve(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            points.push_back({cfg.cell_center(r, c),
                              cfg.is_inaccessible(r, c) ? Access::Inaccessible : Access::Accessible});
        }
    }
    return points;
}

SceneConfig apply_scene_keys(const KeyValueFile& file, SceneConfig cfg) {
    if (auto v = file.take_double("region_side")) cfg.region_side = *v;
    if (auto v = file.take_double("cell_size")) cfg.cell_size = *v;
    if (auto v = file.take_double("inaccessible_side")) cfg.inaccessible_side = *v;
    if (auto v = file.take_double("source_radius")) cfg.source_radius = *v;
    if (auto v = file.take_int("n_sources")) cfg.n_sources = static_cast<int>(*v);
    if (auto v = file.take_int("n_bands")) cfg.n_bands = static_cast<int>(*v);
    if (auto v = file.take_double("base_frequency")) cfg.base_frequency = *v;
    if (auto v = file.take_double("sound_speed")) cfg.sound_speed = *v;
    if (auto v = file.take_int("freq_samples_per_band")) cfg.freq_samples_per_band = static_cast<int>(*v);
    if (auto v = file.take_int("elements_per_wavelength")) cfg.elements_per_wavelength = static_cast<int>(*v);
    cfg.validate();
    return cfg;
}

SceneConfig parse_scene_config(const std::string& text, const SceneConfig& base) {
    const auto file = KeyValueFile::parse(text);
    auto cfg = apply_scene_keys(file, base);
    file.reject_unconsumed();
    return cfg;
}

std::string to_text(const SceneConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "region_side = " << cfg.region_side << '\n'
        << "cell_size = " << cfg.cell_size << '\n'
        << "inaccessible_side = " << cfg.inaccessible_side << '\n'
        << "source_radius = " << cfg.source_radius << '\n'
        << "n_sources = " << cfg.n_sources << '\n'
        << "n_bands = " << cfg.n_bands << '\n'
        << "base_frequency = " << cfg.base_frequency << '\n'
        << "sound_speed = " << cfg.sound_speed << '\n'
        << "freq_samples_per_band = " << cfg.freq_samples_per_band << '\n'
        << "elements_per_wavelength = " << cfg.elements_per_wavelength << '\n';
    return out.str();
}

}  // namespace sonoshape

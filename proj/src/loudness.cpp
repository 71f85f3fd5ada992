#include "sonoshape/loudness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sonoshape/digest.hpp"
#include "sonoshape/errors.hpp"

namespace sonoshape {

std::vector<FrequencyNode> quadrature_frequencies(std::pair<double, double> band, int n) {
    if (n < 2) throw ContractError("quadrature_frequencies: need at least 2 nodes");
    const auto [lo, hi] = band;
    const double step = (hi - lo) / (n - 1);
    std::vector<FrequencyNode> nodes(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        nodes[static_cast<std::size_t>(m)] = {m + 1 == n ? hi : lo + m * step, (m == 0 || m + 1 == n) ? 0.5 * step : step};
    }
    return nodes;
}

double loudness_at(std::span<const Complex> pressures, std::span<const FrequencyNode> nodes,
                   std::pair<double, double> band) {
    if (pressures.size() != nodes.size()) throw ContractError("loudness_at: one pressure per quadrature node");
    const double width = band.second - band.first;
    if (!(width > 0.0)) throw ContractError("loudness_at: band width must be positive");
    double energy = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) energy += nodes[q].weight * std::norm(pressures[q]);
    energy /= width;
    const double floor = std::pow(10.0, kLoudnessFloorDb / 10.0);
    return energy > floor ? 10.0 * std::log10(energy) : kLoudnessFloorDb;
}

double band_mesh_wavenumber(const SceneConfig& cfg, int i) { return band_edges(cfg, i).second / cfg.sound_speed; }

std::string config_digest(const SceneConfig& cfg) { return sha256_hex(to_text(cfg)); }

std::vector<double> band_loudness(const ConvexPolygon& polygon, const Point2& source, int band,
                                  const SceneConfig& cfg, std::span<const Point2> points,
                                  double* min_rcond) {
    const auto edges = band_edges(cfg, band);
    const auto nodes = quadrature_frequencies(edges, cfg.freq_samples_per_band);
    const BoundaryMesh mesh = polygon.size() == 0
                                  ? BoundaryMesh{}
                                  : build_mesh(polygon, band_mesh_wavenumber(cfg, band), cfg.elements_per_wavelength);

    std::vector<SurfaceSolution> sols;
    sols.reserve(nodes.size());
    for (const auto& node : nodes) {
        try {
            sols.push_back(solve_surface(mesh, source, node.omega / cfg.sound_speed));
        } catch (const SolverError& e) {
            std::ostringstream msg;
            msg << "omega " << node.omega << " rad/s: " << e.what();
            throw SolverError(msg.str(), e.condition_estimate());
        }
    }
    if (min_rcond) {
        *min_rcond = 1.0;
        for (const auto& s : sols) *min_rcond = std::min(*min_rcond, s.rcond);
    }
    const Eigen::MatrixXcd p = exterior_pressure_sweep(sols, mesh, points);

    // energy accumulates in node order, so the result does not depend on who calls us
    std::vector<double> energy(points.size(), 0.0);
    for (std::size_t n = 0; n < points.size(); ++n) {
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            energy[n] += nodes[q].weight * std::norm(p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q)));
        }
    }
    const double width = edges.second - edges.first;
    const double floor = std::pow(10.0, kLoudnessFloorDb / 10.0);
    std::vector<double> db(points.size());
    for (std::size_t n = 0; n < points.size(); ++n) {
        const double e = energy[n] / width;
        db[n] = e > floor ? 10.0 * std::log10(e) : kLoudnessFloorDb;
    }
    return db;
}

LoudnessGrid compute_grid(const ConvexPolygon& polygon, int j, int i, const SceneConfig& cfg,
                          const std::string& object_id) {
    const Point2 source = source_position(cfg, j);
    band_edges(cfg, i);  // range check before any work
    if (polygon.size() != 0 && !fits_in_square(polygon, cfg.half_inaccessible())) {
        throw ContractError("compute_grid: polygon escapes the inaccessible square");
    }

    const int n = cfg.grid_dim();
    LoudnessGrid grid;
    grid.band_index = i;
    grid.source_index = j;
    grid.config_digest = config_digest(cfg);
    grid.values = RowMajorArray<float>::Constant(n, n, kUnknownSentinel);
    grid.mask = RowMajorArray<std::uint8_t>::Zero(n, n);

    std::vector<Point2> points;
    std::vector<std::pair<int, int>> cells;
    points.reserve(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (cfg.is_inaccessible(r, c)) {
                grid.mask(r, c) = 1;
            } else {
                points.push_back(cfg.cell_center(r, c));
                cells.emplace_back(r, c);
            }
        }
    }

    std::vector<double> db;
    try {
        db = band_loudness(polygon, source, i, cfg, points, &grid.min_rcond);
    } catch (const SolverError& e) {
        std::ostringstream msg;
        msg << "object '" << object_id << "' band " << i << " source " << j << ": " << e.what();
        throw SolverError(msg.str(), e.condition_estimate());
    }
    for (std::size_t q = 0; q < cells.size(); ++q) {
        grid.values(cells[q].first, cells[q].second) = static_cast<float>(db[q]);
    }
    return grid;
}

}  // namespace sonoshape

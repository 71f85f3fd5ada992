#include "sonoshape/rasterizer.hpp"

#include <algorithm>
#include <cmath>

#include "sonoshape/errors.hpp"

namespace sonoshape {

std::pair<Point2, Point2> target_cell_bounds(const SceneConfig& cfg, int row, int col) {
    // (index - m/2) is exact in binary, so the grid is symmetric about the origin bit for bit.
    const double half_m = 0.5 * cfg.inaccessible_dim();
    const double s = cfg.cell_size;
    return {Point2((col - half_m) * s, (row - half_m) * s), Point2((col + 1 - half_m) * s, (row + 1 - half_m) * s)};
}

bool box_intersects_polygon(const Point2& lo, const Point2& hi, const ConvexPolygon& p) {
    const auto [plo, phi] = bounding_box(p);
    if (phi.x() < lo.x() || plo.x() > hi.x() || phi.y() < lo.y() || plo.y() > hi.y()) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const Point2 e = p.next(k) - p[k];
        const Point2 n(e.y(), -e.x());  // outward for CCW order
        // box corner that reaches furthest against the outward normal
        const Point2 corner(n.x() > 0.0 ? lo.x() : hi.x(), n.y() > 0.0 ? lo.y() : hi.y());
        if (n.dot(corner - p[k]) > 0.0) return false;
    }
    return true;
}

OccupancyGrid rasterize(const ConvexPolygon& p, const SceneConfig& cfg, std::string object_id) {
    const int m = cfg.inaccessible_dim();
    OccupancyGrid grid;
    grid.object_id = std::move(object_id);
    grid.bits = RowMajorArray<std::uint8_t>::Zero(m, m);
    if (p.size() < 3) return grid;

    const auto [plo, phi] = bounding_box(p);
    const double half_m = 0.5 * m;
    auto index_range = [&](double lo, double hi) {
        const int first = std::max(0, static_cast<int>(std::floor(lo / cfg.cell_size + half_m)) - 1);
        const int last = std::min(m - 1, static_cast<int>(std::floor(hi / cfg.cell_size + half_m)) + 1);
        return std::pair{first, last};
    };
    const auto [c0, c1] = index_range(plo.x(), phi.x());
    const auto [r0, r1] = index_range(plo.y(), phi.y());
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            const auto [lo, hi] = target_cell_bounds(cfg, r, c);
            grid.bits(r, c) = box_intersects_polygon(lo, hi, p) ? 1 : 0;
        }
    }
    return grid;
}

double occupancy_area_error(const OccupancyGrid& g, const ConvexPolygon& p, const SceneConfig& cfg) {
    const double area = std::abs(signed_area(p));
    if (!(area > 0.0)) throw DomainError("occupancy_area_error: polygon has zero area");
    const int m = cfg.inaccessible_dim();
    if (g.bits.rows() != m || g.bits.cols() != m) throw ContractError("occupancy_area_error: grid/config mismatch");
    const double occupied = g.bits.cast<double>().sum() * cfg.cell_size * cfg.cell_size;
    return std::abs(occupied - area) / area;
}

}  // namespace sonoshape

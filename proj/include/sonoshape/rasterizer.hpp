#pragma once

#include <cstdint>
#include <string>

#include "sonoshape/loudness.hpp"
#include "sonoshape/polygon.hpp"

namespace sonoshape {

/// Binary image over the inaccessible square: 1 = object, 0 = air. Row-major,
/// rows along +y from the square's minimum corner.
struct OccupancyGrid {
    RowMajorArray<std::uint8_t> bits;
    std::string object_id;
};

/// Bounds [lo, hi] of target cell (row, col) in meters.
std::pair<Point2, Point2> target_cell_bounds(const SceneConfig& cfg, int row, int col);

/// True iff the closed axis-aligned box meets the closed convex polygon (separating axes).
bool box_intersects_polygon(const Point2& lo, const Point2& hi, const ConvexPolygon& p);

/// A cell is occupied iff its closed square intersects the closed polygon.
OccupancyGrid rasterize(const ConvexPolygon& p, const SceneConfig& cfg, std::string object_id = {});

/// |occupied area - polygon area| / polygon area.
double occupancy_area_error(const OccupancyGrid& g, const ConvexPolygon& p, const SceneConfig& cfg);

}  // namespace sonoshape

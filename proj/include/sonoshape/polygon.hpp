#pragma once

#include <string>
#include <vector>

#include "sonoshape/scene_config.hpp"

namespace sonoshape {

/// Horizontal cross-section of a scattering object; vertices counter-clockwise.
struct ConvexPolygon {
    std::vector<Point2> vertices;
    int category = 0;  // vertex count label, 3..7 for generated shapes

    std::size_t size() const { return vertices.size(); }
    const Point2& operator[](std::size_t k) const { return vertices[k]; }
    const Point2& next(std::size_t k) const { return vertices[(k + 1) % vertices.size()]; }
};

/// Polygon with the identifier it carries through every file of a dataset.
struct Shape {
    std::string id;
    ConvexPolygon polygon;
};

double signed_area(const ConvexPolygon& p);
double perimeter(const ConvexPolygon& p);
Point2 centroid(const ConvexPolygon& p);

/// Every cross product of consecutive edge vectors is positive.
bool is_strictly_convex(const ConvexPolygon& p);
/// Axis-aligned bounding box as (min corner, max corner).
std::pair<Point2, Point2> bounding_box(const ConvexPolygon& p);
/// Closed axis-aligned square |x|,|y| <= half_side.
bool fits_in_square(const ConvexPolygon& p, double half_side);
/// Strictly interior point test.
bool strictly_contains(const ConvexPolygon& p, const Point2& x);
/// Closed point test (boundary counts as inside).
bool contains(const ConvexPolygon& p, const Point2& x);
double distance_to_boundary(const ConvexPolygon& p, const Point2& x);

/// Checks vertex count, distinctness, strict convexity and containment.
/// Returns an empty string when valid, otherwise the first violation.
std::string check_invariants(const ConvexPolygon& p, double half_side);

/// Line-oriented shape records: `id category x0 y0 x1 y1 ...`, full precision.
std::string format_shapes(const std::vector<Shape>& shapes);
std::vector<Shape> parse_shapes(const std::string& text);
void write_shapes(const std::vector<Shape>& shapes, const std::string& path);
std::vector<Shape> read_shapes(const std::string& path);

}  // namespace sonoshape

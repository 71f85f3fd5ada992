#include "sonoshape/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sonoshape/errors.hpp"

namespace sonoshape {

namespace {

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Point2& a, const Point2& b, const Point2& x) {
    const Point2 ab = b - a;
    const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (a + t * ab - x).norm();
}

}  // namespace

double signed_area(const ConvexPolygon& p) {
    double twice = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) twice += cross(p[k], p.next(k));
    return 0.5 * twice;
}

double perimeter(const ConvexPolygon& p) {
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) total += (p.next(k) - p[k]).norm();
    return total;
}

Point2 centroid(const ConvexPolygon& p) {
    double twice_area = 0.0;
    Point2 acc = Point2::Zero();
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double w = cross(p[k], p.next(k));
        twice_area += w;
        acc += w * (p[k] + p.next(k));
    }
    return acc / (3.0 * twice_area);
}

bool is_strictly_convex(const ConvexPolygon& p) {
    const std::size_t n = p.size();
    if (n < 3) return false;
    for (std::size_t k = 0; k < n; ++k) {
        const Point2 e0 = p.next(k) - p[k];
        const Point2 e1 = p[(k + 2) % n] - p.next(k);
        if (!(cross(e0, e1) > 0.0)) return false;
    }
    return true;
}

std::pair<Point2, Point2> bounding_box(const ConvexPolygon& p) {
    Point2 lo = Point2::Constant(std::numeric_limits<double>::infinity());
    Point2 hi = -lo;
    for (const auto& v : p.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return {lo, hi};
}

bool fits_in_square(const ConvexPolygon& p, double half_side) {
    return std::all_of(p.vertices.begin(), p.vertices.end(), [half_side](const Point2& v) {
        return std::abs(v.x()) <= half_side && std::abs(v.y()) <= half_side;
    });
}

bool strictly_contains(const ConvexPolygon& p, const Point2& x) {
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!(cross(p.next(k) - p[k], x - p[k]) > 0.0)) return false;
    }
    return true;
}

bool contains(const ConvexPolygon& p, const Point2& x) {
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (cross(p.next(k) - p[k], x - p[k]) < 0.0) return false;
    }
    return true;
}

double distance_to_boundary(const ConvexPolygon& p, const Point2& x) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p.size(); ++k) best = std::min(best, segment_distance(p[k], p.next(k), x));
    return best;
}

std::string check_invariants(const ConvexPolygon& p, double half_side) {
    if (static_cast<int>(p.size()) != p.category) return "vertex count differs from category";
    for (std::size_t a = 0; a < p.size(); ++a) {
        for (std::size_t b = a + 1; b < p.size(); ++b) {
            if (p[a] == p[b]) return "duplicate vertices";
        }
    }
    if (!is_strictly_convex(p)) return "not strictly convex (or not counter-clockwise)";
    if (!fits_in_square(p, half_side)) return "escapes the inaccessible square";
    return {};
}

std::string format_shapes(const std::vector<Shape>& shapes) {
    std::ostringstream out;
    out << "# sonoshape shapes v1: id category x0 y0 x1 y1 ... (meters, CCW)\n";
    out << std::setprecision(17);
    for (const auto& s : shapes) {
        out << s.id << ' ' << s.polygon.category;
        for (const auto& v : s.polygon.vertices) out << ' ' << v.x() << ' ' << v.y();
        out << '\n';
    }
    return out.str();
}

std::vector<Shape> parse_shapes(const std::string& text) {
    std::vector<Shape> shapes;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        std::istringstream fields(line);
        Shape s;
        if (!(fields >> s.id >> s.polygon.category) || s.polygon.category < 3) {
            throw ValidationError("shapes line " + std::to_string(line_no) + ": bad id/category");
        }
        for (int k = 0; k < s.polygon.category; ++k) {
            double x = 0.0, y = 0.0;
            if (!(fields >> x >> y)) {
                throw ValidationError("shapes line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(s.polygon.category) + " vertices");
            }
            s.polygon.vertices.emplace_back(x, y);
        }
        std::string extra;
        if (fields >> extra) throw ValidationError("shapes line " + std::to_string(line_no) + ": trailing data");
        shapes.push_back(std::move(s));
    }
    return shapes;
}

void write_shapes(const std::vector<Shape>& shapes, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << format_shapes(shapes);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<Shape> read_shapes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open shapes file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_shapes(buf.str());
}

}  // namespace sonoshape

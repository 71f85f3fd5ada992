#include "sonoshape/shape_forge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <iomanip>
#include <sstream>

#include "sonoshape/errors.hpp"

namespace sonoshape {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Pull vertices that rounding pushed a few ulps past the square back onto it.
void clamp_into(ConvexPolygon& p, double half_side) {
    for (auto& v : p.vertices) {
        v.x() = std::clamp(v.x(), -half_side, half_side);
        v.y() = std::clamp(v.y(), -half_side, half_side);
    }
}

double draw_in(Rng& rng, double lo, double hi) {
    if (!(hi > lo)) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

const char* to_string(Split split) { return split == Split::Training ? "training" : "test"; }

ShapeSetSpec ShapeSetSpec::training(int per_category, std::uint64_t seed, double inaccessible_side) {
    ShapeSetSpec spec;
    spec.split = Split::Training;
    spec.instances_per_category = per_category;
    spec.circle_radii = {0.5 * inaccessible_side};
    spec.scaling_enabled = true;
    spec.rng_seed = seed;
    spec.inaccessible_side = inaccessible_side;
    return spec;
}

ShapeSetSpec ShapeSetSpec::test(int per_category, std::uint64_t seed) {
    ShapeSetSpec spec;
    spec.split = Split::Test;
    spec.instances_per_category = per_category;
    spec.circle_radii = {0.30, 0.35, 0.40, 0.45};
    spec.scaling_enabled = false;
    spec.rng_seed = seed;
    return spec;
}

void ShapeSetSpec::validate() const {
    if (instances_per_category < 0) throw ValidationError("instances_per_category must be >= 0");
    if (circle_radii.empty()) throw ValidationError("at least one circle radius is required");
    for (double r : circle_radii) {
        if (!(r > 0.0) || r > 0.5 * inaccessible_side) {
            throw ValidationError("circle radius must lie in (0, inaccessible_side/2]");
        }
    }
    for (int c : categories) {
        if (c < 3 || c > 7) throw ValidationError("category " + std::to_string(c) + " outside 3..7");
    }
    if (!(overlap_threshold >= 0.0)) throw ValidationError("overlap_threshold must be >= 0");
}

ConvexPolygon generate_polygon(int category, double radius, Rng& rng) {
    if (category < 3 || category > 7) throw ContractError("category must be in 3..7");
    if (!(radius > 0.0)) throw ContractError("radius must be positive");
    const double min_gap = kTwoPi / (4.0 * category);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::vector<double> angles(static_cast<std::size_t>(category));
    for (;;) {
        for (auto& a : angles) a = angle(rng);
        std::sort(angles.begin(), angles.end());
        bool ok = angles.front() + kTwoPi - angles.back() >= min_gap;
        for (std::size_t k = 1; ok && k < angles.size(); ++k) ok = angles[k] - angles[k - 1] >= min_gap;
        if (ok) break;
    }
    ConvexPolygon p;
    p.category = category;
    for (double a : angles) p.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a));
    return p;
}

ConvexPolygon scale_polygon(const ConvexPolygon& p, double factor) {
    if (!(factor > 0.0)) throw ContractError("scale factor must be positive");
    const Point2 c = centroid(p);
    ConvexPolygon out = p;
    for (auto& v : out.vertices) v = c + factor * (v - c);
    return out;
}

ConvexPolygon scale_polygon(const ConvexPolygon& p, Rng& rng, double half_side) {
    std::uniform_real_distribution<double> factor(kMinScale, kMaxScale);
    for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
        auto scaled = scale_polygon(p, factor(rng));
        if (fits_in_square(scaled, half_side)) return scaled;
    }
    throw GenerationError("no scale factor in [0.6, 1.0] keeps the polygon inside the square");
}

ConvexPolygon translate_polygon(const ConvexPolygon& p, const Point2& offset) {
    ConvexPolygon out = p;
    for (auto& v : out.vertices) v += offset;
    return out;
}

ConvexPolygon translate_polygon(const ConvexPolygon& p, Rng& rng, double half_side) {
    const auto [lo, hi] = bounding_box(p);
    const Point2 min_offset = Point2::Constant(-half_side) - lo;
    const Point2 max_offset = Point2::Constant(half_side) - hi;
    if ((max_offset.array() < min_offset.array()).any()) {
        throw ContractError("polygon does not fit in the square; no translation can place it");
    }
    const Point2 offset(draw_in(rng, min_offset.x(), max_offset.x()),
                        draw_in(rng, min_offset.y(), max_offset.y()));
    auto out = translate_polygon(p, offset);
    clamp_into(out, half_side);
    return out;
}

double vertex_set_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
    if (a.size() != b.size() || a.size() == 0) return std::numeric_limits<double>::infinity();
    const std::size_t n = a.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t shift = 0; shift < n; ++shift) {
        double worst = 0.0;
        for (std::size_t k = 0; k < n && worst < best; ++k) {
            worst = std::max(worst, (a[k] - b[(k + shift) % n]).norm());
        }
        best = std::min(best, worst);
    }
    return best;
}

std::vector<Shape> generate_split(const ShapeSetSpec& spec, const std::vector<Shape>* reference) {
    spec.validate();
    const double half = 0.5 * spec.inaccessible_side;
    Rng rng(spec.rng_seed);
    std::vector<Shape> shapes;
    shapes.reserve(spec.total());
    const char* prefix = spec.split == Split::Training ? "train-" : "test-";

    for (int category : spec.categories) {
        for (int k = 0; k < spec.instances_per_category; ++k) {
            const double radius = spec.circle_radii[static_cast<std::size_t>(k) % spec.circle_radii.size()];
            bool placed = false;
            for (int attempt = 0; attempt < kRetryBudget && !placed; ++attempt) {
                auto poly = generate_polygon(category, radius, rng);
                clamp_into(poly, half);
                if (spec.scaling_enabled) poly = scale_polygon(poly, rng, half);
                poly = translate_polygon(poly, rng, half);

                if (reference) {
                    const bool overlaps = std::any_of(reference->begin(), reference->end(), [&](const Shape& r) {
                        return vertex_set_distance(poly, r.polygon) < spec.overlap_threshold;
                    });
                    if (overlaps) continue;
                }
                std::ostringstream id;
                id << prefix << std::setw(6) << std::setfill('0') << shapes.size();
                shapes.push_back({id.str(), std::move(poly)});
                placed = true;
            }
            if (!placed) {
                std::ostringstream msg;
                msg << to_string(spec.split) << " split: no non-overlapping instance after " << kRetryBudget
                    << " attempts (category " << category << ", radius " << radius << ", instance " << k
                    << ", threshold " << spec.overlap_threshold << ")";
                throw GenerationError(msg.str());
            }
        }
    }
    return shapes;
}

}  // namespace sonoshape

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sonoshape/polygon.hpp"

namespace sonoshape {

using Rng = std::mt19937_64;

enum class Split { Training, Test };

const char* to_string(Split split);

struct ShapeSetSpec {
    Split split = Split::Training;
    /// Instances per vertex-count category; radii are cycled across them.
    int instances_per_category = 40;
    std::vector<double> circle_radii;
    bool scaling_enabled = true;
    std::uint64_t rng_seed = 0;
    std::vector<int> categories{3, 4, 5, 6, 7};
    double inaccessible_side = 1.0;
    /// Test polygons closer than this (max vertex distance) to a training polygon are redrawn.
    double overlap_threshold = 0.04;

    static ShapeSetSpec training(int per_category, std::uint64_t seed, double inaccessible_side = 1.0);
    static ShapeSetSpec test(int per_category, std::uint64_t seed);

    void validate() const;
    std::size_t total() const { return categories.size() * static_cast<std::size_t>(instances_per_category); }
};

inline constexpr double kMinScale = 0.6;
inline constexpr double kMaxScale = 1.0;
inline constexpr int kRetryBudget = 1000;

/// Vertices on the circle of `radius` about the origin at sorted random angles.
/// Draws whose consecutive angular gaps fall below 2pi/(4*category) are redrawn.
ConvexPolygon generate_polygon(int category, double radius, Rng& rng);

/// Similarity about the polygon centroid.
ConvexPolygon scale_polygon(const ConvexPolygon& p, double factor);
/// Draws a factor in [kMinScale, kMaxScale], redrawing while the result escapes the square.
ConvexPolygon scale_polygon(const ConvexPolygon& p, Rng& rng, double half_side);

ConvexPolygon translate_polygon(const ConvexPolygon& p, const Point2& offset);
/// Uniform offset over the range that keeps the polygon inside the closed square.
ConvexPolygon translate_polygon(const ConvexPolygon& p, Rng& rng, double half_side);

/// Max vertex distance under the best cyclic alignment; +inf across categories.
double vertex_set_distance(const ConvexPolygon& a, const ConvexPolygon& b);

/// Deterministic in (spec, reference). When `reference` is given, polygons within
/// spec.overlap_threshold of any reference polygon are rejected and redrawn.
std::vector<Shape> generate_split(const ShapeSetSpec& spec, const std::vector<Shape>* reference = nullptr);

}  // namespace sonoshape

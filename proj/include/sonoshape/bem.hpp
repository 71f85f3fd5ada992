#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sonoshape/polygon.hpp"

namespace sonoshape {

using Complex = std::complex<double>;

struct Segment {
    Point2 start;
    Point2 end;
    Point2 midpoint;
    Point2 normal;  // outward unit normal
    double length;
};

/// Piecewise-straight discretization of a polygon boundary, traversed CCW.
struct BoundaryMesh {
    std::vector<Segment> segments;
    std::string polygon_id;

    std::size_t size() const { return segments.size(); }
    bool empty() const { return segments.empty(); }
    double total_length() const;
    /// Closed test against the meshed (convex) boundary.
    bool encloses(const Point2& x) const;
};

/// Splits every edge uniformly so no segment exceeds (2pi/k_max)/epw.
BoundaryMesh build_mesh(const ConvexPolygon& p, double k_max, int epw, std::string polygon_id = {});

/// Free-space field of a unit line source: (i/4) H0^(1)(k|x - x_s|).
Complex incident_pressure(const Point2& source, double k, const Point2& x);

/// Total surface pressure at segment midpoints for a rigid scatterer.
struct SurfaceSolution {
    double wavenumber = 0.0;
    Point2 source = Point2::Zero();
    Eigen::VectorXcd pressure;
    /// Reciprocal condition estimate of the boundary system (1 for an empty mesh).
    double rcond = 1.0;
};

/// Burton-Miller collocation for the exterior Neumann problem, coupling i/k.
///
/// Piecewise-constant pressure, midpoint collocation. The hypersingular
/// self-term is the Hadamard finite part of the Laplace singularity plus a
/// numerically integrated log-singular remainder.
SurfaceSolution solve_surface(const BoundaryMesh& mesh, const Point2& source, double k);

/// Total pressure at an exterior point: incident field plus the double-layer
/// representation of the surface pressure.
Complex exterior_pressure(const SurfaceSolution& sol, const BoundaryMesh& mesh, const Point2& x);

/// Batched exterior_pressure; same values, amortized setup.
Eigen::VectorXcd exterior_pressure(const SurfaceSolution& sol, const BoundaryMesh& mesh,
                                   std::span<const Point2> points);

/// Total pressure for several solutions on one mesh (typically the quadrature
/// frequencies of a band) at many points; result is points x solutions.
///
/// Geometry is shared across frequencies and, for uniformly spaced wavenumbers,
/// the far-field phase advances by recurrence. Agrees with exterior_pressure
/// to ~1e-11 relative.
Eigen::MatrixXcd exterior_pressure_sweep(std::span<const SurfaceSolution> sols, const BoundaryMesh& mesh,
                                         std::span<const Point2> points);

namespace detail {

/// Collocation-matrix entries for a single (point, segment) pair, exposed for tests.
struct KernelIntegrals {
    Complex double_layer;    // int dG/dn_y
    Complex hypersingular;   // d/dn_x int dG/dn_y
};

KernelIntegrals integrate_segment(const Point2& x, const Point2& normal_x, const Segment& seg, double k,
                                  bool self);

}  // namespace detail

}  // namespace sonoshape

#pragma once

#include "sonoshape/bem.hpp"

namespace sonoshape {

/// Total pressure for a rigid circular cylinder of radius `a` centered at the
/// origin, excited by a unit line source at `source`.
///
/// Incident part in closed form; scattered part as the partial-wave series
///   -(i/4) sum_n J_n'(ka)/H_n'(ka) H_n(k rs) H_n(k r) e^{in(phi - phi_s)}
/// summed until an increment drops below 1e-12 of the running total.
/// Uses the standard library's cylindrical Bessel functions throughout, so it
/// shares no code with the boundary solver.
Complex analytic_cylinder(double a, const Point2& source, double k, const Point2& x);

inline constexpr int kCylinderTermBudget = 400;

/// Mesh of the regular n-gon inscribed in the circle of radius a (vertex 0 on +x).
ConvexPolygon circle_polygon(double a, int n);

}  // namespace sonoshape

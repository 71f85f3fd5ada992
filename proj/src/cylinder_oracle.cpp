#include "sonoshape/cylinder_oracle.hpp"

#include <cmath>
#include <numbers>

#include "sonoshape/errors.hpp"

namespace sonoshape {

namespace {

Complex hankel_n(int n, double z) { return {std::cyl_bessel_j(n, z), std::cyl_neumann(n, z)}; }

// J_n'(z) = (J_{n-1} - J_{n+1}) / 2, same for Y; J_{-1} = -J_1.
Complex hankel_n_prime(int n, double z) {
    if (n == 0) return -hankel_n(1, z);
    return 0.5 * (hankel_n(n - 1, z) - hankel_n(n + 1, z));
}

double bessel_j_prime(int n, double z) {
    if (n == 0) return -std::cyl_bessel_j(1, z);
    return 0.5 * (std::cyl_bessel_j(n - 1, z) - std::cyl_bessel_j(n + 1, z));
}

}  // namespace

Complex analytic_cylinder(double a, const Point2& source, double k, const Point2& x) {
    const double rs = source.norm();
    const double r = x.norm();
    if (!(a >= 0.0) || !(rs > a) || !(r > a)) {
        throw DomainError("analytic_cylinder: source and evaluation point must lie outside the cylinder");
    }
    const Complex i(0.0, 1.0);
    Complex total = 0.25 * i * Complex(std::cyl_bessel_j(0, k * (x - source).norm()),
                                       std::cyl_neumann(0, k * (x - source).norm()));
    if (a == 0.0) return total;

    const double dphi = std::atan2(x.y(), x.x()) - std::atan2(source.y(), source.x());
    Complex scattered(0.0, 0.0);
    int quiet = 0;
    for (int n = 0; n < kCylinderTermBudget; ++n) {
        const Complex coeff = bessel_j_prime(n, k * a) / hankel_n_prime(n, k * a);
        const Complex term = -0.25 * i * coeff * hankel_n(n, k * rs) * hankel_n(n, k * r) *
                             ((n == 0 ? 1.0 : 2.0) * std::cos(n * dphi));
        scattered += term;
        // cos(n dphi) can vanish for a single n; require two consecutive small increments.
        const bool small = std::abs(term) < 1e-12 * std::abs(scattered) || std::abs(term) < 1e-300;
        quiet = small && n > k * a ? quiet + 1 : 0;
        if (quiet >= 2) return total + scattered;
    }
    throw OracleError("analytic_cylinder: partial-wave series did not converge within the term budget");
}

ConvexPolygon circle_polygon(double a, int n) {
    if (n < 3 || !(a > 0.0)) throw ContractError("circle_polygon: need n >= 3 and a > 0");
    ConvexPolygon p;
    p.category = n;
    for (int v = 0; v < n; ++v) {
        const double t = 2.0 * std::numbers::pi * v / n;
        p.vertices.emplace_back(a * std::cos(t), a * std::sin(t));
    }
    return p;
}

}  // namespace sonoshape

#include "sonoshape/bem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "sonoshape/errors.hpp"
#include "sonoshape/quadrature.hpp"
#include "sonoshape/special_functions.hpp"

namespace sonoshape {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI(0.0, 1.0);

// Below this reciprocal condition estimate the boundary system is treated as singular.
constexpr double kMinRcond = 1e-13;
// Segments at least this many lengths away use the fixed far-field rule.
constexpr double kFarRatio = 4.0;
constexpr int kMaxSplitDepth = 40;

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Point2& x, const Point2& a, const Point2& b) {
    const Point2 ab = b - a;
    const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (a + t * ab - x).norm();
}

struct KernelValues {
    Complex k;  // dG/dn_y
    Complex t;  // d^2G/dn_x dn_y
};

// r = x - y; G = (i/4) H0(k|r|)
inline KernelValues kernels(const Point2& x, const Point2& nx, const Point2& y, const Point2& ny, double k) {
    const Point2 r = x - y;
    const double R = r.norm();
    const auto h = hankel01(k * R);
    const double rnx = r.dot(nx) / R;
    const double rny = r.dot(ny) / R;
    const Complex dgdny = 0.25 * kI * k * h.h1 * rny;
    const Complex dd = 0.25 * kI * k * k * (h.h0 - 2.0 * h.h1 / (k * R)) * rnx * rny +
                       0.25 * kI * k * h.h1 / R * nx.dot(ny);
    return {dgdny, dd};
}

inline Complex double_layer_kernel(const Point2& x, const Point2& y, const Point2& ny, double k) {
    const Point2 r = x - y;
    const double R = r.norm();
    return 0.25 * kI * k * hankel01(k * R).h1 * (r.dot(ny) / R);
}

template <int N, typename F>
void gauss_on(const Point2& a, const Point2& b, F&& f) {
    const auto& rule = GaussLegendre<N>::instance();
    const Point2 ab = b - a;
    const double len = ab.norm();
    for (int q = 0; q < N; ++q) f(a + rule.nodes[q] * ab, rule.weights[q] * len);
}

// Bisects toward x until every piece is at least its own length away, then 8-point Gauss.
template <typename F>
void adaptive_on(const Point2& x, const Point2& a, const Point2& b, F&& f, int depth = 0) {
    const double len = (b - a).norm();
    if (depth >= kMaxSplitDepth || point_segment_distance(x, a, b) >= len) {
        gauss_on<8>(a, b, f);
        return;
    }
    const Point2 mid = 0.5 * (a + b);
    adaptive_on(x, a, mid, f, depth + 1);
    adaptive_on(x, mid, b, f, depth + 1);
}

// Finite part over the whole segment of (ik/4) H1(k|t|)/|t|, symmetric about the midpoint.
// Splits off the Laplace term 1/(2pi t^2) (finite part -2/(pi h)); the remainder has a
// log singularity that the substitution t = a u^2 tames for Gauss-Legendre.
Complex hypersingular_self(double length, double k) {
    const double a = 0.5 * length;
    const auto& rule = GaussLegendre<24>::instance();
    Complex remainder(0.0, 0.0);
    for (int q = 0; q < 24; ++q) {
        const double u = rule.nodes[q];
        const double t = a * u * u;
        const auto h = hankel01(k * t);
        const Complex value = 0.25 * kI * k * h.h1 / t - 1.0 / (2.0 * kPi * t * t);
        remainder += rule.weights[q] * value * (2.0 * a * u);
    }
    return -2.0 / (kPi * length) + 2.0 * remainder;
}

}  // namespace

double BoundaryMesh::total_length() const {
    double total = 0.0;
    for (const auto& s : segments) total += s.length;
    return total;
}

bool BoundaryMesh::encloses(const Point2& x) const {
    if (segments.empty()) return false;
    return std::all_of(segments.begin(), segments.end(),
                       [&x](const Segment& s) { return cross(s.end - s.start, x - s.start) >= 0.0; });
}

BoundaryMesh build_mesh(const ConvexPolygon& p, double k_max, int epw, std::string polygon_id) {
    if (!(k_max > 0.0)) throw ContractError("build_mesh: k_max must be positive");
    if (epw < 4) throw ContractError("build_mesh: elements per wavelength must be >= 4");
    const double max_len = (2.0 * kPi / k_max) / epw;
    BoundaryMesh mesh;
    mesh.polygon_id = std::move(polygon_id);
    for (std::size_t e = 0; e < p.size(); ++e) {
        const Point2 a = p[e];
        const Point2 b = p.next(e);
        const Point2 edge = b - a;
        const double edge_len = edge.norm();
        const int pieces = std::max(1, static_cast<int>(std::ceil(edge_len / max_len - 1e-12)));
        const Point2 normal = Point2(edge.y(), -edge.x()) / edge_len;
        for (int s = 0; s < pieces; ++s) {
            Segment seg;
            seg.start = s == 0 ? a : a + (static_cast<double>(s) / pieces) * edge;
            seg.end = s + 1 == pieces ? b : a + (static_cast<double>(s + 1) / pieces) * edge;
            seg.midpoint = 0.5 * (seg.start + seg.end);
            seg.normal = normal;
            seg.length = edge_len / pieces;
            mesh.segments.push_back(seg);
        }
    }
    return mesh;
}

Complex incident_pressure(const Point2& source, double k, const Point2& x) {
    const double r = (x - source).norm();
    if (r == 0.0) throw DomainError("incident_pressure: evaluation point coincides with the source");
    return 0.25 * kI * hankel01(k * r).h0;
}

namespace detail {

KernelIntegrals integrate_segment(const Point2& x, const Point2& nx, const Segment& seg, double k, bool self) {
    if (self) return {Complex(0.0, 0.0), hypersingular_self(seg.length, k)};
    KernelIntegrals acc{};
    auto add = [&](const Point2& y, double w) {
        const auto kv = kernels(x, nx, y, seg.normal, k);
        acc.double_layer += w * kv.k;
        acc.hypersingular += w * kv.t;
    };
    if (point_segment_distance(x, seg.start, seg.end) >= kFarRatio * seg.length) {
        gauss_on<4>(seg.start, seg.end, add);
    } else {
        adaptive_on(x, seg.start, seg.end, add);
    }
    return acc;
}

}  // namespace detail

SurfaceSolution solve_surface(const BoundaryMesh& mesh, const Point2& source, double k) {
    if (!(k > 0.0)) throw ContractError("solve_surface: wavenumber must be positive");
    if (mesh.encloses(source)) throw DomainError("solve_surface: source lies inside or on the scatterer");

    SurfaceSolution sol;
    sol.wavenumber = k;
    sol.source = source;
    const auto n = static_cast<Eigen::Index>(mesh.size());
    if (n == 0) return sol;

    const Complex coupling = kI / k;
    Eigen::MatrixXcd system(n, n);
    Eigen::VectorXcd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& si = mesh.segments[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto ints =
                detail::integrate_segment(si.midpoint, si.normal, mesh.segments[static_cast<std::size_t>(j)], k, i == j);
            system(i, j) = (i == j ? 0.5 : 0.0) - ints.double_layer - coupling * ints.hypersingular;
        }
        const Point2 d = si.midpoint - source;
        const double R = d.norm();
        const auto h = hankel01(k * R);
        const Complex u_inc = 0.25 * kI * h.h0;
        const Complex dudn = -0.25 * kI * k * h.h1 * d.dot(si.normal) / R;
        rhs(i) = u_inc + coupling * dudn;
    }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system);
    sol.rcond = lu.rcond();
    sol.pressure = lu.solve(rhs);
    if (!(sol.rcond > kMinRcond) || !sol.pressure.allFinite()) {
        throw SolverError("solve_surface: boundary system is numerically singular (rcond " +
                              std::to_string(sol.rcond) + ")",
                          sol.rcond > 0.0 ? 1.0 / sol.rcond : INFINITY);
    }
    return sol;
}

Complex exterior_pressure(const SurfaceSolution& sol, const BoundaryMesh& mesh, const Point2& x) {
    if (mesh.encloses(x)) throw DomainError("exterior_pressure: point lies inside or on the scatterer");
    Complex total = incident_pressure(sol.source, sol.wavenumber, x);
    const double k = sol.wavenumber;
    for (std::size_t j = 0; j < mesh.size(); ++j) {
        const auto& seg = mesh.segments[j];
        Complex integral(0.0, 0.0);
        auto add = [&](const Point2& y, double w) { integral += w * double_layer_kernel(x, y, seg.normal, k); };
        if (point_segment_distance(x, seg.start, seg.end) >= kFarRatio * seg.length) {
            gauss_on<2>(seg.start, seg.end, add);
        } else {
            adaptive_on(x, seg.start, seg.end, add);
        }
        total += sol.pressure(static_cast<Eigen::Index>(j)) * integral;
    }
    return total;
}

Eigen::VectorXcd exterior_pressure(const SurfaceSolution& sol, const BoundaryMesh& mesh,
                                   std::span<const Point2> points) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(points.size()));
    for (std::size_t p = 0; p < points.size(); ++p) {
        out(static_cast<Eigen::Index>(p)) = exterior_pressure(sol, mesh, points[p]);
    }
    return out;
}

Eigen::MatrixXcd exterior_pressure_sweep(std::span<const SurfaceSolution> sols, const BoundaryMesh& mesh,
                                         std::span<const Point2> points) {
    const auto n_freq = static_cast<Eigen::Index>(sols.size());
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(points.size()), n_freq);
    if (n_freq == 0) return out;

    Eigen::ArrayXd k(n_freq);
    for (Eigen::Index m = 0; m < n_freq; ++m) {
        const auto& sol = sols[static_cast<std::size_t>(m)];
        k(m) = sol.wavenumber;
        if (sol.source != sols[0].source) throw ContractError("exterior_pressure_sweep: sources differ");
        if (static_cast<std::size_t>(sol.pressure.size()) != mesh.size()) {
            throw ContractError("exterior_pressure_sweep: solution does not match mesh");
        }
    }
    const double dk = n_freq > 1 ? k(1) - k(0) : 0.0;
    bool uniform = true;
    for (Eigen::Index m = 2; m < n_freq; ++m) uniform = uniform && std::abs(k(m) - k(0) - m * dk) <= 1e-12 * k(m);
    const double k_min = k.minCoeff();

    // Far-field quadrature nodes (2-point Gauss per segment) laid out as flat arrays.
    const auto& rule = GaussLegendre<2>::instance();
    const auto n_seg = static_cast<Eigen::Index>(mesh.size());
    const Eigen::Index n_nodes = 2 * n_seg;
    Eigen::ArrayXd node_x(n_nodes), node_y(n_nodes), node_nx(n_nodes), node_ny(n_nodes), node_w(n_nodes);
    for (Eigen::Index j = 0; j < n_seg; ++j) {
        const auto& seg = mesh.segments[static_cast<std::size_t>(j)];
        for (int q = 0; q < 2; ++q) {
            const Point2 y = seg.start + rule.nodes[q] * (seg.end - seg.start);
            node_x(2 * j + q) = y.x();
            node_y(2 * j + q) = y.y();
            node_nx(2 * j + q) = seg.normal.x();
            node_ny(2 * j + q) = seg.normal.y();
            node_w(2 * j + q) = rule.weights[q] * seg.length;
        }
    }
    // Surface pressure of each frequency repeated onto its segment's nodes, with the
    // (ik/4) sqrt(2/(pi k)) prefactor of the large-argument Hankel form folded in.
    std::vector<Eigen::ArrayXcd> node_density(static_cast<std::size_t>(n_freq), Eigen::ArrayXcd(n_nodes));
    for (Eigen::Index m = 0; m < n_freq; ++m) {
        const Complex prefactor = 0.25 * kI * k(m) * std::sqrt(2.0 / (kPi * k(m)));
        const auto& u = sols[static_cast<std::size_t>(m)].pressure;
        for (Eigen::Index node = 0; node < n_nodes; ++node) node_density[static_cast<std::size_t>(m)](node) = prefactor * u(node / 2);
    }

    Eigen::ArrayXd dx(n_nodes), dy(n_nodes), R(n_nodes), weight(n_nodes), inv_r(n_nodes), env_re, env_im;
    Eigen::ArrayXcd phase(n_nodes), step(n_nodes), envelope(n_nodes);
    std::vector<unsigned char> near_segment(static_cast<std::size_t>(n_seg));
    std::vector<Complex> acc(static_cast<std::size_t>(n_freq));

    for (std::size_t p = 0; p < points.size(); ++p) {
        const Point2& x = points[p];
        if (mesh.encloses(x)) throw DomainError("exterior_pressure_sweep: point lies inside or on the scatterer");
        const auto row = static_cast<Eigen::Index>(p);
        for (Eigen::Index m = 0; m < n_freq; ++m) out(row, m) = incident_pressure(sols[0].source, k(m), x);
        if (n_seg == 0) continue;

        dx = x.x() - node_x;
        dy = x.y() - node_y;
        R = (dx.square() + dy.square()).sqrt();
        inv_r = R.inverse();
        // w (r . n_y)/R / sqrt(R): everything except the frequency-dependent part
        weight = node_w * (dx * node_nx + dy * node_ny) * inv_r * inv_r.sqrt();

        for (Eigen::Index j = 0; j < n_seg; ++j) {
            const auto& seg = mesh.segments[static_cast<std::size_t>(j)];
            const bool near = point_segment_distance(x, seg.start, seg.end) < kFarRatio * seg.length;
            near_segment[static_cast<std::size_t>(j)] = near;
            if (near) weight.segment(2 * j, 2).setZero();
        }
        // Nodes whose smallest argument falls below the envelope range take the exact path.
        const bool all_fast = uniform && k_min * R.minCoeff() >= kEnvelopeLimit;
        Eigen::ArrayXd slow_weight;
        if (!all_fast) {
            const auto slow = (R * k_min < kEnvelopeLimit).cast<double>();
            slow_weight = weight * slow;
            weight *= (1.0 - slow);
            if (!uniform) {
                slow_weight += weight;
                weight.setZero();
            }
        }

        if ((weight != 0.0).any()) {
            for (Eigen::Index node = 0; node < n_nodes; ++node) {
                phase(node) = std::polar(1.0, k(0) * R(node) - 0.75 * kPi);
                step(node) = std::polar(1.0, dk * R(node));
            }
            for (Eigen::Index m = 0; m < n_freq; ++m) {
                hankel1_envelope_inv(inv_r / k(m), env_re, env_im);
                envelope.real() = env_re;
                envelope.imag() = env_im;
                out(row, m) += (node_density[static_cast<std::size_t>(m)] * weight * phase * envelope).sum();
                phase *= step;
            }
        }
        if (!all_fast) {
            for (Eigen::Index node = 0; node < n_nodes; ++node) {
                if (slow_weight(node) == 0.0) continue;
                // undo the 1/sqrt(R) and sqrt(2/(pi k)) scaling used by the envelope path
                const double w = slow_weight(node) * std::sqrt(R(node));
                for (Eigen::Index m = 0; m < n_freq; ++m) {
                    const Complex h1 = hankel01(k(m) * R(node)).h1;
                    out(row, m) += sols[static_cast<std::size_t>(m)].pressure(node / 2) * 0.25 * kI * k(m) * h1 * w;
                }
            }
        }
        for (Eigen::Index j = 0; j < n_seg; ++j) {
            if (!near_segment[static_cast<std::size_t>(j)]) continue;
            const auto& seg = mesh.segments[static_cast<std::size_t>(j)];
            for (Eigen::Index m = 0; m < n_freq; ++m) {
                Complex integral(0.0, 0.0);
                auto add = [&](const Point2& y, double w) { integral += w * double_layer_kernel(x, y, seg.normal, k(m)); };
                adaptive_on(x, seg.start, seg.end, add);
                out(row, m) += sols[static_cast<std::size_t>(m)].pressure(j) * integral;
            }
        }
    }
    return out;
}

}  // namespace sonoshape

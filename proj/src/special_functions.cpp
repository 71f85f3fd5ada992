#include "sonoshape/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "sonoshape/errors.hpp"

namespace sonoshape {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kInvPi = std::numbers::inv_pi;
constexpr double kSeriesLimit = 14.0;

// J0, J1, Y0, Y1 from the ascending series; fine below kSeriesLimit where the
// largest term stays under ~1e5.
Hankel01 series(double z) {
    const double q = 0.25 * z * z;  // (z/2)^2
    const double half = 0.5 * z;

    // term_k = (-q)^k / (k!)^2 for J0, (z/2)(-q)^k / (k!(k+1)!) for J1
    double t0 = 1.0;
    double t1 = half;
    double j0 = t0, j1 = t1;
    double harmonic = 0.0;           // H_k
    double y0_sum = 0.0;             // sum_k H_k (-q)^k/(k!)^2, k >= 1
    double y1_sum = t1 * (-2.0 * kEulerGamma + 1.0);  // k = 0: psi(1)+psi(2) = -2g + 1
    for (int k = 1; k < 200; ++k) {
        t0 *= -q / (static_cast<double>(k) * k);
        t1 *= -q / (static_cast<double>(k) * (k + 1));
        harmonic += 1.0 / k;
        j0 += t0;
        j1 += t1;
        y0_sum += harmonic * t0;
        y1_sum += (-2.0 * kEulerGamma + harmonic + harmonic + 1.0 / (k + 1)) * t1;
        if (std::abs(t0) + std::abs(t1) < 1e-18) break;
    }
    const double log_half = std::log(half);
    const double y0 = 2.0 * kInvPi * ((log_half + kEulerGamma) * j0 - y0_sum);
    const double y1 = -2.0 * kInvPi / z + 2.0 * kInvPi * log_half * j1 - kInvPi * y1_sum;
    return {{j0, y0}, {j1, y1}};
}

// H_nu(z) ~ sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} sum_m i^m a_m(nu) / z^m
Hankel01 asymptotic(double z) {
    const std::complex<double> i_over_z(0.0, 1.0 / z);
    std::complex<double> s0(1.0, 0.0), s1(1.0, 0.0);
    std::complex<double> t0(1.0, 0.0), t1(1.0, 0.0);
    double prev0 = 1.0, prev1 = 1.0;
    for (int m = 1; m < 60; ++m) {
        const double odd = 2.0 * m - 1.0;
        const double f0 = (0.0 - odd * odd) / (8.0 * m);
        const double f1 = (4.0 - odd * odd) / (8.0 * m);
        const auto n0 = t0 * f0 * i_over_z;
        const auto n1 = t1 * f1 * i_over_z;
        // Stop before the divergent tail sets in.
        if (std::abs(n0) > prev0 || std::abs(n1) > prev1) break;
        t0 = n0;
        t1 = n1;
        prev0 = std::abs(t0);
        prev1 = std::abs(t1);
        s0 += t0;
        s1 += t1;
        if (prev0 < 1e-17 && prev1 < 1e-17) break;
    }
    const double amp = std::sqrt(2.0 * kInvPi / z);
    const double phase0 = z - 0.25 * std::numbers::pi;
    const std::complex<double> e0 = std::polar(amp, phase0);
    const std::complex<double> e1 = e0 * std::complex<double>(0.0, -1.0);  // extra e^{-i pi/2}
    return {e0 * s0, e1 * s1};
}

using detail::EnvelopeCoefficients;
using detail::kEnvelopeTerms;

constexpr EnvelopeCoefficients kEnvelope0{0.0};

std::complex<double> envelope(const EnvelopeCoefficients& c, double z) {
    const double w = 1.0 / z;
    const double w2 = w * w;
    double re = 0.0, im = 0.0;
    for (int m = kEnvelopeTerms / 2; m >= 0; --m) {
        re = re * w2 + c.even[m];
        im = im * w2 + c.odd[m];
    }
    return {re, im * w};
}

// sqrt(z) e^{-iz} H_nu(z) is smooth and slowly varying above z ~ 1, so between
// kTableStart and kEnvelopeLimit it is tabulated once and Hermite-interpolated.
constexpr double kTableStart = 3.0;
constexpr double kTableStep = 0.02;

struct EnvelopeTable {
    std::vector<std::complex<double>> e0, d0, e1, d1;

    EnvelopeTable() {
        const int n = static_cast<int>(std::lround((kEnvelopeLimit - kTableStart) / kTableStep)) + 2;
        e0.resize(n), d0.resize(n), e1.resize(n), d1.resize(n);
        const std::complex<double> i(0.0, 1.0);
        for (int k = 0; k < n; ++k) {
            const double z = kTableStart + k * kTableStep;
            const Hankel01 h = z < kSeriesLimit ? series(z) : asymptotic(z);
            const std::complex<double> scale = std::sqrt(z) * std::polar(1.0, -z);
            e0[k] = scale * h.h0;
            e1[k] = scale * h.h1;
            // H0' = -H1, H1' = H0 - H1/z; product rule on sqrt(z) e^{-iz}
            d0[k] = (0.5 / z - i) * e0[k] - scale * h.h1;
            d1[k] = (0.5 / z - i) * e1[k] + scale * (h.h0 - h.h1 / z);
        }
    }

    Hankel01 operator()(double z) const {
        const double u = (z - kTableStart) / kTableStep;
        const auto k = static_cast<std::size_t>(u);
        const double t = u - static_cast<double>(k);
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = (t3 - 2 * t2 + t) * kTableStep;
        const double h01 = -2 * t3 + 3 * t2, h11 = (t3 - t2) * kTableStep;
        const auto env0 = h00 * e0[k] + h10 * d0[k] + h01 * e0[k + 1] + h11 * d0[k + 1];
        const auto env1 = h00 * e1[k] + h10 * d1[k] + h01 * e1[k + 1] + h11 * d1[k + 1];
        const auto carrier = std::polar(1.0 / std::sqrt(z), z);
        return {env0 * carrier, env1 * carrier};
    }
};

}  // namespace

std::complex<double> hankel1_envelope(double z) { return envelope(detail::kEnvelope1, z); }

Hankel01 hankel01(double z) {
    if (!(z > 0.0)) throw DomainError("Hankel functions need a positive argument");
    if (z < kTableStart) return series(z);  // short series here, ~20 terms
    if (z < kEnvelopeLimit) {
        static const EnvelopeTable table;
        return table(z);
    }
    const auto e0 = std::polar(std::sqrt(2.0 * kInvPi / z), z - 0.25 * std::numbers::pi);
    return {e0 * envelope(kEnvelope0, z), e0 * std::complex<double>(0.0, -1.0) * envelope(detail::kEnvelope1, z)};
}

}  // namespace sonoshape

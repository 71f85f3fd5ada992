#include <doctest.h>

#include <cmath>
#include <complex>

#include "sonoshape/errors.hpp"
#include "sonoshape/quadrature.hpp"
#include "sonoshape/special_functions.hpp"

using namespace sonoshape;
using C = std::complex<double>;

namespace {

// Values from an independent reference implementation, frozen here.
struct HankelFixture {
    double z;
    C h0, h1;
};
const HankelFixture kReference[] = {
    {0.5, {0.9384698072408126, -0.44451873350670656}, {0.24226845767487393, -1.4714723926702433}},
    {2.9, {-0.22431154579196813, 0.40791176923625017}, {0.375427481813096, 0.29594005460767475}},
    {3.0, {-0.2600519549019336, 0.37685001001279056}, {0.33905895852593654, 0.32467442479180014}},
    {7.31, {0.2873774179634587, 0.06561469795837703}, {0.08533350041180629, -0.2835635342227553}},
    {14.0, {0.17107347611045867, 0.12719256858218367}, {0.13337515469879324, -0.16664484185617232}},
    {19.99, {0.16768479902327926, 0.0609819618148383}, {0.06519257814216611, -0.16621268550210408}},
    {20.0, {0.1670246643405832, 0.06264059680938386}, {0.06683312417585009, -0.16551161436252135}},
    {55.5, {-0.028104074301152394, -0.10334564480672326}, {-0.10360300589593362, 0.02717424785929639}},
};

C std_hankel(int n, double z) { return {std::cyl_bessel_j(double(n), z), std::cyl_neumann(double(n), z)}; }

}  // namespace

TEST_CASE("hankel01 matches frozen reference values") {
    for (const auto& f : kReference) {
        CAPTURE(f.z);
        const auto h = hankel01(f.z);
        CHECK(std::abs(h.h0 - f.h0) < 1e-11);
        CHECK(std::abs(h.h1 - f.h1) < 1e-11);
    }
}

TEST_CASE("hankel01 agrees with the standard library across every evaluation regime") {
    double worst = 0.0;
    for (double z = 1e-3; z < 200.0; z *= 1.0021) {
        const auto h = hankel01(z);
        // relative near the log/pole singularity, absolute elsewhere
        const double scale0 = std::max(1.0, std::abs(std_hankel(0, z)));
        const double scale1 = std::max(1.0, std::abs(std_hankel(1, z)));
        worst = std::max({worst, std::abs(h.h0 - std_hankel(0, z)) / scale0, std::abs(h.h1 - std_hankel(1, z)) / scale1});
    }
    CHECK(worst < 2e-11);
}

TEST_CASE("hankel01 is continuous across regime boundaries") {
    for (double edge : {3.0, 14.0, kEnvelopeLimit}) {
        CAPTURE(edge);
        const auto below = hankel01(std::nextafter(edge, 0.0));
        const auto above = hankel01(edge);
        CHECK(std::abs(below.h0 - above.h0) < 2e-11);
        CHECK(std::abs(below.h1 - above.h1) < 2e-11);
    }
}

TEST_CASE("hankel01 satisfies the Wronskian J1 Y0 - J0 Y1 = 2 / (pi z)") {
    for (double z : {0.01, 0.7, 2.5, 4.2, 11.0, 19.5, 33.0, 120.0}) {
        const auto h = hankel01(z);
        const double w = h.h1.real() * h.h0.imag() - h.h0.real() * h.h1.imag();
        CHECK(w == doctest::Approx(2.0 / (std::numbers::pi * z)).epsilon(1e-10));
    }
}

TEST_CASE("hankel01 rejects non-positive arguments") {
    CHECK_THROWS_AS(hankel01(0.0), DomainError);
    CHECK_THROWS_AS(hankel01(-1.0), DomainError);
    CHECK_THROWS_AS(hankel01(std::nan("")), DomainError);
}

TEST_CASE("hankel1 envelope reconstructs H1 beyond the envelope limit") {
    for (double z = kEnvelopeLimit; z < 500.0; z *= 1.37) {
        const C phase = std::exp(C(0.0, z - 0.75 * std::numbers::pi));
        const C h1 = std::sqrt(2.0 / (std::numbers::pi * z)) * phase * hankel1_envelope(z);
        CHECK(std::abs(h1 - std_hankel(1, z)) < 1e-12);
    }
}

TEST_CASE("vectorized envelope equals the scalar envelope") {
    Eigen::ArrayXd z = Eigen::ArrayXd::LinSpaced(50, kEnvelopeLimit, 400.0);
    Eigen::ArrayXd re, im;
    hankel1_envelope_inv(z.inverse(), re, im);
    for (Eigen::Index n = 0; n < z.size(); ++n) {
        const C e = hankel1_envelope(z[n]);
        CHECK(re[n] == doctest::Approx(e.real()).epsilon(1e-15));
        CHECK(im[n] == doctest::Approx(e.imag()).epsilon(1e-13));
    }
}

TEST_CASE("Gauss-Legendre rules integrate polynomials of degree 2N-1 exactly on [0, 1]") {
    auto check = [](const auto& rule, int n) {
        CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-15));
        for (int p = 0; p <= 2 * n - 1; ++p) {
            const double got = (rule.weights * rule.nodes.pow(p)).sum();
            CHECK(got == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
        }
        CHECK((rule.nodes > 0.0).all());
        CHECK((rule.nodes < 1.0).all());
    };
    check(GaussLegendre<1>::instance(), 1);
    check(GaussLegendre<2>::instance(), 2);
    check(GaussLegendre<4>::instance(), 4);
    check(GaussLegendre<8>::instance(), 8);
    check(GaussLegendre<24>::instance(), 24);
}

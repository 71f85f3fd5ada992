#pragma once

#include <complex>

#include <Eigen/Core>

namespace sonoshape {

/// Outgoing Hankel functions of the first kind, orders 0 and 1, real argument.
struct Hankel01 {
    std::complex<double> h0;
    std::complex<double> h1;
};

/// H0^(1)(z) and H1^(1)(z) for z > 0.
///
/// Ascending series below 3; between 3 and kEnvelopeLimit a Hermite table of
/// sqrt(z) e^{-iz} H(z) built from the series/asymptotic pair; Hankel's
/// asymptotic expansion above. Absolute error below ~2e-11 across the range.
Hankel01 hankel01(double z);

inline std::complex<double> hankel0(double z) { return hankel01(z).h0; }
inline std::complex<double> hankel1(double z) { return hankel01(z).h1; }

/// Slowly varying factor of the large-argument form
///   H1^(1)(z) = sqrt(2/(pi z)) e^{i(z - 3pi/4)} hankel1_envelope(z),
/// truncated at 16 terms; relative error below 1e-14 for z >= kEnvelopeLimit.
/// Lets callers advance the oscillating phase by recurrence across frequencies.
std::complex<double> hankel1_envelope(double z);

inline constexpr double kEnvelopeLimit = 20.0;

namespace detail {

inline constexpr int kEnvelopeTerms = 16;

// Hankel's expansion sum_m i^m a_m(nu) w^m split into real and imaginary parts:
// real part: sum over even m of a_m (-1)^{m/2} w^m, stored by m/2
// imag part: sum over odd m of a_m (-1)^{(m-1)/2} w^m, stored by (m-1)/2
struct EnvelopeCoefficients {
    double even[kEnvelopeTerms / 2 + 1]{};
    double odd[kEnvelopeTerms / 2 + 1]{};

    constexpr explicit EnvelopeCoefficients(double four_nu_sq) {
        double a = 1.0;
        even[0] = 1.0;
        for (int m = 1; m <= kEnvelopeTerms; ++m) {
            const double odd_sq = (2.0 * m - 1.0) * (2.0 * m - 1.0);
            a *= (four_nu_sq - odd_sq) / (8.0 * m);
            if (m % 2 == 0) {
                even[m / 2] = (m / 2) % 2 == 0 ? a : -a;
            } else {
                odd[(m - 1) / 2] = ((m - 1) / 2) % 2 == 0 ? a : -a;
            }
        }
    }
};

inline constexpr EnvelopeCoefficients kEnvelope1{4.0};

}  // namespace detail

/// Coefficient-wise hankel1_envelope over reciprocal arguments w = 1/z, all z >= kEnvelopeLimit.
template <typename Derived>
void hankel1_envelope_inv(const Eigen::ArrayBase<Derived>& w, Eigen::ArrayXd& re, Eigen::ArrayXd& im) {
    using detail::kEnvelope1;
    constexpr int top = detail::kEnvelopeTerms / 2;
    const Eigen::ArrayXd w2 = w.square();
    re.setConstant(w.size(), kEnvelope1.even[top]);
    im.setConstant(w.size(), kEnvelope1.odd[top]);
    for (int m = top - 1; m >= 0; --m) {
        re = re * w2 + kEnvelope1.even[m];
        im = im * w2 + kEnvelope1.odd[m];
    }
    im *= w;
}

}  // namespace sonoshape

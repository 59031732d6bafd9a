#pragma once

// Gamma-family special functions and the fractional power rule used by the
// modified Riemann-Liouville (Jumarie) operators.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace fracvar {

namespace detail {

// Lanczos rational approximation, g = 6.024680040776729583740234375, n = 13.
// Coefficient set is the standard double-precision optimal one; relative
// error below 1e-15 for positive arguments.
inline constexpr double kLanczosG = 6.024680040776729583740234375;

inline constexpr double kLanczosNum[13] = {
    2.506628274631000270164908177133837338626e0,
    2.108242777515793458725097339207133627117e2,
    8.071672002365816210638002902272250613822e3,
    1.860562653952234950402949897160456992822e5,
    2.876370628935372441225409051620849613599e6,
    3.142641558540019438061423162831820536287e7,
    2.488745578620541565114603864132294232163e8,
    1.439720407311721673663223072794912393972e9,
    6.039542586352028005064291644307297921070e9,
    1.792103442603720969991975575445893111267e10,
    3.571195923735566804944018545154716670596e10,
    4.291980364264909876895789904700198885093e10,
    2.353137688041075968857200767445163675473e10,
};

inline constexpr double kLanczosDen[13] = {
    1.0, 66.0, 1925.0, 32670.0, 357423.0, 2637558.0, 13339535.0,
    45995730.0, 105258076.0, 150917976.0, 120543840.0, 39916800.0, 0.0,
};

inline double lanczos_sum(double x) {
    // Both polynomials evaluated by Horner in x; coefficients are ordered
    // from the highest degree down.
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < 13; ++i) {
        num = num * x + kLanczosNum[i];
        den = den * x + kLanczosDen[i];
    }
    return num / den;
}

} // namespace detail

/// Gamma function for positive arguments. Relative error <= 1e-13 on
/// [0.1, 30] (in practice a few ulp). Non-positive arguments are rejected;
/// the reflection formula is deliberately not provided.
inline double gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("gamma: argument must be positive, got " +
                                std::to_string(x));
    if (x == 1.0 || x == 2.0)
        return 1.0;
    double shift = 1.0;
    while (x < 0.5) { // keep the Lanczos series in its well-conditioned range
        shift /= x;
        x += 1.0;
    }
    const double zgh = x + detail::kLanczosG - 0.5;
    const double sum = detail::lanczos_sum(x);
    if (x - 0.5 < 40.0)
        return shift * sum * std::pow(zgh, x - 0.5) * std::exp(-zgh);
    // large arguments: work in log space to dodge pow overflow
    return shift * sum * std::exp((x - 0.5) * std::log(zgh) - zgh);
}

inline double log_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: argument must be positive");
    if (x == 1.0 || x == 2.0)
        return 0.0;
    double shift = 0.0;
    while (x < 0.5) {
        shift -= std::log(x);
        x += 1.0;
    }
    const double zgh = x + detail::kLanczosG - 0.5;
    return shift + std::log(detail::lanczos_sum(x)) + (x - 0.5) * std::log(zgh) - zgh;
}

/// Digamma (logarithmic derivative of gamma) for positive arguments.
/// Recurrence up to x >= 10, then the Bernoulli asymptotic series.
inline double digamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("digamma: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // psi(x) ~ ln x - 1/(2x) - sum B_{2k}/(2k x^{2k})
    double series = inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                    inv2 * (1.0 / 252.0 -
                    inv2 * (1.0 / 240.0 -
                    inv2 * (1.0 / 132.0)))));
    return acc + std::log(x) - 0.5 * inv - series;
}

/// alpha! := Gamma(1 + alpha), defined for orders in (0, 1].
inline double alpha_factorial(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::domain_error("alpha_factorial: order must lie in (0, 1], got " +
                                std::to_string(alpha));
    return gamma(1.0 + alpha);
}

/// Jumarie derivative of the shifted power (t-a)^g, order alpha in (0, 1]:
/// returns {coefficient, exponent} with coefficient Gamma(g+1)/Gamma(g+1-alpha)
/// and exponent g-alpha. Constants (g = 0) differentiate to zero.
inline std::pair<double, double> frac_derivative_power(double g, double alpha) {
    if (g < 0.0)
        throw std::domain_error("frac_derivative_power: exponent must be >= 0");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::domain_error("frac_derivative_power: order must lie in (0, 1]");
    if (g == 0.0)
        return {0.0, 0.0};
    if (alpha == 1.0)
        return {g, g - 1.0}; // classical rule, kept exact
    return {gamma(g + 1.0) / gamma(g + 1.0 - alpha), g - alpha};
}

} // namespace fracvar

#pragma once

// The two Jumarie operators in numerical form: the (dt)^alpha integral via a
// singularity-removing substitution plus composite Gauss-Legendre, and the
// sampled fractional derivative via product integration of the defining
// kernel integral. Also the integration-by-parts diagnostic.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fracvar/special_functions.hpp"
#include "fracvar/trajectory.hpp"

namespace fracvar {

/// Parameters of the (dt)^alpha quadrature: substitution s = (b-tau)^alpha,
/// then composite Gauss-Legendre with `panels` uniform panels whose outermost
/// panels are geometrically subdivided (ratio 0.5, `grade_levels` levels)
/// toward both endpoints. Grading keeps algebraic endpoint singularities of
/// the mapped integrand from polluting the panel rule.
struct QuadratureConfig {
    int nodes = 32;
    int panels = 8;
    int grade_levels = 12;

    void validate() const {
        if (nodes < 2)
            throw std::invalid_argument("QuadratureConfig: need at least 2 nodes");
        if (panels < 1)
            throw std::invalid_argument("QuadratureConfig: need at least 1 panel");
        if (grade_levels < 0)
            throw std::invalid_argument("QuadratureConfig: negative grading depth");
    }
};

namespace detail {

// Gauss-Legendre nodes/weights on (-1, 1) by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& nodes,
                           std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

// Panel decomposition of [0, S]: `panels` uniform panels, outermost ones
// geometrically refined toward 0 and toward S.
inline std::vector<std::pair<double, double>> graded_panels(double S, int panels,
                                                            int levels) {
    std::vector<std::pair<double, double>> out;
    auto grade_left = [&](double lo, double hi) { // refine toward lo
        const double w = hi - lo;
        double edge = w;
        std::vector<std::pair<double, double>> rev;
        for (int k = 0; k < levels; ++k) {
            rev.emplace_back(lo + edge * 0.5, lo + edge);
            edge *= 0.5;
        }
        rev.emplace_back(lo, lo + edge);
        for (auto it = rev.rbegin(); it != rev.rend(); ++it)
            out.push_back(*it);
    };
    auto grade_right = [&](double lo, double hi) { // refine toward hi
        const double w = hi - lo;
        double edge = w;
        for (int k = 0; k < levels; ++k) {
            out.emplace_back(hi - edge, hi - edge * 0.5);
            edge *= 0.5;
        }
        out.emplace_back(hi - edge, hi);
    };
    if (levels == 0) {
        for (int i = 0; i < panels; ++i)
            out.emplace_back(S * i / panels, S * (i + 1) / panels);
        return out;
    }
    if (panels == 1) {
        grade_left(0.0, 0.5 * S);
        grade_right(0.5 * S, S);
        return out;
    }
    const double w = S / panels;
    grade_left(0.0, w);
    for (int i = 1; i < panels - 1; ++i)
        out.emplace_back(w * i, w * (i + 1));
    grade_right(S - w, S);
    return out;
}

} // namespace detail

/// Integral of f with respect to (dt)^alpha over [a, b]:
///   alpha * integral_a^b (b-tau)^(alpha-1) f(tau) dtau.
/// After s = (b-tau)^alpha this is integral_0^{(b-a)^alpha} f(b - s^{1/alpha}) ds,
/// handled by the graded composite Gauss-Legendre rule above. f is never
/// evaluated at tau = a or tau = b themselves (nodes are interior), so
/// integrable endpoint singularities are tolerated.
template <class F>
double frac_integral(F&& f, double a, double b, double alpha,
                     const QuadratureConfig& q = {}) {
    if (!(b > a))
        throw std::invalid_argument("frac_integral: need b > a");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::domain_error("frac_integral: order must lie in (0, 1]");
    q.validate();

    const double S = std::pow(b - a, alpha);
    const double inv_alpha = 1.0 / alpha;
    std::vector<double> nodes, weights;
    detail::gauss_legendre(q.nodes, nodes, weights);

    double total = 0.0;
    for (const auto& [lo, hi] : detail::graded_panels(S, q.panels, q.grade_levels)) {
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        double acc = 0.0;
        for (int i = 0; i < q.nodes; ++i) {
            const double s = mid + half * nodes[i];
            const double tau = alpha == 1.0 ? b - s : b - std::pow(s, inv_alpha);
            acc += weights[i] * f(tau);
        }
        total += acc * half;
    }
    return total;
}

inline double frac_integral(const FracPowerSeries& x, double a, double b, double alpha,
                            const QuadratureConfig& q = {}) {
    return frac_integral([&x](double t) { return x(t); }, a, b, alpha, q);
}

/// Values of a function on the uniform grid a, a+h, ..., a+h*(count-1).
struct SampledFunction {
    double base = 0.0;
    double step = 0.0;
    std::vector<double> values;

    void validate() const {
        if (values.size() < 3)
            throw std::invalid_argument("SampledFunction: need at least 3 samples");
        if (!(step > 0.0))
            throw std::invalid_argument("SampledFunction: step must be positive");
    }

    double end() const { return base + step * (values.size() - 1); }

    /// Piecewise-linear interpolation on [base, end].
    double operator()(double t) const {
        const double u = (t - base) / step;
        if (u <= 0.0) return values.front();
        const std::size_t last = values.size() - 1;
        if (u >= static_cast<double>(last)) return values.back();
        const std::size_t j = static_cast<std::size_t>(u);
        const double frac = u - static_cast<double>(j);
        return values[j] * (1.0 - frac) + values[j + 1] * frac;
    }
};

template <class F>
SampledFunction sample_function(F&& f, double a, double b, std::size_t count) {
    if (count < 3)
        throw std::invalid_argument("sample_function: need at least 3 samples");
    SampledFunction s;
    s.base = a;
    s.step = (b - a) / static_cast<double>(count - 1);
    s.values.resize(count);
    for (std::size_t j = 0; j < count; ++j)
        s.values[j] = f(a + s.step * static_cast<double>(j));
    return s;
}

/// Classical first derivative on the grid: central differences inside,
/// second-order one-sided stencils at the ends.
inline SampledFunction classical_derivative(const SampledFunction& f) {
    f.validate();
    const std::size_t n = f.values.size();
    const double h = f.step;
    SampledFunction g{f.base, h, std::vector<double>(n)};
    for (std::size_t j = 1; j + 1 < n; ++j)
        g.values[j] = (f.values[j + 1] - f.values[j - 1]) / (2.0 * h);
    g.values[0] = (-3.0 * f.values[0] + 4.0 * f.values[1] - f.values[2]) / (2.0 * h);
    g.values[n - 1] =
        (3.0 * f.values[n - 1] - 4.0 * f.values[n - 2] + f.values[n - 3]) / (2.0 * h);
    return g;
}

/// Jumarie derivative of sampled data, order alpha strictly inside (0, 1)
/// (alpha = 1 is classical_derivative). The kernel integral
///   I(t) = integral_a^t (t-tau)^(-alpha) (f(tau) - f(a)) dtau
/// is evaluated at the grid points by product integration against the
/// piecewise-linear interpolant (exact kernel moments, the L1 treatment),
/// then g = I'/Gamma(1-alpha) with second-order differencing of the I grid;
/// g(a) comes from one-sided extrapolation.
inline SampledFunction frac_derivative(const SampledFunction& f, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("frac_derivative(sampled): order must lie in (0, 1)");
    f.validate();
    const std::size_t n = f.values.size();
    const std::size_t N = n - 1; // panel count
    const double h = f.step;
    const double f0 = f.values.front();

    // p1[m] = m^(1-alpha), p2[m] = m^(2-alpha); exact panel moments follow.
    std::vector<double> d1(N + 1, 0.0), d2(N + 1, 0.0);
    {
        std::vector<double> p1(N + 1), p2(N + 1);
        for (std::size_t m = 0; m <= N; ++m) {
            const double dm = static_cast<double>(m);
            p1[m] = std::pow(dm, 1.0 - alpha);
            p2[m] = std::pow(dm, 2.0 - alpha);
        }
        for (std::size_t m = 1; m <= N; ++m) {
            d1[m] = (p1[m] - p1[m - 1]) / (1.0 - alpha);
            d2[m] = (p2[m] - p2[m - 1]) / (2.0 - alpha);
        }
    }

    const double scale = std::pow(h, 1.0 - alpha);
    std::vector<double> I(n, 0.0);
    for (std::size_t j = 1; j <= N; ++j) {
        double acc = 0.0;
        for (std::size_t m = 1; m <= j; ++m) {
            const std::size_t k = j - m; // panel [t_k, t_{k+1}]
            const double phi = f.values[k] - f0;
            const double slope = (f.values[k + 1] - f.values[k]) / h;
            acc += phi * d1[m] + slope * h * (static_cast<double>(m) * d1[m] - d2[m]);
        }
        I[j] = scale * acc;
    }

    const double inv_gamma = 1.0 / gamma(1.0 - alpha);
    SampledFunction g{f.base, h, std::vector<double>(n)};
    for (std::size_t j = 1; j + 1 < n; ++j)
        g.values[j] = inv_gamma * (I[j + 1] - I[j - 1]) / (2.0 * h);
    g.values[n - 1] =
        inv_gamma * (3.0 * I[n - 1] - 4.0 * I[n - 2] + I[n - 3]) / (2.0 * h);
    g.values[0] = 2.0 * g.values[1] - g.values[2];
    return g;
}

/// Defect of the integration-by-parts formula
///   int u^(a) v (dt)^a + int u v^(a) (dt)^a - a! [uv]_a^b.
/// Diagnostic only: the formula is exact in special cases but carries a
/// genuine nonzero defect on general smooth factors, and this operator
/// reports whatever the quadrature sees.
inline double check_integration_by_parts(const FracPowerSeries& u,
                                         const FracPowerSeries& v, double alpha,
                                         double a, double b,
                                         const QuadratureConfig& q = {}) {
    const FracPowerSeries du = frac_derivative(u, alpha);
    const FracPowerSeries dv = frac_derivative(v, alpha);
    const double lhs =
        frac_integral([&](double t) { return du(t) * v(t); }, a, b, alpha, q);
    const double rhs =
        frac_integral([&](double t) { return u(t) * dv(t); }, a, b, alpha, q);
    const double boundary = alpha_factorial(alpha) * (u(b) * v(b) - u(a) * v(a));
    return lhs + rhs - boundary;
}

} // namespace fracvar

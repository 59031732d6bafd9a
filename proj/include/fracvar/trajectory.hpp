#pragma once

// Candidate trajectories represented as finite sums of shifted fractional
// powers sum_k c_k (t-a)^{e_k}. The class is closed under the Jumarie
// derivative (power rule applied termwise), which is what makes exact
// residual evaluation possible downstream.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracvar/special_functions.hpp"

namespace fracvar {

struct SeriesTerm {
    double coefficient = 0.0;
    double exponent = 0.0;
};

namespace detail {
// Exponents closer than this are considered the same term; derivative chains
// routinely create near-duplicate exponents.
inline constexpr double kExponentMergeTol = 1e-12;
} // namespace detail

class FracPowerSeries {
public:
    FracPowerSeries() = default;

    FracPowerSeries(double base, std::vector<SeriesTerm> terms) : base_(base) {
        for (const auto& t : terms)
            if (!std::isfinite(t.coefficient) || !std::isfinite(t.exponent))
                throw std::invalid_argument("FracPowerSeries: non-finite term");
        std::sort(terms.begin(), terms.end(),
                  [](const SeriesTerm& l, const SeriesTerm& r) {
                      return l.exponent < r.exponent;
                  });
        for (const auto& t : terms) {
            if (!terms_.empty() &&
                t.exponent - terms_.back().exponent <= detail::kExponentMergeTol)
                terms_.back().coefficient += t.coefficient;
            else
                terms_.push_back(t);
        }
        std::erase_if(terms_, [](const SeriesTerm& t) { return t.coefficient == 0.0; });
    }

    static FracPowerSeries zero(double base = 0.0) { return FracPowerSeries(base, {}); }

    double base() const { return base_; }
    std::span<const SeriesTerm> terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    bool has_singular_terms() const {
        return !terms_.empty() && terms_.front().exponent < 0.0;
    }

    /// Value at t >= base; the constant term uses the 0^0 := 1 convention.
    double operator()(double t) const {
        if (t < base_)
            throw std::domain_error("FracPowerSeries: evaluation left of base point");
        const double dt = t - base_;
        double acc = 0.0;
        for (const auto& term : terms_)
            acc += term.exponent == 0.0 ? term.coefficient
                                        : term.coefficient * std::pow(dt, term.exponent);
        return acc;
    }

private:
    double base_ = 0.0;
    std::vector<SeriesTerm> terms_; // sorted by exponent, exponents distinct
};

inline double eval_trajectory(const FracPowerSeries& x, double t) { return x(t); }

/// Termwise Jumarie derivative of order alpha in (0, 1]. Constant terms
/// vanish. Exponents in (0, alpha) produce negative result exponents; the
/// result is still returned and flags itself via has_singular_terms().
inline FracPowerSeries frac_derivative(const FracPowerSeries& x, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::domain_error("frac_derivative: order must lie in (0, 1]");
    std::vector<SeriesTerm> out;
    out.reserve(x.terms().size());
    for (const auto& term : x.terms()) {
        if (term.exponent < 0.0)
            throw std::domain_error(
                "frac_derivative: series already has a singular term");
        auto [coef, expo] = frac_derivative_power(term.exponent, alpha);
        if (term.exponent == 0.0)
            continue; // derivative of a constant is zero
        out.push_back({term.coefficient * coef, expo});
    }
    return FracPowerSeries(x.base(), std::move(out));
}

// --- series arithmetic (closed operations used by structural detection) ---

inline FracPowerSeries scale(const FracPowerSeries& x, double c) {
    std::vector<SeriesTerm> out(x.terms().begin(), x.terms().end());
    for (auto& t : out) t.coefficient *= c;
    return FracPowerSeries(x.base(), std::move(out));
}

inline FracPowerSeries add(const FracPowerSeries& x, const FracPowerSeries& y) {
    if (x.base() != y.base())
        throw std::invalid_argument("series add: base points differ");
    std::vector<SeriesTerm> out(x.terms().begin(), x.terms().end());
    out.insert(out.end(), y.terms().begin(), y.terms().end());
    return FracPowerSeries(x.base(), std::move(out));
}

inline FracPowerSeries multiply(const FracPowerSeries& x, const FracPowerSeries& y) {
    if (x.base() != y.base())
        throw std::invalid_argument("series multiply: base points differ");
    std::vector<SeriesTerm> out;
    out.reserve(x.terms().size() * y.terms().size());
    for (const auto& tx : x.terms())
        for (const auto& ty : y.terms())
            out.push_back({tx.coefficient * ty.coefficient, tx.exponent + ty.exponent});
    return FracPowerSeries(x.base(), std::move(out));
}

/// Nonzero constant series collapse to their value; the empty series is 0.
inline std::optional<double> as_constant(const FracPowerSeries& x) {
    if (x.empty()) return 0.0;
    if (x.terms().size() == 1 && std::abs(x.terms().front().exponent) <= detail::kExponentMergeTol)
        return x.terms().front().coefficient;
    return std::nullopt;
}

namespace detail {

template <class F>
double golden_max(F&& f, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < 80 && (b - a) > 1e-14 * (1.0 + std::abs(a)); ++i) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return std::max(fc, fd);
}

template <class F>
double max_abs_on_interval(F&& f, double a, double b, int samples = 10000) {
    double best = 0.0;
    int best_i = 0;
    for (int i = 0; i <= samples; ++i) {
        const double t = a + (b - a) * i / samples;
        const double v = std::abs(f(t));
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    const double lo = a + (b - a) * std::max(0, best_i - 1) / samples;
    const double hi = a + (b - a) * std::min(samples, best_i + 1) / samples;
    return std::max(best, golden_max([&](double t) { return std::abs(f(t)); }, lo, hi));
}

} // namespace detail

/// Norm max|x| + sum_i max|x^(alpha_i)| over [a, b]; maxima located by dense
/// sampling refined with golden-section. Singular derivatives make the norm
/// infinite, which is reported as such.
inline double trajectory_norm(const FracPowerSeries& x, std::span<const double> orders,
                              double a, double b) {
    if (!(b > a))
        throw std::invalid_argument("trajectory_norm: need b > a");
    if (x.has_singular_terms())
        return std::numeric_limits<double>::infinity();
    double total = detail::max_abs_on_interval([&](double t) { return x(t); }, a, b);
    for (double alpha : orders) {
        FracPowerSeries d = frac_derivative(x, alpha);
        if (d.has_singular_terms())
            return std::numeric_limits<double>::infinity();
        total += detail::max_abs_on_interval([&](double t) { return d(t); }, a, b);
    }
    return total;
}

/// Build a trajectory over the given basis exponents honoring the requested
/// endpoint values. The constant term carries the left value; when a right
/// value is present the coefficient of the last exponent is eliminated to
/// satisfy it. Free coefficients fill the remaining slots in exponent order.
inline FracPowerSeries constrain_endpoints(std::span<const double> free_coefficients,
                                           std::span<const double> basis_exponents,
                                           double a, double b,
                                           std::optional<double> left,
                                           std::optional<double> right) {
    if (!(b > a))
        throw std::invalid_argument("constrain_endpoints: need b > a");
    std::vector<double> exps(basis_exponents.begin(), basis_exponents.end());
    std::sort(exps.begin(), exps.end());
    for (std::size_t i = 0; i < exps.size(); ++i) {
        if (!(exps[i] > 0.0))
            throw std::invalid_argument("constrain_endpoints: basis exponents must be > 0");
        if (i > 0 && exps[i] - exps[i - 1] <= detail::kExponentMergeTol)
            throw std::invalid_argument("constrain_endpoints: duplicate basis exponent");
    }
    const std::size_t expected =
        (left ? 0u : 1u) + exps.size() - (right ? 1u : 0u);
    if (free_coefficients.size() != expected)
        throw std::invalid_argument(
            "constrain_endpoints: expected " + std::to_string(expected) +
            " free coefficients, got " + std::to_string(free_coefficients.size()));
    if (right && exps.empty())
        throw std::invalid_argument(
            "constrain_endpoints: right endpoint given but basis is empty");

    std::size_t next = 0;
    std::vector<SeriesTerm> terms;
    const double constant = left ? *left : free_coefficients[next++];
    if (constant != 0.0)
        terms.push_back({constant, 0.0});
    const std::size_t n_free_basis = exps.size() - (right ? 1 : 0);
    for (std::size_t i = 0; i < n_free_basis; ++i)
        terms.push_back({free_coefficients[next++], exps[i]});
    if (right) {
        const double len = b - a;
        double partial = 0.0;
        for (const auto& t : terms)
            if (t.exponent > 0.0)
                partial += t.coefficient * std::pow(len, t.exponent);
        const double c_last =
            (*right - constant - partial) / std::pow(len, exps.back());
        terms.push_back({c_last, exps.back()});
    }
    return FracPowerSeries(a, std::move(terms));
}

} // namespace fracvar

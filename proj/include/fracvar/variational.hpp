#pragma once

// Necessary-condition residuals: the weighted Euler-Lagrange defect
//   R(t) = sum_i alpha_i * w_i * (b-t)^(alpha_i - 1)
//                 * (f_iy<x>_i(t) - f_iv^(alpha_i)<x>_i(t)),
// with w_i = H'_i(F_1..F_n), evaluated on [a, b - eps], plus the natural
// boundary defects sum_i alpha_i! * w_i * f_iv<x>_i at free endpoints.
// The product and quotient corollaries reuse the same core with their
// explicit weight vectors; they are instantiations, not separate formulas.

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fracvar/functional.hpp"

namespace fracvar {

struct ResidualReport {
    std::vector<double> grid;        // t values in [a, b - eps]
    std::vector<double> residual;    // weighted samples R(t)
    double sup_norm = 0.0;           // max |R| over the grid
    // unweighted per-term defects f_iy - f_iv^(alpha_i), one row per term
    std::vector<std::vector<double>> term_defects;
    std::optional<double> natural_left;  // present iff x(a) free
    std::optional<double> natural_right; // present iff x(b) free
    std::vector<double> term_values;     // F_1..F_n used for the weights
    double eps = 0.0;
    int grid_size = 0;
    std::vector<std::string> derivative_routes; // per term: "series" | "sampled"
};

/// Testing/diagnostic knob: force the sampled derivative route even where the
/// exact series route is structurally available.
enum class DerivativeRoute { Auto, ForceSampled };

namespace detail {

inline constexpr int kSampledGridPanels = 4096;

struct TermDerivative {
    bool exact = false;
    FracPowerSeries series;  // valid when exact
    SampledFunction sampled; // valid otherwise
    double operator()(double t) const { return exact ? series(t) : sampled(t); }
};

// g_i(t) = f_iv(t, x(t), v_i(t)) differentiated to order alpha_i: termwise
// through the power rule when g_i stays a fractional power series, else via
// the sampled scheme on a fine uniform grid.
inline TermDerivative fv_frac_derivative(const LagrangianTerm& term,
                                         const FracPowerSeries& x,
                                         const FracPowerSeries& v, double a, double b,
                                         DerivativeRoute route) {
    TermDerivative out;
    if (route == DerivativeRoute::Auto) {
        auto g = compose_series(term.f_v(), t_as_series(a), x, v);
        if (g && !g->has_singular_terms()) {
            out.exact = true;
            out.series = frac_derivative(*g, term.alpha());
            return out;
        }
    }
    const std::size_t count = kSampledGridPanels + 1;
    SampledFunction g = sample_function(
        [&](double t) { return term.f_v_at(t, x(t), v(t)); }, a, b, count);
    for (double value : g.values)
        if (!std::isfinite(value))
            throw std::domain_error(
                "el_residual: f_v along x is singular on the grid; the sampled "
                "derivative route cannot handle it");
    out.sampled = term.alpha() == 1.0 ? classical_derivative(g)
                                      : frac_derivative(g, term.alpha());
    return out;
}

// Natural-condition sum sum_i alpha_i! w_i f_iv<x>_i(t) at an endpoint.
inline double natural_defect_at(const std::vector<LagrangianTerm>& terms,
                                const std::vector<double>& weights,
                                const std::vector<FracPowerSeries>& v,
                                const FracPowerSeries& x, double t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double vi = v[i](t);
        if (!std::isfinite(vi))
            throw std::domain_error(
                "natural condition: x^(alpha) is singular at the endpoint");
        const double fv = terms[i].f_v_at(t, x(t), vi);
        if (!std::isfinite(fv))
            throw std::domain_error(
                "natural condition: f_v is singular at the endpoint");
        acc += alpha_factorial(terms[i].alpha()) * weights[i] * fv;
    }
    return acc;
}

// Shared core: residual + natural defects for a given weight vector.
inline ResidualReport weighted_residual(const std::vector<LagrangianTerm>& terms,
                                        const std::vector<double>& weights,
                                        std::vector<double> term_values, double a,
                                        double b, std::optional<double> left,
                                        std::optional<double> right,
                                        const FracPowerSeries& x, int grid_size,
                                        std::optional<double> eps_opt,
                                        DerivativeRoute route) {
    if (grid_size < 2)
        throw std::invalid_argument("el_residual: grid size must be at least 2");
    const double eps = eps_opt.value_or((b - a) * 1e-3);
    if (!(eps > 0.0) || eps >= b - a)
        throw std::invalid_argument("el_residual: eps must lie in (0, b - a)");

    ResidualReport report;
    report.eps = eps;
    report.grid_size = grid_size;
    report.term_values = std::move(term_values);

    const std::size_t n = terms.size();
    std::vector<FracPowerSeries> v(n);
    std::vector<TermDerivative> dg(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = frac_derivative(x, terms[i].alpha());
        dg[i] = fv_frac_derivative(terms[i], x, v[i], a, b, route);
        report.derivative_routes.push_back(dg[i].exact ? "series" : "sampled");
    }

    report.grid.resize(grid_size);
    report.residual.resize(grid_size);
    report.term_defects.assign(n, std::vector<double>(grid_size));
    const double hi = b - eps;
    for (int k = 0; k < grid_size; ++k) {
        const double t = a + (hi - a) * k / (grid_size - 1);
        report.grid[k] = t;
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double alpha = terms[i].alpha();
            const double defect =
                terms[i].f_y_at(t, x(t), v[i](t)) - dg[i](t);
            report.term_defects[i][k] = defect;
            r += alpha * weights[i] * std::pow(b - t, alpha - 1.0) * defect;
        }
        report.residual[k] = r;
        report.sup_norm = std::max(report.sup_norm, std::abs(r));
    }

    if (!left)
        report.natural_left = natural_defect_at(terms, weights, v, x, a);
    if (!right)
        report.natural_right = natural_defect_at(terms, weights, v, x, b);
    return report;
}

} // namespace detail

/// Euler-Lagrange residual of the composition problem along x, with the
/// natural boundary defects filled for free endpoints. eps defaults to
/// (b - a) * 1e-3; the weight (b-t)^(alpha-1) blows up at b itself.
inline ResidualReport el_residual(const CompositionProblem& p, const FracPowerSeries& x,
                                  int grid_size = 1000,
                                  std::optional<double> eps = std::nullopt,
                                  const QuadratureConfig& q = {},
                                  DerivativeRoute route = DerivativeRoute::Auto) {
    CompositionValue value = eval_composition(p, x, q);
    std::vector<double> weights(p.terms().size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        weights[i] = p.h_grad_value(i, value.term_values);
    return detail::weighted_residual(p.terms(), weights,
                                     std::move(value.term_values), p.a(), p.b(),
                                     p.left(), p.right(), x, grid_size, eps, route);
}

/// Natural boundary defects only; entries are present exactly for the
/// endpoints the problem leaves free.
inline std::pair<std::optional<double>, std::optional<double>>
natural_bc_defects(const CompositionProblem& p, const FracPowerSeries& x,
                   const QuadratureConfig& q = {}) {
    if (p.left() && p.right())
        return {std::nullopt, std::nullopt};
    CompositionValue value = eval_composition(p, x, q);
    const std::size_t n = p.terms().size();
    std::vector<double> weights(n);
    std::vector<FracPowerSeries> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        weights[i] = p.h_grad_value(i, value.term_values);
        v[i] = frac_derivative(x, p.terms()[i].alpha());
    }
    std::pair<std::optional<double>, std::optional<double>> out;
    if (!p.left())
        out.first = detail::natural_defect_at(p.terms(), weights, v, x, p.a());
    if (!p.right())
        out.second = detail::natural_defect_at(p.terms(), weights, v, x, p.b());
    return out;
}

/// Product-corollary residual: weights (F_2, F_1) taken directly from the
/// corollary statement. Agrees with el_residual on the equivalent H = z1*z2
/// problem pointwise.
inline ResidualReport corollary_residual_product(
    const LagrangianTerm& term1, const LagrangianTerm& term2, double a, double b,
    std::optional<double> left, std::optional<double> right, const FracPowerSeries& x,
    int grid_size = 1000, std::optional<double> eps = std::nullopt,
    const QuadratureConfig& q = {}) {
    std::vector<LagrangianTerm> terms{term1, term2};
    std::vector<double> F{eval_term_functional(term1, x, a, b, q),
                          eval_term_functional(term2, x, a, b, q)};
    std::vector<double> weights{F[1], F[0]};
    return detail::weighted_residual(terms, weights, std::move(F), a, b, left, right,
                                     x, grid_size, eps, DerivativeRoute::Auto);
}

/// Quotient-corollary residual with Q = F_1/F_2. The corollary's equation is
/// scaled by 1/F_2 so that it coincides with the generic Theorem residual of
/// the H = z1/z2 problem (the zero set is unchanged); weights are
/// (1/F_2, -Q/F_2).
inline ResidualReport corollary_residual_quotient(
    const LagrangianTerm& term1, const LagrangianTerm& term2, double a, double b,
    std::optional<double> left, std::optional<double> right, const FracPowerSeries& x,
    int grid_size = 1000, std::optional<double> eps = std::nullopt,
    const QuadratureConfig& q = {}) {
    std::vector<LagrangianTerm> terms{term1, term2};
    std::vector<double> F{eval_term_functional(term1, x, a, b, q),
                          eval_term_functional(term2, x, a, b, q)};
    if (F[1] == 0.0)
        throw EvalError("quotient corollary: F_2 = 0");
    const double Q = F[0] / F[1];
    std::vector<double> weights{1.0 / F[1], -Q / F[1]};
    return detail::weighted_residual(terms, weights, std::move(F), a, b, left, right,
                                     x, grid_size, eps, DerivativeRoute::Auto);
}

/// CSV layout: t, R, defect_term_1, ..., defect_term_n.
inline void write_residual_csv(const ResidualReport& report, std::ostream& os) {
    os << "t,R";
    for (std::size_t i = 0; i < report.term_defects.size(); ++i)
        os << ",defect_term_" << (i + 1);
    os << "\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        os << buf;
    };
    for (std::size_t k = 0; k < report.grid.size(); ++k) {
        put(report.grid[k]);
        os << ',';
        put(report.residual[k]);
        for (const auto& row : report.term_defects) {
            os << ',';
            put(row[k]);
        }
        os << "\n";
    }
}

} // namespace fracvar

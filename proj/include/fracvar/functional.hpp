#pragma once

// Inner functionals F_i[x] = int_a^b f_i(t, x, x^(alpha_i)) (dt)^alpha_i and
// the composition L[x] = H(F_1, ..., F_n). Partial derivatives of f_i and H
// are computed symbolically once at construction.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fracvar/expr.hpp"
#include "fracvar/operators.hpp"
#include "fracvar/trajectory.hpp"

namespace fracvar {

enum class Sense { Minimize, Maximize };

/// One integrand f(t, y, v) with its order alpha and precomputed partials.
class LagrangianTerm {
public:
    LagrangianTerm(double alpha, std::string_view f_source)
        : LagrangianTerm(alpha,
                         parse_expression(f_source, {"t", "y", "v"}),
                         std::string(f_source)) {}

    LagrangianTerm(double alpha, ExprAst f, std::string source = {})
        : alpha_(alpha),
          f_(std::move(f)),
          f_y_(differentiate(f_, "y")),
          f_v_(differentiate(f_, "v")),
          source_(std::move(source)) {
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::domain_error("LagrangianTerm: order must lie in (0, 1], got " +
                                    std::to_string(alpha));
    }

    double alpha() const { return alpha_; }
    const ExprAst& f() const { return f_; }
    const ExprAst& f_y() const { return f_y_; }
    const ExprAst& f_v() const { return f_v_; }
    const std::string& source() const { return source_; }

    double f_at(double t, double y, double v) const { return at(f_, t, y, v); }
    double f_y_at(double t, double y, double v) const { return at(f_y_, t, y, v); }
    double f_v_at(double t, double y, double v) const { return at(f_v_, t, y, v); }

private:
    static double at(const ExprAst& e, double t, double y, double v) {
        const std::array<double, 3> vals{t, y, v};
        return evaluate(e, std::span<const double>(vals));
    }

    double alpha_;
    ExprAst f_, f_y_, f_v_;
    std::string source_;
};

/// The full problem: interval, terms, outer function H over z1..zn, optional
/// endpoint values (absent means the endpoint is free), objective sense.
class CompositionProblem {
public:
    CompositionProblem(double a, double b, std::vector<LagrangianTerm> terms,
                       std::string_view h_source, std::optional<double> left,
                       std::optional<double> right, Sense sense = Sense::Minimize)
        : a_(a), b_(b), terms_(std::move(terms)), left_(left), right_(right),
          sense_(sense), h_source_(h_source) {
        if (!(b_ > a_))
            throw std::invalid_argument("CompositionProblem: need a < b");
        if (terms_.empty())
            throw std::invalid_argument("CompositionProblem: need at least one term");
        std::vector<std::string> zs;
        zs.reserve(terms_.size());
        for (std::size_t i = 0; i < terms_.size(); ++i)
            zs.push_back("z" + std::to_string(i + 1));
        h_ = parse_expression(h_source, zs);
        h_grad_.reserve(zs.size());
        for (const auto& z : zs)
            h_grad_.push_back(differentiate(h_, z));
    }

    double a() const { return a_; }
    double b() const { return b_; }
    const std::vector<LagrangianTerm>& terms() const { return terms_; }
    const ExprAst& h() const { return h_; }
    const std::string& h_source() const { return h_source_; }
    const ExprAst& h_grad(std::size_t i) const { return h_grad_[i]; }
    std::optional<double> left() const { return left_; }
    std::optional<double> right() const { return right_; }
    Sense sense() const { return sense_; }

    double h_value(std::span<const double> F) const { return evaluate(h_, F); }
    double h_grad_value(std::size_t i, std::span<const double> F) const {
        return evaluate(h_grad_[i], F);
    }

    std::vector<double> orders() const {
        std::vector<double> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_)
            out.push_back(t.alpha());
        return out;
    }

private:
    double a_, b_;
    std::vector<LagrangianTerm> terms_;
    ExprAst h_;
    std::vector<ExprAst> h_grad_;
    std::optional<double> left_, right_;
    Sense sense_;
    std::string h_source_;
};

/// F_i[x]: the term's integrand along x, integrated with respect to
/// (dt)^alpha_i. Integrable singularities of x^(alpha_i) at a pass through
/// the graded quadrature path.
inline double eval_term_functional(const LagrangianTerm& term, const FracPowerSeries& x,
                                   double a, double b, const QuadratureConfig& q = {}) {
    const FracPowerSeries v = frac_derivative(x, term.alpha());
    return frac_integral(
        [&](double t) { return term.f_at(t, x(t), v(t)); }, a, b, term.alpha(), q);
}

struct CompositionValue {
    double objective = 0.0;          // L[x]
    std::vector<double> term_values; // F_1..F_n
};

inline CompositionValue eval_composition(const CompositionProblem& p,
                                         const FracPowerSeries& x,
                                         const QuadratureConfig& q = {}) {
    CompositionValue out;
    out.term_values.reserve(p.terms().size());
    for (const auto& term : p.terms())
        out.term_values.push_back(eval_term_functional(term, x, p.a(), p.b(), q));
    out.objective = p.h_value(out.term_values);
    return out;
}

inline CompositionProblem make_product(LagrangianTerm term1, LagrangianTerm term2,
                                       double a, double b, std::optional<double> left,
                                       std::optional<double> right,
                                       Sense sense = Sense::Minimize) {
    std::vector<LagrangianTerm> terms;
    terms.push_back(std::move(term1));
    terms.push_back(std::move(term2));
    return CompositionProblem(a, b, std::move(terms), "z1*z2", left, right, sense);
}

inline CompositionProblem make_quotient(LagrangianTerm term1, LagrangianTerm term2,
                                        double a, double b, std::optional<double> left,
                                        std::optional<double> right,
                                        Sense sense = Sense::Minimize) {
    std::vector<LagrangianTerm> terms;
    terms.push_back(std::move(term1));
    terms.push_back(std::move(term2));
    return CompositionProblem(a, b, std::move(terms), "z1/z2", left, right, sense);
}

// --- structural composition detection ------------------------------------

namespace detail {

inline constexpr std::size_t kComposeTermCap = 128;

inline std::optional<FracPowerSeries> compose_node(const ExprAst& e,
                                                   const FracPowerSeries& t_series,
                                                   const FracPowerSeries& y_series,
                                                   const FracPowerSeries& v_series);

inline std::optional<FracPowerSeries> compose_pow(const FracPowerSeries& base,
                                                  double k) {
    const double b = base.base();
    if (base.empty()) { // 0^k
        if (k > 0.0) return FracPowerSeries::zero(b);
        return std::nullopt;
    }
    if (base.terms().size() == 1) {
        const auto& t = base.terms().front();
        double c;
        if (t.coefficient > 0.0)
            c = std::pow(t.coefficient, k);
        else if (std::floor(k) == k)
            c = std::pow(t.coefficient, k);
        else
            return std::nullopt;
        return FracPowerSeries(b, {{c, t.exponent * k}});
    }
    // multi-term base: only small non-negative integer powers stay in class
    if (std::floor(k) != k || k < 0.0 || k > 16.0)
        return std::nullopt;
    FracPowerSeries acc(b, {{1.0, 0.0}});
    for (int i = 0; i < static_cast<int>(k); ++i) {
        acc = multiply(acc, base);
        if (acc.terms().size() > kComposeTermCap)
            return std::nullopt;
    }
    return acc;
}

inline std::optional<FracPowerSeries> compose_node(const ExprAst& e,
                                                   const FracPowerSeries& t_series,
                                                   const FracPowerSeries& y_series,
                                                   const FracPowerSeries& v_series) {
    using K = ExprAst::Kind;
    const double base = t_series.base();
    switch (e.kind()) {
    case K::Constant:
        return FracPowerSeries(base, {{e.value(), 0.0}});
    case K::Variable:
        if (e.name() == "t") return t_series;
        if (e.name() == "y") return y_series;
        if (e.name() == "v") return v_series;
        return std::nullopt;
    case K::Add:
    case K::Sub: {
        auto lhs = compose_node(e.child(0), t_series, y_series, v_series);
        auto rhs = compose_node(e.child(1), t_series, y_series, v_series);
        if (!lhs || !rhs) return std::nullopt;
        FracPowerSeries sum =
            add(*lhs, e.kind() == K::Sub ? scale(*rhs, -1.0) : *rhs);
        if (sum.terms().size() > kComposeTermCap) return std::nullopt;
        return sum;
    }
    case K::Mul: {
        auto lhs = compose_node(e.child(0), t_series, y_series, v_series);
        auto rhs = compose_node(e.child(1), t_series, y_series, v_series);
        if (!lhs || !rhs) return std::nullopt;
        FracPowerSeries prod = multiply(*lhs, *rhs);
        if (prod.terms().size() > kComposeTermCap) return std::nullopt;
        return prod;
    }
    case K::Div: {
        auto lhs = compose_node(e.child(0), t_series, y_series, v_series);
        auto rhs = compose_node(e.child(1), t_series, y_series, v_series);
        if (!lhs || !rhs) return std::nullopt;
        if (rhs->terms().size() != 1) return std::nullopt;
        const auto& d = rhs->terms().front();
        if (d.coefficient == 0.0) return std::nullopt;
        return multiply(*lhs,
                        FracPowerSeries(base, {{1.0 / d.coefficient, -d.exponent}}));
    }
    case K::Pow: {
        auto expo = compose_node(e.child(1), t_series, y_series, v_series);
        if (!expo) return std::nullopt;
        auto k = as_constant(*expo);
        if (!k) return std::nullopt;
        auto b = compose_node(e.child(0), t_series, y_series, v_series);
        if (!b) return std::nullopt;
        return compose_pow(*b, *k);
    }
    case K::Neg: {
        auto c = compose_node(e.child(0), t_series, y_series, v_series);
        if (!c) return std::nullopt;
        return scale(*c, -1.0);
    }
    case K::Call: {
        auto arg = compose_node(e.child(0), t_series, y_series, v_series);
        if (!arg) return std::nullopt;
        if (e.func() == ExprAst::Func::Sqrt && arg->terms().size() == 1) {
            const auto& t = arg->terms().front();
            if (t.coefficient >= 0.0)
                return FracPowerSeries(base,
                                       {{std::sqrt(t.coefficient), 0.5 * t.exponent}});
        }
        auto c = as_constant(*arg);
        if (!c) return std::nullopt;
        // fold function of a constant to a constant; domain failures fall back
        // to the sampled route, which will surface them honestly
        try {
            const ExprAst grounded = ExprAst::call(e.func(), ExprAst::constant(*c));
            const double value = evaluate(grounded, std::span<const double>{});
            return FracPowerSeries(base, {{value, 0.0}});
        } catch (const EvalError&) {
            return std::nullopt;
        }
    }
    }
    return std::nullopt;
}

} // namespace detail

/// Attempt to express e(t, y(t), v(t)) as a fractional power series in
/// (t - a). Succeeds exactly when the expression stays inside the class
/// (polynomial combinations, single-term powers/roots, constant-folded
/// function calls); returns nullopt otherwise.
inline std::optional<FracPowerSeries> compose_series(const ExprAst& e,
                                                     const FracPowerSeries& t_series,
                                                     const FracPowerSeries& y_series,
                                                     const FracPowerSeries& v_series) {
    return detail::compose_node(e, t_series, y_series, v_series);
}

/// The identity trajectory t as a series in (t - a).
inline FracPowerSeries t_as_series(double a) {
    return FracPowerSeries(a, {{a, 0.0}, {1.0, 1.0}});
}

} // namespace fracvar

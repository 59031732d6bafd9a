#pragma once

// Candidate-finding: a derivative-free Ritz minimizer over fractional power
// bases (Nelder-Mead with restarts), and a damped-Newton path for
// self-consistency systems such as the (Q1, Q2) fixed point of the
// square-root product problem.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracvar/functional.hpp"
#include "fracvar/variational.hpp"

namespace fracvar {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RitzConfig {
    std::vector<double> basis_exponents;
    int max_evaluations = 100000;
    double simplex_tolerance = 1e-10;
    int restarts = 3;
    unsigned seed = 0;

    void validate() const {
        if (basis_exponents.empty())
            throw std::invalid_argument("RitzConfig: need at least one basis exponent");
        if (!(simplex_tolerance > 0.0))
            throw std::invalid_argument("RitzConfig: tolerance must be positive");
        if (max_evaluations < 1 || restarts < 0)
            throw std::invalid_argument("RitzConfig: bad evaluation/restart budget");
    }
};

enum class SolveStatus { Converged, MaxEvals, StationarityFailed };

inline const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxEvals: return "max-evals";
    case SolveStatus::StationarityFailed: return "stationarity-failed";
    }
    return "?";
}

/// Outcome of a solve. Only necessary conditions back the result, so it is
/// always labeled a candidate.
struct SolveResult {
    FracPowerSeries trajectory;
    double objective = 0.0;          // L at the trajectory, in the problem's sense
    std::vector<double> term_values; // F_1..F_n
    ResidualReport residual;         // stationarity post-check on the trajectory
    SolveStatus status = SolveStatus::Converged;
    std::string certificate = "candidate";
    std::vector<double> free_coefficients;
    long evaluations = 0;
};

namespace detail {

struct NelderMeadOutcome {
    std::vector<double> best_point;
    double best_value = std::numeric_limits<double>::infinity();
    bool converged = false;
};

// Standard simplex method: reflection 1, expansion 2, contraction 0.5,
// shrink 0.5. Stops when the vertex spread in the infinity norm falls under
// `tol` or the shared evaluation budget runs out.
template <class F>
NelderMeadOutcome nelder_mead(F&& objective, const std::vector<double>& start,
                              const std::vector<double>& scales, double tol,
                              int max_evals, long& evals_used) {
    const std::size_t d = start.size();
    std::vector<std::vector<double>> x(d + 1, start);
    for (std::size_t i = 0; i < d; ++i)
        x[i + 1][i] += scales[i];
    std::vector<double> fx(d + 1);
    auto eval = [&](const std::vector<double>& p) {
        ++evals_used;
        return objective(p);
    };
    for (std::size_t i = 0; i <= d; ++i)
        fx[i] = eval(x[i]);

    NelderMeadOutcome out;
    auto record = [&](const std::vector<double>& p, double f) {
        if (f < out.best_value) {
            out.best_value = f;
            out.best_point = p;
        }
    };
    for (std::size_t i = 0; i <= d; ++i)
        record(x[i], fx[i]);

    std::vector<std::size_t> order(d + 1);
    std::vector<double> centroid(d), trial(d), trial2(d);
    while (evals_used < max_evals) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t l, std::size_t r) { return fx[l] < fx[r]; });
        const std::size_t best = order[0], worst = order[d];
        const std::size_t second_worst = d >= 1 ? order[d - 1] : order[0];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t c = 0; c < d; ++c)
                diameter = std::max(diameter, std::abs(x[i][c] - x[best][c]));
        if (diameter <= tol) {
            out.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == worst) continue;
            for (std::size_t c = 0; c < d; ++c)
                centroid[c] += x[i][c];
        }
        for (double& c : centroid)
            c /= static_cast<double>(d);

        for (std::size_t c = 0; c < d; ++c)
            trial[c] = centroid[c] + (centroid[c] - x[worst][c]);
        const double f_reflect = eval(trial);
        record(trial, f_reflect);

        if (f_reflect < fx[best]) {
            for (std::size_t c = 0; c < d; ++c)
                trial2[c] = centroid[c] + 2.0 * (trial[c] - centroid[c]);
            const double f_expand = eval(trial2);
            record(trial2, f_expand);
            if (f_expand < f_reflect) {
                x[worst] = trial2;
                fx[worst] = f_expand;
            } else {
                x[worst] = trial;
                fx[worst] = f_reflect;
            }
        } else if (f_reflect < fx[second_worst]) {
            x[worst] = trial;
            fx[worst] = f_reflect;
        } else {
            const bool outside = f_reflect < fx[worst];
            for (std::size_t c = 0; c < d; ++c)
                trial2[c] = outside ? centroid[c] + 0.5 * (trial[c] - centroid[c])
                                    : centroid[c] + 0.5 * (x[worst][c] - centroid[c]);
            const double f_contract = eval(trial2);
            record(trial2, f_contract);
            if (f_contract < (outside ? f_reflect : fx[worst])) {
                x[worst] = trial2;
                fx[worst] = f_contract;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t c = 0; c < d; ++c)
                        x[i][c] = x[best][c] + 0.5 * (x[i][c] - x[best][c]);
                    fx[i] = eval(x[i]);
                    record(x[i], fx[i]);
                    if (evals_used >= max_evals) break;
                }
            }
        }
    }
    return out;
}

} // namespace detail

/// Direct Ritz search: minimize L (or -L for maximize) over the free
/// coefficients of the constrained basis trajectory. Deterministic for a
/// fixed seed; the best objective seen is non-increasing by construction.
inline SolveResult solve_ritz(const CompositionProblem& p, const RitzConfig& cfg,
                              const QuadratureConfig& q = {}) {
    cfg.validate();
    std::vector<double> exps = cfg.basis_exponents;
    std::sort(exps.begin(), exps.end());
    const std::size_t dof =
        (p.left() ? 0u : 1u) + exps.size() - (p.right() ? 1u : 0u);

    const double sense_sign = p.sense() == Sense::Minimize ? 1.0 : -1.0;
    long evals = 0;
    auto build = [&](const std::vector<double>& free) {
        return constrain_endpoints(free, exps, p.a(), p.b(), p.left(), p.right());
    };
    auto objective = [&](const std::vector<double>& free) -> double {
        try {
            return sense_sign * eval_composition(p, build(free), q).objective;
        } catch (const EvalError&) {
            return std::numeric_limits<double>::infinity();
        } catch (const std::domain_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<double> best(dof, 0.0);
    double best_value = objective(best);
    ++evals;
    bool any_converged = dof == 0;

    if (dof > 0) {
        std::mt19937 rng(cfg.seed);
        double scale = 0.5;
        for (int r = 0; r <= cfg.restarts && evals < cfg.max_evaluations; ++r) {
            std::vector<double> scales(dof, scale);
            if (r > 0) { // restart around the incumbent with random orientation
                std::uniform_int_distribution<int> coin(0, 1);
                for (double& s : scales)
                    s = coin(rng) ? s : -s;
            }
            auto outcome = detail::nelder_mead(objective, best, scales,
                                               cfg.simplex_tolerance,
                                               cfg.max_evaluations, evals);
            any_converged = any_converged || outcome.converged;
            if (outcome.best_value < best_value) {
                best_value = outcome.best_value;
                best = outcome.best_point;
            }
            scale *= 0.5;
        }
    }

    if (std::isinf(best_value))
        throw SolverError("solve_ritz: objective undefined at every probed candidate");

    SolveResult result;
    result.free_coefficients = best;
    result.trajectory = build(best);
    result.evaluations = evals;
    CompositionValue value = eval_composition(p, result.trajectory, q);
    result.objective = value.objective;
    result.term_values = value.term_values;
    result.residual = el_residual(p, result.trajectory, 1000, std::nullopt, q);
    if (!any_converged)
        result.status = SolveStatus::MaxEvals;
    else if (result.residual.sup_norm <= 1e-4)
        result.status = SolveStatus::Converged;
    else
        result.status = SolveStatus::StationarityFailed;
    return result;
}

/// Damped Newton iteration for residual_map(q) = 0 with a forward-difference
/// Jacobian. The step is halved (factor 0.5, at most 60 times) until the
/// max-norm of the residual decreases.
inline std::vector<double> solve_self_consistent(
    const std::function<std::vector<double>(const std::vector<double>&)>& residual_map,
    std::vector<double> initial, double tol, int max_iterations) {
    const std::size_t m = initial.size();
    if (m == 0)
        throw std::invalid_argument("solve_self_consistent: empty initial point");
    auto norm_inf = [](const std::vector<double>& r) {
        double n = 0.0;
        for (double v : r)
            n = std::max(n, std::abs(v));
        return n;
    };

    std::vector<double> q = std::move(initial);
    std::vector<double> r = residual_map(q);
    if (r.size() != m)
        throw std::invalid_argument("solve_self_consistent: residual dimension mismatch");
    double rn = norm_inf(r);

    for (int iter = 0; iter < max_iterations; ++iter) {
        if (rn <= tol)
            return q;

        // forward-difference Jacobian, column by column
        std::vector<std::vector<double>> J(m, std::vector<double>(m));
        for (std::size_t j = 0; j < m; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(q[j]));
            std::vector<double> qj = q;
            qj[j] += h;
            std::vector<double> rj = residual_map(qj);
            for (std::size_t i = 0; i < m; ++i)
                J[i][j] = (rj[i] - r[i]) / h;
        }

        // Gaussian elimination with partial pivoting on J * delta = -r
        std::vector<double> rhs(m);
        for (std::size_t i = 0; i < m; ++i)
            rhs[i] = -r[i];
        for (std::size_t col = 0; col < m; ++col) {
            std::size_t pivot = col;
            for (std::size_t i = col + 1; i < m; ++i)
                if (std::abs(J[i][col]) > std::abs(J[pivot][col]))
                    pivot = i;
            if (std::abs(J[pivot][col]) < 1e-14)
                throw SolverError("solve_self_consistent: singular Jacobian");
            std::swap(J[col], J[pivot]);
            std::swap(rhs[col], rhs[pivot]);
            for (std::size_t i = col + 1; i < m; ++i) {
                const double factor = J[i][col] / J[col][col];
                for (std::size_t k = col; k < m; ++k)
                    J[i][k] -= factor * J[col][k];
                rhs[i] -= factor * rhs[col];
            }
        }
        std::vector<double> delta(m);
        for (std::size_t i = m; i-- > 0;) {
            double acc = rhs[i];
            for (std::size_t k = i + 1; k < m; ++k)
                acc -= J[i][k] * delta[k];
            delta[i] = acc / J[i][i];
        }

        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 60; ++halving) {
            std::vector<double> trial(m);
            for (std::size_t i = 0; i < m; ++i)
                trial[i] = q[i] + lambda * delta[i];
            try {
                std::vector<double> rt = residual_map(trial);
                const double rtn = norm_inf(rt);
                if (rtn < rn) {
                    q = std::move(trial);
                    r = std::move(rt);
                    rn = rtn;
                    accepted = true;
                    break;
                }
            } catch (const std::exception&) {
                // trial left the domain; damp further
            }
            lambda *= 0.5;
        }
        if (!accepted)
            throw SolverError(
                "solve_self_consistent: no convergence (step rejected after 60 halvings)");
    }
    if (rn <= tol)
        return q;
    throw SolverError("solve_self_consistent: no convergence within iteration budget");
}

// --- the square-root product self-consistency system ----------------------

/// Candidate trajectory of the unit-interval product problem for given
/// (Q1, Q2): x(t) = c1 t^(1/2) + c2 t with
///   c1 = 2A/sqrt(pi), A = (Q1 pi + 4 sqrt(pi) Q2)/(8 Q2),
///   c2 = -B sqrt(pi)/2, B = Q1/(2 Q2).
/// x(0) = 0 and x(1) = 1 hold identically for every Q2 != 0.
inline FracPowerSeries q_system_trajectory(double q1, double q2) {
    if (std::abs(q2) < 1e-12)
        throw std::domain_error("q_system_trajectory: Q2 = 0 is outside the domain");
    const double sqrt_pi = std::sqrt(M_PI);
    const double A = (q1 * M_PI + 4.0 * sqrt_pi * q2) / (8.0 * q2);
    const double B = q1 / (2.0 * q2);
    return FracPowerSeries(0.0, {{2.0 * A / sqrt_pi, 0.5}, {-B * sqrt_pi / 2.0, 1.0}});
}

/// Self-consistency map (Q1, Q2) -> (F1[x(Q)] - Q1, F2[x(Q)] - Q2) for the
/// canonical product problem: two order-1/2 terms on [0, 1] with x(0) = 0,
/// x(1) = 1 and H = z1*z2. Problems of any other shape are rejected.
inline std::function<std::vector<double>(const std::vector<double>&)>
build_q_system(const CompositionProblem& p, const QuadratureConfig& q = {}) {
    const bool shape_ok = p.terms().size() == 2 && p.a() == 0.0 && p.b() == 1.0 &&
                          p.terms()[0].alpha() == 0.5 && p.terms()[1].alpha() == 0.5 &&
                          p.left() && *p.left() == 0.0 && p.right() &&
                          *p.right() == 1.0;
    if (!shape_ok)
        throw std::invalid_argument(
            "build_q_system: problem is not the canonical order-1/2 product "
            "problem on [0, 1] with x(0)=0, x(1)=1");
    const LagrangianTerm term1 = p.terms()[0];
    const LagrangianTerm term2 = p.terms()[1];
    return [term1, term2, q](const std::vector<double>& qv) {
        if (qv.size() != 2)
            throw std::invalid_argument("q-system: expected (Q1, Q2)");
        const FracPowerSeries x = q_system_trajectory(qv[0], qv[1]);
        return std::vector<double>{
            eval_term_functional(term1, x, 0.0, 1.0, q) - qv[0],
            eval_term_functional(term2, x, 0.0, 1.0, q) - qv[1]};
    };
}

/// Coarse multi-start over the grid (0.25, 0.25)..(2, 2), step 0.25, to
/// surface alternative roots of the self-consistency system. Roots are
/// deduplicated within 1e-6 and sorted by Q1.
inline std::vector<std::array<double, 2>>
enumerate_q_roots(const CompositionProblem& p, const QuadratureConfig& q = {}) {
    auto system = build_q_system(p, q);
    std::vector<std::array<double, 2>> roots;
    for (int i = 1; i <= 8; ++i) {
        for (int j = 1; j <= 8; ++j) {
            try {
                std::vector<double> root = solve_self_consistent(
                    system, {0.25 * i, 0.25 * j}, 1e-10, 60);
                bool known = false;
                for (const auto& r : roots)
                    known = known || (std::abs(r[0] - root[0]) < 1e-6 &&
                                      std::abs(r[1] - root[1]) < 1e-6);
                if (!known)
                    roots.push_back({root[0], root[1]});
            } catch (const std::exception&) {
                // start point failed to converge; skip it
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace fracvar

#pragma once

// Implementations behind the fracvar subcommands. Kept out of main() so the
// command logic is directly testable. All numeric console output uses 9
// significant digits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fracvar/acceptance.hpp"
#include "fracvar/problem_io.hpp"

namespace fracvar::cli {

struct EvalOptions {
    std::string problem;
    std::string trajectory;
    std::string out = ".";
    int grid = 1000;
};

struct ResidualOptions {
    std::string problem;
    std::string trajectory;
    std::string out = ".";
    int grid = 1000;
    std::optional<double> eps;
};

struct SolveOptions {
    std::string problem;
    std::string out = ".";
    int grid = 1000;
    std::optional<double> eps;
    std::optional<std::vector<double>> basis;
    std::optional<unsigned> seed;
};

struct SelftestOptions {
    std::optional<int> panels; // forces a flat panel count, disabling grading
};

namespace detail {

inline std::string num9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline void print_values(const CompositionValue& value) {
    std::cout << "L = " << num9(value.objective) << "\n";
    for (std::size_t i = 0; i < value.term_values.size(); ++i)
        std::cout << "F" << (i + 1) << " = " << num9(value.term_values[i]) << "\n";
}

inline std::filesystem::path prepare_out_dir(const std::string& out) {
    std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_eval_csv(const CompositionProblem& p, const FracPowerSeries& x,
                           int grid, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os)
        throw ProblemFormatError("cannot write '" + path.string() + "'");
    os << "t,x";
    for (std::size_t i = 0; i < p.terms().size(); ++i)
        os << ",x_alpha_" << (i + 1);
    os << "\n";
    std::vector<FracPowerSeries> v;
    v.reserve(p.terms().size());
    for (const auto& term : p.terms())
        v.push_back(frac_derivative(x, term.alpha()));
    for (int k = 0; k < grid; ++k) {
        const double t = p.a() + (p.b() - p.a()) * k / (grid - 1);
        os << num9(t) << ',' << num9(x(t));
        for (const auto& vi : v)
            os << ',' << num9(vi(t));
        os << "\n";
    }
}

inline void print_residual_summary(const ResidualReport& report) {
    std::cout << "sup|R| = " << num9(report.sup_norm) << " on [" << num9(report.grid.front())
              << ", " << num9(report.grid.back()) << "] (" << report.grid_size
              << " points, eps = " << num9(report.eps) << ")\n";
    if (report.natural_left)
        std::cout << "natural_left = " << num9(*report.natural_left) << "\n";
    if (report.natural_right)
        std::cout << "natural_right = " << num9(*report.natural_right) << "\n";
}

} // namespace detail

inline int run_eval(const EvalOptions& opt) {
    const LoadedProblem loaded = load_problem(opt.problem);
    const FracPowerSeries x = load_trajectory(opt.trajectory);
    const QuadratureConfig q = loaded.quadrature.value_or(QuadratureConfig{});
    const CompositionValue value = eval_composition(loaded.problem, x, q);
    detail::print_values(value);
    const auto dir = detail::prepare_out_dir(opt.out);
    detail::write_eval_csv(loaded.problem, x, opt.grid, dir / "eval.csv");
    std::cout << "wrote " << (dir / "eval.csv").string() << "\n";
    return 0;
}

inline int run_residual(const ResidualOptions& opt) {
    const LoadedProblem loaded = load_problem(opt.problem);
    const FracPowerSeries x = load_trajectory(opt.trajectory);
    const QuadratureConfig q = loaded.quadrature.value_or(QuadratureConfig{});
    const ResidualReport report =
        el_residual(loaded.problem, x, opt.grid, opt.eps, q);
    const auto dir = detail::prepare_out_dir(opt.out);
    std::ofstream os(dir / "residual.csv");
    if (!os)
        throw ProblemFormatError("cannot write residual.csv");
    write_residual_csv(report, os);
    detail::print_residual_summary(report);
    std::cout << "wrote " << (dir / "residual.csv").string() << "\n";
    return 0;
}

inline int run_solve(const SolveOptions& opt) {
    const LoadedProblem loaded = load_problem(opt.problem);
    const CompositionProblem& p = loaded.problem;
    const QuadratureConfig q = loaded.quadrature.value_or(QuadratureConfig{});

    RitzConfig cfg = loaded.solver.value_or(RitzConfig{});
    if (opt.basis)
        cfg.basis_exponents = *opt.basis;
    if (cfg.basis_exponents.empty()) {
        // default Ritz basis: multiples of the smallest order
        double beta = 1.0;
        for (const auto& term : p.terms())
            beta = std::min(beta, term.alpha());
        for (int k = 1; k <= 4; ++k)
            cfg.basis_exponents.push_back(beta * k);
    }
    if (opt.seed)
        cfg.seed = *opt.seed;

    const SolveResult result = solve_ritz(p, cfg, q);
    std::cout << "status = " << to_string(result.status) << " (" << result.certificate
              << " extremizer: necessary conditions only)\n";
    detail::print_values({result.objective, result.term_values});
    std::cout << "trajectory (base " << detail::num9(result.trajectory.base())
              << "):\n";
    for (const auto& t : result.trajectory.terms())
        std::cout << "  " << detail::num9(t.coefficient) << " * (t - "
                  << detail::num9(result.trajectory.base()) << ")^"
                  << detail::num9(t.exponent) << "\n";
    detail::print_residual_summary(result.residual);

    const auto dir = detail::prepare_out_dir(opt.out);
    save_solve_result(result, dir / "solution.json");
    save_trajectory(result.trajectory, dir / "trajectory.json");
    std::ofstream os(dir / "residual.csv");
    if (!os)
        throw ProblemFormatError("cannot write residual.csv");
    const ResidualReport full =
        el_residual(p, result.trajectory, opt.grid, opt.eps, q);
    write_residual_csv(full, os);
    std::cout << "wrote " << (dir / "solution.json").string() << ", "
              << (dir / "trajectory.json").string() << ", "
              << (dir / "residual.csv").string() << "\n";
    return 0;
}

inline int run_selftest(const SelftestOptions& opt) {
    AcceptanceOptions aopt;
    if (opt.panels) {
        aopt.quad.panels = *opt.panels;
        aopt.quad.grade_levels = 0; // a forced flat panel count means no grading
    }
    const auto rows = run_acceptance(aopt);
    print_acceptance(rows, std::cout);
    return all_passed(rows) ? 0 : 1;
}

} // namespace fracvar::cli

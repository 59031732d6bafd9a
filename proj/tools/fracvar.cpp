// fracvar: evaluate, residual-check, and solve composition functionals built
// on the modified Riemann-Liouville fractional operators.

#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracvar/cli_commands.hpp"

namespace {

std::vector<double> parse_basis_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size())
                throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--basis", "not a number: '" + item + "'");
        }
    }
    if (out.empty())
        throw CLI::ValidationError("--basis", "empty exponent list");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional variational toolkit: composition functionals, "
                 "Euler-Lagrange residuals, Ritz solves"};
    app.require_subcommand(1);

    fracvar::cli::EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "evaluate L and the term functionals");
    eval->add_option("--problem", eval_opt.problem, "problem JSON file")->required();
    eval->add_option("--trajectory", eval_opt.trajectory, "trajectory JSON file")
        ->required();
    eval->add_option("--grid", eval_opt.grid, "CSV grid size")->default_val(1000);
    eval->add_option("--out", eval_opt.out, "output directory")->default_val(".");

    fracvar::cli::ResidualOptions res_opt;
    auto* res = app.add_subcommand("residual", "Euler-Lagrange residual report");
    res->add_option("--problem", res_opt.problem, "problem JSON file")->required();
    res->add_option("--trajectory", res_opt.trajectory, "trajectory JSON file")
        ->required();
    res->add_option("--grid", res_opt.grid, "residual grid size")->default_val(1000);
    double res_eps = -1.0;
    res->add_option("--eps", res_eps,
                    "distance kept from t = b (default (b-a)*1e-3)");
    res->add_option("--out", res_opt.out, "output directory")->default_val(".");

    fracvar::cli::SolveOptions solve_opt;
    auto* solve = app.add_subcommand("solve", "direct Ritz solve");
    solve->add_option("--problem", solve_opt.problem, "problem JSON file")->required();
    std::string basis_text;
    solve->add_option("--basis", basis_text, "comma-separated basis exponents");
    unsigned seed = 0;
    auto* seed_opt = solve->add_option("--seed", seed, "simplex restart seed");
    solve->add_option("--grid", solve_opt.grid, "residual grid size")->default_val(1000);
    double solve_eps = -1.0;
    solve->add_option("--eps", solve_eps,
                      "distance kept from t = b (default (b-a)*1e-3)");
    solve->add_option("--out", solve_opt.out, "output directory")->default_val(".");

    fracvar::cli::SelftestOptions self_opt;
    auto* self = app.add_subcommand("selftest", "run the acceptance suite");
    int panels = -1;
    self->add_option("--panels", panels,
                     "force a flat quadrature panel count (grading disabled)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*eval)
            return fracvar::cli::run_eval(eval_opt);
        if (*res) {
            if (res_eps > 0.0)
                res_opt.eps = res_eps;
            return fracvar::cli::run_residual(res_opt);
        }
        if (*solve) {
            if (!basis_text.empty())
                solve_opt.basis = parse_basis_list(basis_text);
            if (seed_opt->count() > 0)
                solve_opt.seed = seed;
            if (solve_eps > 0.0)
                solve_opt.eps = solve_eps;
            return fracvar::cli::run_solve(solve_opt);
        }
        if (*self) {
            if (panels > 0)
                self_opt.panels = panels;
            return fracvar::cli::run_selftest(self_opt);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

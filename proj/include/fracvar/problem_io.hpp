#pragma once

// File formats. Problem files are JSON:
//   {"interval":[a,b],
//    "terms":[{"alpha":0.5,"f":"v^2"}, ...],
//    "H":"z1*z2",
//    "boundary":{"left":0,"right":1},      // either key may be absent = free
//    "sense":"minimize",                    // optional, default minimize
//    "solver":{...}, "quadrature":{...}}    // optional overrides
// Trajectory files: {"base":0,"terms":[[coefficient,exponent],...]}.
// Every malformed field produces a named error, never a crash.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracvar/functional.hpp"
#include "fracvar/solver.hpp"

namespace fracvar {

struct ProblemFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadedProblem {
    CompositionProblem problem;
    std::optional<RitzConfig> solver;       // file-level solver overrides
    std::optional<QuadratureConfig> quadrature;
};

namespace detail {

inline nlohmann::json parse_json_file(const std::filesystem::path& path,
                                      const char* what) {
    std::ifstream in(path);
    if (!in)
        throw ProblemFormatError(std::string(what) + ": cannot open '" +
                                 path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProblemFormatError(std::string(what) + ": " + e.what());
    }
}

inline double require_number(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number())
        throw ProblemFormatError("field '" + field + "' must be a number");
    return j.get<double>();
}

} // namespace detail

inline LoadedProblem load_problem_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw ProblemFormatError("problem file must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "interval" && key != "terms" && key != "H" && key != "boundary" &&
            key != "sense" && key != "solver" && key != "quadrature")
            throw ProblemFormatError("unknown key '" + key + "'");
    }

    if (!j.contains("interval") || !j["interval"].is_array() ||
        j["interval"].size() != 2)
        throw ProblemFormatError("field 'interval' must be [a, b]");
    const double a = detail::require_number(j["interval"][0], "interval[0]");
    const double b = detail::require_number(j["interval"][1], "interval[1]");
    if (!(a < b))
        throw ProblemFormatError("interval: need a < b");

    if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
        throw ProblemFormatError("field 'terms' must be a non-empty array");
    std::vector<LagrangianTerm> terms;
    std::size_t index = 0;
    for (const auto& tj : j["terms"]) {
        const std::string where = "terms[" + std::to_string(index) + "]";
        if (!tj.is_object() || !tj.contains("alpha") || !tj.contains("f"))
            throw ProblemFormatError(where + " must be {\"alpha\":..., \"f\":...}");
        const double alpha = detail::require_number(tj["alpha"], where + ".alpha");
        if (!(alpha > 0.0) || alpha > 1.0)
            throw ProblemFormatError(where + ".alpha must lie in (0, 1]");
        if (!tj["f"].is_string())
            throw ProblemFormatError(where + ".f must be an expression string");
        try {
            terms.emplace_back(alpha, tj["f"].get<std::string>());
        } catch (const ParseError& e) {
            throw ProblemFormatError(where + ".f: " + e.what());
        }
        ++index;
    }

    if (!j.contains("H") || !j["H"].is_string())
        throw ProblemFormatError("field 'H' must be an expression string");
    const std::string h_source = j["H"].get<std::string>();

    std::optional<double> left, right;
    if (j.contains("boundary")) {
        const auto& bj = j["boundary"];
        if (!bj.is_object())
            throw ProblemFormatError("field 'boundary' must be an object");
        for (const auto& [key, value] : bj.items()) {
            (void)value;
            if (key != "left" && key != "right")
                throw ProblemFormatError("boundary: unknown key '" + key + "'");
        }
        if (bj.contains("left"))
            left = detail::require_number(bj["left"], "boundary.left");
        if (bj.contains("right"))
            right = detail::require_number(bj["right"], "boundary.right");
    }

    Sense sense = Sense::Minimize;
    if (j.contains("sense")) {
        if (!j["sense"].is_string())
            throw ProblemFormatError("field 'sense' must be a string");
        const std::string s = j["sense"].get<std::string>();
        if (s == "minimize")
            sense = Sense::Minimize;
        else if (s == "maximize")
            sense = Sense::Maximize;
        else
            throw ProblemFormatError("sense must be \"minimize\" or \"maximize\"");
    }

    auto build_problem = [&]() -> CompositionProblem {
        try {
            return CompositionProblem(a, b, std::move(terms), h_source, left, right,
                                      sense);
        } catch (const ParseError& e) {
            // an out-of-range z identifier is an arity mismatch, not a typo
            const std::string what = e.what();
            if (what.find("unknown identifier \"z") != std::string::npos)
                throw ProblemFormatError(
                    "H: " + what + "; the problem declares " +
                    std::to_string(j["terms"].size()) + " term(s), so H may use z1..z" +
                    std::to_string(j["terms"].size()) + " only");
            throw ProblemFormatError("H: " + what);
        }
    };
    LoadedProblem out{build_problem(), std::nullopt, std::nullopt};

    if (j.contains("solver")) {
        const auto& sj = j["solver"];
        if (!sj.is_object())
            throw ProblemFormatError("field 'solver' must be an object");
        RitzConfig cfg;
        for (const auto& [key, value] : sj.items()) {
            if (key == "basis") {
                if (!value.is_array() || value.empty())
                    throw ProblemFormatError("solver.basis must be a non-empty array");
                for (const auto& e : value)
                    cfg.basis_exponents.push_back(
                        detail::require_number(e, "solver.basis[]"));
            } else if (key == "max_evaluations") {
                cfg.max_evaluations =
                    static_cast<int>(detail::require_number(value, "solver.max_evaluations"));
            } else if (key == "tolerance") {
                cfg.simplex_tolerance = detail::require_number(value, "solver.tolerance");
            } else if (key == "restarts") {
                cfg.restarts = static_cast<int>(detail::require_number(value, "solver.restarts"));
            } else if (key == "seed") {
                cfg.seed = static_cast<unsigned>(detail::require_number(value, "solver.seed"));
            } else {
                throw ProblemFormatError("solver: unknown key '" + key + "'");
            }
        }
        out.solver = cfg;
    }

    if (j.contains("quadrature")) {
        const auto& qj = j["quadrature"];
        if (!qj.is_object())
            throw ProblemFormatError("field 'quadrature' must be an object");
        QuadratureConfig cfg;
        for (const auto& [key, value] : qj.items()) {
            if (key == "nodes")
                cfg.nodes = static_cast<int>(detail::require_number(value, "quadrature.nodes"));
            else if (key == "panels")
                cfg.panels = static_cast<int>(detail::require_number(value, "quadrature.panels"));
            else if (key == "grade_levels")
                cfg.grade_levels =
                    static_cast<int>(detail::require_number(value, "quadrature.grade_levels"));
            else
                throw ProblemFormatError("quadrature: unknown key '" + key + "'");
        }
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            throw ProblemFormatError(std::string("quadrature: ") + e.what());
        }
        out.quadrature = cfg;
    }
    return out;
}

inline LoadedProblem load_problem(const std::filesystem::path& path) {
    return load_problem_json(detail::parse_json_file(path, "problem file"));
}

inline FracPowerSeries load_trajectory_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
        throw ProblemFormatError(
            "trajectory file must be {\"base\":..., \"terms\":[[c,e],...]}");
    double base = 0.0;
    if (j.contains("base"))
        base = detail::require_number(j["base"], "base");
    std::vector<SeriesTerm> terms;
    for (const auto& tj : j["terms"]) {
        if (!tj.is_array() || tj.size() != 2)
            throw ProblemFormatError("trajectory terms must be [coefficient, exponent] pairs");
        const double c = detail::require_number(tj[0], "terms[][0]");
        const double e = detail::require_number(tj[1], "terms[][1]");
        if (e < 0.0)
            throw ProblemFormatError("trajectory exponents must be >= 0");
        terms.push_back({c, e});
    }
    return FracPowerSeries(base, std::move(terms));
}

inline FracPowerSeries load_trajectory(const std::filesystem::path& path) {
    return load_trajectory_json(detail::parse_json_file(path, "trajectory file"));
}

inline nlohmann::json trajectory_to_json(const FracPowerSeries& x) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : x.terms())
        terms.push_back({t.coefficient, t.exponent});
    return {{"base", x.base()}, {"terms", terms}};
}

inline void save_trajectory(const FracPowerSeries& x, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw ProblemFormatError("cannot write '" + path.string() + "'");
    out << trajectory_to_json(x).dump(2) << "\n";
}

inline nlohmann::json solve_result_to_json(const SolveResult& r) {
    nlohmann::json j;
    j["trajectory"] = trajectory_to_json(r.trajectory);
    j["L"] = r.objective;
    j["F"] = r.term_values;
    j["status"] = to_string(r.status);
    j["certificate"] = r.certificate;
    j["evaluations"] = r.evaluations;
    nlohmann::json res;
    res["sup_norm"] = r.residual.sup_norm;
    res["eps"] = r.residual.eps;
    res["grid_size"] = r.residual.grid_size;
    res["derivative_routes"] = r.residual.derivative_routes;
    if (r.residual.natural_left)
        res["natural_left"] = *r.residual.natural_left;
    if (r.residual.natural_right)
        res["natural_right"] = *r.residual.natural_right;
    j["residual"] = res;
    return j;
}

inline void save_solve_result(const SolveResult& r, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw ProblemFormatError("cannot write '" + path.string() + "'");
    out << solve_result_to_json(r).dump(2) << "\n";
}

} // namespace fracvar

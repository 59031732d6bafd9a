#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fracvar/expr.hpp"
#include "oracles.hpp"

using Catch::Approx;
using fracvar::ExprAst;
using fracvar::differentiate;
using fracvar::evaluate;
using fracvar::parse_expression;
using fracvar::to_string;

namespace {

const std::vector<std::string> kTyv{"t", "y", "v"};

double eval_tyv(const ExprAst& e, double t, double y, double v) {
    const std::array<double, 3> vals{t, y, v};
    return evaluate(e, std::span<const double>(vals));
}

double eval1(const ExprAst& e, double x) {
    const std::array<double, 1> vals{x};
    return evaluate(e, std::span<const double>(vals));
}

} // namespace

TEST_CASE("parse picks up the grammar cases", "[expr]") {
    const ExprAst p = parse_expression("v^2", kTyv);
    REQUIRE(p.kind() == ExprAst::Kind::Pow);
    REQUIRE(p.child(0).kind() == ExprAst::Kind::Variable);
    REQUIRE(p.child(0).name() == "v");
    REQUIRE(p.child(1).is_constant(2.0));
    REQUIRE(eval_tyv(p, 0.0, 0.0, 3.0) == 9.0);

    const ExprAst q = parse_expression("t^(1/2)*v", kTyv);
    REQUIRE(q.kind() == ExprAst::Kind::Mul);
    REQUIRE(eval_tyv(q, 0.25, 0.0, 2.0) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("unknown identifiers are rejected with a position", "[expr]") {
    try {
        parse_expression("z1*w", {"z1", "z2"});
        FAIL("expected ParseError");
    } catch (const fracvar::ParseError& e) {
        REQUIRE(std::string(e.what()).find("\"w\"") != std::string::npos);
        REQUIRE(e.position == 3);
    }
}

TEST_CASE("precedence and associativity", "[expr]") {
    auto val = [](const char* src) {
        return evaluate(parse_expression(src, {}), std::span<const double>{});
    };
    REQUIRE(val("2*3+4*5") == 26.0);
    REQUIRE(val("1-2-3") == -4.0);
    REQUIRE(val("6/2/3") == 1.0);
    REQUIRE(val("2^3^2") == 512.0); // right associative
    REQUIRE(val("-2^2") == -4.0);   // pow binds tighter than unary minus
    REQUIRE(val("(-2)^2") == 4.0);
    REQUIRE(val("2^-1") == 0.5);
    REQUIRE(val(" 1 +  2 * 3 ") == 7.0); // whitespace insensitive
    REQUIRE(val("-(1+2)") == -3.0);
}

TEST_CASE("function calls evaluate through libm", "[expr]") {
    auto val = [](const char* src, double x) {
        return eval1(parse_expression(src, {"x"}), x);
    };
    REQUIRE(val("sqrt(x)", 2.0) == Approx(std::sqrt(2.0)));
    REQUIRE(val("exp(x)", 0.3) == Approx(std::exp(0.3)));
    REQUIRE(val("ln(x)", 2.5) == Approx(std::log(2.5)));
    REQUIRE(val("sin(x) + cos(x)", 0.7) == Approx(std::sin(0.7) + std::cos(0.7)));
    REQUIRE(val("gamma(x)", 4.0) == Approx(6.0).epsilon(1e-13));
}

TEST_CASE("syntax errors carry a message and position", "[expr]") {
    for (const char* bad : {"", "1+", "(1", "1+*2", "sin()", "foo(1)", "1..2", ")"}) {
        REQUIRE_THROWS_AS(parse_expression(bad, kTyv), fracvar::ParseError);
    }
    REQUIRE_THROWS_AS(parse_expression("x", std::vector<std::string>{"x", "x"}),
                      std::invalid_argument);
}

TEST_CASE("differentiate produces the folded canonical partials", "[expr]") {
    const ExprAst dv = differentiate(parse_expression("v^2", kTyv), "v");
    REQUIRE(to_string(dv) == "2*v");

    const std::vector<std::string> zs{"z1", "z2"};
    REQUIRE(to_string(differentiate(parse_expression("z1*z2", zs), "z1")) == "z2");
    REQUIRE(to_string(differentiate(parse_expression("z1/z2", zs), "z1")) == "1/z2");
}

TEST_CASE("derivative of a variable-free tree is the literal 0", "[expr]") {
    for (const char* src : {"gamma(2)*3", "sin(1) + 7", "2^5", "1/4"}) {
        const ExprAst d = differentiate(parse_expression(src, kTyv), "t");
        REQUIRE(d.is_constant(0.0));
    }
}

TEST_CASE("derivatives agree with central finite differences", "[expr]") {
    auto check = [](const char* src, double x, double tol = 1e-6) {
        const ExprAst e = parse_expression(src, {"x"});
        const ExprAst d = differentiate(e, "x");
        const double fd =
            oracles::central_diff([&](double u) { return eval1(e, u); }, x);
        REQUIRE(eval1(d, x) == Approx(fd).margin(tol * std::max(1.0, std::abs(fd))));
    };
    check("x^3", 1.3);
    check("2^x", 1.1);
    check("x^x", 1.7);
    check("sqrt(x)", 0.8);
    check("ln(x*x + 1)", 0.9);
    check("sin(x)*cos(2*x)", 0.4);
    check("exp(x^2)", 0.6);
    check("gamma(x + 1)", 1.2); // exercises the internal digamma node
    check("(x + 1)/(x^2 + 2)", 0.5);
    check("-x^2 + 3*x", 2.0);
}

TEST_CASE("random polynomials: derivative matches finite differences", "[expr]") {
    std::mt19937 rng(99u);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> expo(0, 3);
    std::uniform_real_distribution<double> point(0.1, 2.0);
    const std::vector<std::string> vars{"a", "b", "c"};
    for (int trial = 0; trial < 60; ++trial) {
        // random polynomial: sum of up to 4 monomials in 3 variables
        std::string src;
        for (int m = 0; m < 4; ++m) {
            if (m) src += " + ";
            src += std::to_string(coef(rng));
            for (const auto& v : vars) {
                const int k = expo(rng);
                if (k > 0)
                    src += "*" + v + "^" + std::to_string(k);
            }
        }
        const ExprAst e = parse_expression(src, vars);
        const std::array<double, 3> at{point(rng), point(rng), point(rng)};
        for (std::size_t iv = 0; iv < vars.size(); ++iv) {
            const ExprAst d = differentiate(e, vars[iv]);
            auto f = [&](double u) {
                std::array<double, 3> shifted = at;
                shifted[iv] = u;
                return evaluate(e, std::span<const double>(shifted));
            };
            const double fd = oracles::central_diff(f, at[iv]);
            const double sym = evaluate(d, std::span<const double>(at));
            REQUIRE(sym == Approx(fd).margin(1e-6 * std::max(1.0, std::abs(fd))));
        }
    }
}

TEST_CASE("print/parse fixpoint", "[expr]") {
    std::mt19937 rng(5u);
    std::uniform_real_distribution<double> point(0.1, 2.0);
    const std::vector<const char*> sources{
        "v^2",
        "t^(1/2)*v",
        "-t^2 + 3*t*v - y/2",
        "sin(t)*cos(v) - exp(y)",
        "sqrt(t + 1)/(v^2 + 1)",
        "2^3^2 - (1-2-3)",
        "gamma(t + 2) + ln(y + 1)",
    };
    for (const char* src : sources) {
        const ExprAst e = parse_expression(src, kTyv);
        const std::string printed = to_string(e);
        const ExprAst re = parse_expression(printed, kTyv);
        REQUIRE(to_string(re) == printed); // printing is a fixpoint
        for (int i = 0; i < 100; ++i) {
            const double t = point(rng), y = point(rng), v = point(rng);
            REQUIRE(eval_tyv(re, t, y, v) == eval_tyv(e, t, y, v));
        }
    }
    // derivative trees survive the round trip too
    for (const char* src : sources) {
        const ExprAst d = differentiate(parse_expression(src, kTyv), "v");
        const ExprAst re = parse_expression(to_string(d), kTyv);
        for (int i = 0; i < 20; ++i) {
            const double t = point(rng), y = point(rng), v = point(rng);
            REQUIRE(eval_tyv(re, t, y, v) == eval_tyv(d, t, y, v));
        }
    }
}

TEST_CASE("evaluation domain errors", "[expr]") {
    auto val = [](const char* src, double z2) {
        const ExprAst e = parse_expression(src, {"z1", "z2"});
        const std::array<double, 2> vals{1.0, z2};
        return evaluate(e, std::span<const double>(vals));
    };
    REQUIRE_THROWS_AS(val("1/z2", 0.0), fracvar::EvalError);
    REQUIRE_THROWS_AS(val("ln(z2)", -1.0), fracvar::EvalError);
    REQUIRE_THROWS_AS(val("ln(z2)", 0.0), fracvar::EvalError);
    REQUIRE_THROWS_AS(val("sqrt(z2)", -2.0), fracvar::EvalError);
    REQUIRE_THROWS_AS(val("z2^0.5", -2.0), fracvar::EvalError);
    REQUIRE_THROWS_AS(val("z2^-1", 0.0), fracvar::EvalError);
    REQUIRE_THROWS_AS(val("gamma(z2)", -3.0), fracvar::EvalError);
    REQUIRE(val("z2^3", -2.0) == -8.0); // integer exponents keep negative bases
}

TEST_CASE("name-keyed evaluation", "[expr]") {
    const ExprAst e = parse_expression("t^2 + y*v", kTyv);
    const std::map<std::string, double> bindings{{"t", 2.0}, {"y", 3.0}, {"v", 4.0}};
    REQUIRE(evaluate(e, bindings) == 16.0);
    const std::map<std::string, double> missing{{"t", 2.0}};
    REQUIRE_THROWS_AS(evaluate(e, missing), fracvar::EvalError);
}

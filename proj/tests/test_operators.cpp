#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fracvar/operators.hpp"
#include "oracles.hpp"

using Catch::Approx;
using fracvar::FracPowerSeries;
using fracvar::QuadratureConfig;
using fracvar::SampledFunction;
using fracvar::frac_integral;

TEST_CASE("Gauss-Legendre nodes integrate polynomials exactly", "[operators]") {
    std::vector<double> nodes, weights;
    fracvar::detail::gauss_legendre(4, nodes, weights);
    for (int k = 0; k <= 7; ++k) { // degree <= 2n-1
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * std::pow(nodes[i], k);
        const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
        REQUIRE(acc == Approx(exact).margin(1e-14));
    }
}

TEST_CASE("(dt)^alpha integral of the constant 1", "[operators]") {
    REQUIRE(frac_integral([](double) { return 1.0; }, 0.0, 1.0, 0.5) ==
            Approx(1.0).margin(1e-12));
    REQUIRE(frac_integral([](double) { return 1.0; }, 0.0, 4.0, 0.5) ==
            Approx(2.0).margin(1e-12));
    // t^alpha at the right terminal, generic interval and order
    REQUIRE(frac_integral([](double) { return 1.0; }, 1.5, 2.75, 0.3) ==
            Approx(std::pow(1.25, 0.3)).margin(1e-12));
}

TEST_CASE("(dt)^alpha integral of (b-tau)^p sums stays under 1e-10",
          "[operators]") {
    // closed form: alpha * (b-a)^{p+alpha} / (p+alpha)
    for (double alpha : {0.3, 0.5, 0.9, 1.0}) {
        for (double p : {0.0, 0.3, 0.5, 1.0, 1.7, 2.5, 5.0}) {
            const double a = 1.0, b = 3.7;
            const double got = frac_integral(
                [&](double t) { return std::pow(b - t, p); }, a, b, alpha);
            const double want = alpha * std::pow(b - a, p + alpha) / (p + alpha);
            // A fractional power of (b-tau) concentrates alpha*ulp(b)^(alpha+p)
            // /(alpha+p) of its mass inside the final ulp before b, where a
            // tau-valued callback cannot see it. That floor only rises above
            // 1e-10 for small alpha+p; p = 0 is exempt (constant integrand).
            const double floor =
                p == 0.0 ? 0.0
                         : alpha * std::pow(4.5e-16, alpha + p) / (alpha + p);
            const double tol = floor > 1e-10 ? 2.0 * floor : 1e-10;
            INFO("alpha=" << alpha << " p=" << p);
            REQUIRE(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("(dt)^alpha integral of (tau-a)^p against the Beta oracle",
          "[operators]") {
    REQUIRE(frac_integral([](double t) { return std::sqrt(t); }, 0.0, 1.0, 0.5) ==
            Approx(M_PI / 4.0).margin(1e-9));
    for (double alpha : {0.3, 0.5, 1.0}) {
        for (double p : {0.5, 1.0, 1.5, 2.5}) {
            const double a = 0.5, b = 2.0;
            const double got = frac_integral(
                [&](double t) { return std::pow(t - a, p); }, a, b, alpha);
            const double want = oracles::power_frac_integral(p, alpha, b - a);
            INFO("alpha=" << alpha << " p=" << p);
            REQUIRE(got == Approx(want).margin(1e-9 * std::max(1.0, want)));
        }
    }
}

TEST_CASE("frac_integral is linear and positive", "[operators]") {
    std::mt19937 rng(23u);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    auto f = [](double t) { return 1.0 + t * t; };
    auto g = [](double t) { return std::sqrt(t) - 0.25 * t; };
    for (int trial = 0; trial < 25; ++trial) {
        const double c1 = coef(rng), c2 = coef(rng);
        const double lhs = frac_integral(
            [&](double t) { return c1 * f(t) + c2 * g(t); }, 0.0, 1.0, 0.5);
        const double rhs = c1 * frac_integral(f, 0.0, 1.0, 0.5) +
                           c2 * frac_integral(g, 0.0, 1.0, 0.5);
        REQUIRE(std::abs(lhs - rhs) <= 1e-12);
    }
    REQUIRE(frac_integral([](double t) { return std::sqrt(t); }, 0.0, 2.0, 0.7) >=
            0.0);
}

TEST_CASE("fundamental theorem on the power class", "[operators]") {
    std::mt19937 rng(31u);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (double alpha : {0.3, 0.5, 0.8}) {
        for (double b : {1.0, 2.5}) {
            for (int trial = 0; trial < 10; ++trial) {
                // smallest exponent >= alpha keeps x^(alpha) continuous
                const FracPowerSeries x(
                    0.0, {{coef(rng), std::max(alpha, 0.5)}, {coef(rng), 1.0},
                          {coef(rng), 1.5}, {coef(rng), 2.0}});
                const double lhs =
                    frac_integral(fracvar::frac_derivative(x, alpha), 0.0, b, alpha);
                const double rhs = fracvar::alpha_factorial(alpha) * (x(b) - x(0.0));
                INFO("alpha=" << alpha << " b=" << b);
                REQUIRE(std::abs(lhs - rhs) <= 1e-9);
            }
        }
    }
}

TEST_CASE("alpha = 1 reduces to the classical integral", "[operators]") {
    const double got = frac_integral([](double t) { return std::sin(t); }, 0.0, 2.0, 1.0);
    REQUIRE(got == Approx(1.0 - std::cos(2.0)).epsilon(1e-12));
}

TEST_CASE("frac_integral argument validation", "[operators]") {
    auto one = [](double) { return 1.0; };
    REQUIRE_THROWS_AS(frac_integral(one, 1.0, 1.0, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(frac_integral(one, 2.0, 1.0, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(frac_integral(one, 0.0, 1.0, 0.0), std::domain_error);
    REQUIRE_THROWS_AS(frac_integral(one, 0.0, 1.0, 1.5), std::domain_error);
    QuadratureConfig bad;
    bad.nodes = 1;
    REQUIRE_THROWS_AS(frac_integral(one, 0.0, 1.0, 0.5, bad), std::invalid_argument);
    bad = QuadratureConfig{};
    bad.panels = 0;
    REQUIRE_THROWS_AS(frac_integral(one, 0.0, 1.0, 0.5, bad), std::invalid_argument);
}

TEST_CASE("panel refinement changes accurate results below 1e-9", "[operators]") {
    QuadratureConfig doubled;
    doubled.panels = 16;
    auto f = [](double t) { return std::sqrt(t) * (1.0 - t) + t * t; };
    const double base = frac_integral(f, 0.0, 1.0, 0.5);
    const double fine = frac_integral(f, 0.0, 1.0, 0.5, doubled);
    REQUIRE(std::abs(base - fine) <= 1e-9);
}

TEST_CASE("sampled derivative of a constant is identically zero", "[operators]") {
    const SampledFunction f =
        fracvar::sample_function([](double) { return 7.0; }, 0.0, 1.0, 101);
    const SampledFunction g = fracvar::frac_derivative(f, 0.5);
    for (double v : g.values)
        REQUIRE(v == 0.0);
}

TEST_CASE("sampled derivative of f(t) = t tracks the power rule", "[operators]") {
    const SampledFunction f =
        fracvar::sample_function([](double t) { return t; }, 0.0, 1.0, 1001);
    const SampledFunction g = fracvar::frac_derivative(f, 0.5);
    const double c = 1.0 / std::tgamma(1.5);
    for (std::size_t j = 0; j < g.values.size(); ++j) {
        const double t = g.base + g.step * static_cast<double>(j);
        if (t < 0.1) continue;
        const double ref = c * std::sqrt(t);
        REQUIRE(std::abs(g.values[j] - ref) <= 1e-2 * ref);
    }
}

TEST_CASE("sampled derivative of t^{1/2} approaches the constant", "[operators]") {
    const SampledFunction f =
        fracvar::sample_function([](double t) { return std::sqrt(t); }, 0.0, 1.0, 1001);
    const SampledFunction g = fracvar::frac_derivative(f, 0.5);
    const double ref = std::tgamma(1.5);
    for (std::size_t j = 0; j < g.values.size(); ++j) {
        const double t = g.base + g.step * static_cast<double>(j);
        if (t < 0.1) continue;
        REQUIRE(std::abs(g.values[j] - ref) <= 5e-2 * ref);
    }
}

TEST_CASE("sampled derivative convergence: halving h gains at least 2^1.3",
          "[operators]") {
    auto max_err = [](std::size_t count) {
        const SampledFunction f =
            fracvar::sample_function([](double t) { return t; }, 0.0, 1.0, count);
        const SampledFunction g = fracvar::frac_derivative(f, 0.5);
        double worst = 0.0;
        for (std::size_t j = 0; j < count; ++j) {
            const double t = g.base + g.step * static_cast<double>(j);
            if (t < 0.1 - 1e-12) continue;
            worst = std::max(worst,
                             std::abs(g.values[j] - std::sqrt(t) / std::tgamma(1.5)));
        }
        return worst;
    };
    REQUIRE(max_err(101) / max_err(201) >= std::pow(2.0, 1.3));
}

TEST_CASE("sampled derivative input validation", "[operators]") {
    SampledFunction tiny{0.0, 0.1, {1.0, 2.0}};
    REQUIRE_THROWS_AS(fracvar::frac_derivative(tiny, 0.5), std::invalid_argument);
    const SampledFunction f =
        fracvar::sample_function([](double t) { return t; }, 0.0, 1.0, 11);
    REQUIRE_THROWS_AS(fracvar::frac_derivative(f, 1.0), std::domain_error);
    REQUIRE_THROWS_AS(fracvar::frac_derivative(f, 0.0), std::domain_error);
}

TEST_CASE("classical derivative stencils are second order", "[operators]") {
    const SampledFunction f = fracvar::sample_function(
        [](double t) { return std::sin(t); }, 0.0, 2.0, 2001);
    const SampledFunction g = fracvar::classical_derivative(f);
    for (std::size_t j = 0; j < g.values.size(); j += 97) {
        const double t = g.base + g.step * static_cast<double>(j);
        REQUIRE(g.values[j] == Approx(std::cos(t)).margin(5e-6));
    }
}

TEST_CASE("integration by parts diagnostic", "[operators]") {
    const FracPowerSeries one(0.0, {{1.0, 0.0}});
    const FracPowerSeries ident(0.0, {{1.0, 1.0}});

    SECTION("one constant factor reduces to the fundamental theorem") {
        REQUIRE(std::abs(fracvar::check_integration_by_parts(one, ident, 0.5, 0.0,
                                                             1.0)) <= 1e-9);
    }
    SECTION("two constant factors give an exactly zero defect") {
        const FracPowerSeries c(0.0, {{3.0, 0.0}});
        REQUIRE(fracvar::check_integration_by_parts(c, c, 0.5, 0.0, 1.0) == 0.0);
    }
    SECTION("u = v = t carries the known nonzero defect sqrt(pi)/4") {
        const double defect =
            fracvar::check_integration_by_parts(ident, ident, 0.5, 0.0, 1.0);
        REQUIRE(defect == Approx(std::sqrt(M_PI) / 4.0).margin(1e-9));
        REQUIRE(defect == Approx(0.4431127).margin(1e-6));
    }
    SECTION("alpha = 1 makes the formula exact on smooth factors") {
        const FracPowerSeries u(0.0, {{1.0, 1.0}, {0.5, 2.0}});
        const FracPowerSeries v(0.0, {{2.0, 1.0}});
        REQUIRE(std::abs(fracvar::check_integration_by_parts(u, v, 1.0, 0.0, 1.0)) <=
                1e-12);
    }
}

TEST_CASE("SampledFunction interpolation", "[operators]") {
    const SampledFunction f =
        fracvar::sample_function([](double t) { return 2.0 * t; }, 0.0, 1.0, 11);
    REQUIRE(f(0.05) == Approx(0.1).margin(1e-15));
    REQUIRE(f(1.0) == Approx(2.0));
    REQUIRE(f.end() == Approx(1.0));
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fracvar/operators.hpp"
#include "fracvar/trajectory.hpp"
#include "oracles.hpp"

using Catch::Approx;
using fracvar::FracPowerSeries;
using fracvar::SeriesTerm;

TEST_CASE("evaluation of fractional power series", "[trajectory]") {
    const FracPowerSeries x(0.0, {{1.0, 0.5}});
    REQUIRE(x(0.25) == 0.5);

    // the rounded candidate of the product problem: x(1) must be exactly 1
    const FracPowerSeries cand(0.0, {{1.5346280, 0.5}, {-0.5346280, 1.0}});
    REQUIRE(cand(1.0) == 1.0);

    REQUIRE(FracPowerSeries::zero(0.0)(0.7) == 0.0);

    const FracPowerSeries shifted(1.0, {{3.0, 0.0}, {2.0, 2.0}});
    REQUIRE(shifted(1.0) == 3.0); // 0^0 convention for the constant term
    REQUIRE(shifted(2.0) == 5.0);
    REQUIRE_THROWS_AS(shifted(0.5), std::domain_error);
}

TEST_CASE("series normalization merges and sorts", "[trajectory]") {
    const FracPowerSeries x(0.0, {{2.0, 0.5 + 1e-13}, {1.0, 0.5}, {0.0, 3.0}});
    REQUIRE(x.terms().size() == 1);
    REQUIRE(x.terms()[0].coefficient == Approx(3.0));
    REQUIRE(x.terms()[0].exponent == 0.5);
}

TEST_CASE("termwise fractional derivative", "[trajectory]") {
    SECTION("constants vanish") {
        const FracPowerSeries c(0.0, {{7.0, 0.0}});
        REQUIRE(fracvar::frac_derivative(c, 0.5).empty());
    }
    SECTION("sqrt trajectory maps to the constant Gamma(1.5)") {
        const FracPowerSeries x(0.0, {{1.0, 0.5}});
        const auto d = fracvar::frac_derivative(x, 0.5);
        REQUIRE(d.terms().size() == 1);
        REQUIRE(d.terms()[0].coefficient == Approx(std::tgamma(1.5)).epsilon(1e-14));
        REQUIRE(d.terms()[0].exponent == 0.0);
    }
    SECTION("candidate series, termwise gamma ratios") {
        const FracPowerSeries x(0.0, {{1.5346280, 0.5}, {-0.5346280, 1.0}});
        const auto d = fracvar::frac_derivative(x, 0.5);
        REQUIRE(d.terms().size() == 2);
        REQUIRE(d.terms()[0].exponent == 0.0);
        REQUIRE(d.terms()[0].coefficient ==
                Approx(1.5346280 * oracles::power_rule_coefficient(0.5, 0.5))
                    .epsilon(1e-12));
        REQUIRE(d.terms()[1].exponent == 0.5);
        REQUIRE(d.terms()[1].coefficient ==
                Approx(-0.5346280 * oracles::power_rule_coefficient(1.0, 0.5))
                    .epsilon(1e-12));
    }
    SECTION("order 1 of {(c, 1)} is {(c, 0)} exactly") {
        const FracPowerSeries x(0.0, {{3.25, 1.0}});
        const auto d = fracvar::frac_derivative(x, 1.0);
        REQUIRE(d.terms().size() == 1);
        REQUIRE(d.terms()[0].coefficient == 3.25);
        REQUIRE(d.terms()[0].exponent == 0.0);
    }
    SECTION("exponents below the order go singular and are flagged") {
        const FracPowerSeries x(0.0, {{1.0, 0.3}});
        const auto d = fracvar::frac_derivative(x, 0.5);
        REQUIRE(d.has_singular_terms());
        REQUIRE(d.terms()[0].exponent == Approx(-0.2));
        REQUIRE_THROWS_AS(fracvar::frac_derivative(d, 0.5), std::domain_error);
    }
}

TEST_CASE("fractional derivative is linear", "[trajectory]") {
    std::mt19937 rng(3u);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> pick(0.5, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const FracPowerSeries x(0.0, {{coef(rng), pick(rng)}, {coef(rng), 3.5}});
        const FracPowerSeries y(0.0, {{coef(rng), pick(rng)}, {coef(rng), 4.0}});
        const double c = coef(rng);
        const double alpha = 0.1 + 0.8 * std::abs(coef(rng)) / 2.0;
        const auto lhs =
            fracvar::frac_derivative(fracvar::add(fracvar::scale(x, c), y), alpha);
        const auto rhs = fracvar::add(
            fracvar::scale(fracvar::frac_derivative(x, alpha), c),
            fracvar::frac_derivative(y, alpha));
        for (double t : {0.2, 0.7, 1.3}) {
            const double want = rhs(t);
            REQUIRE(lhs(t) ==
                    Approx(want).margin(1e-14 * std::max(1.0, std::abs(want))));
        }
    }
}

TEST_CASE("exact derivative agrees with the sampled scheme", "[trajectory]") {
    const FracPowerSeries x(0.0, {{1.0, 1.0}}); // x = t
    const auto exact = fracvar::frac_derivative(x, 0.5);
    const auto sampled = fracvar::frac_derivative(
        fracvar::sample_function([&](double t) { return x(t); }, 0.0, 1.0, 1001), 0.5);
    for (double t = 0.1; t <= 1.0; t += 0.045) {
        const double ref = exact(t);
        REQUIRE(std::abs(sampled(t) - ref) <= 1e-2 * std::abs(ref));
    }
}

TEST_CASE("trajectory norm", "[trajectory]") {
    SECTION("sqrt trajectory on [0,1], order 1/2") {
        const FracPowerSeries x(0.0, {{1.0, 0.5}});
        const double orders[] = {0.5};
        const double n = fracvar::trajectory_norm(x, orders, 0.0, 1.0);
        REQUIRE(n == Approx(1.0 + std::tgamma(1.5)).epsilon(1e-9));
        REQUIRE(n == Approx(1.8862269).margin(1e-6));
    }
    SECTION("zero trajectory") {
        const double orders[] = {0.5, 1.0};
        REQUIRE(fracvar::trajectory_norm(FracPowerSeries::zero(0.0), orders, 0.0,
                                         1.0) == 0.0);
    }
    SECTION("line on [0,1], order 1") {
        const FracPowerSeries x(0.0, {{1.0, 1.0}});
        const double orders[] = {1.0};
        REQUIRE(fracvar::trajectory_norm(x, orders, 0.0, 1.0) ==
                Approx(2.0).epsilon(1e-12));
    }
    SECTION("interior maximum is refined, not just sampled") {
        // x = t - t^2 peaks at 1/4 between grid points
        const FracPowerSeries x(0.0, {{1.0, 1.0}, {-1.0, 2.0}});
        REQUIRE(fracvar::trajectory_norm(x, {}, 0.0, 1.0) ==
                Approx(0.25).epsilon(1e-10));
    }
    SECTION("singular derivative reports an infinite norm") {
        const FracPowerSeries x(0.0, {{1.0, 0.3}});
        const double orders[] = {0.5};
        REQUIRE(std::isinf(fracvar::trajectory_norm(x, orders, 0.0, 1.0)));
    }
}

TEST_CASE("constrain_endpoints", "[trajectory]") {
    SECTION("both endpoints: last coefficient eliminated") {
        const double free[] = {1.5346280};
        const double exps[] = {0.5, 1.0};
        const auto x = fracvar::constrain_endpoints(free, exps, 0.0, 1.0, 0.0, 1.0);
        REQUIRE(x.terms().size() == 2);
        REQUIRE(x.terms()[0].coefficient == Approx(1.5346280));
        REQUIRE(x.terms()[1].coefficient == Approx(-0.5346280));
        REQUIRE(x(0.0) == 0.0);
        REQUIRE(x(1.0) == Approx(1.0).margin(1e-15));
    }
    SECTION("no free coefficients: the line") {
        const double exps[] = {1.0};
        const auto x = fracvar::constrain_endpoints({}, exps, 0.0, 1.0, 0.0, 1.0);
        REQUIRE(x.terms().size() == 1);
        REQUIRE(x.terms()[0].coefficient == 1.0);
        REQUIRE(x.terms()[0].exponent == 1.0);
    }
    SECTION("free right endpoint keeps the basis free") {
        const double free[] = {2.0};
        const double exps[] = {0.5};
        const auto x = fracvar::constrain_endpoints(free, exps, 0.0, 1.0, 3.0,
                                                    std::nullopt);
        REQUIRE(x.terms().size() == 2);
        REQUIRE(x(0.0) == 3.0);
        REQUIRE(x.terms()[1].coefficient == 2.0);
    }
    SECTION("free left endpoint turns the constant into a coefficient") {
        const double free[] = {4.0, 1.0};
        const double exps[] = {1.0, 2.0};
        const auto x = fracvar::constrain_endpoints(free, exps, 0.0, 2.0,
                                                    std::nullopt, 6.0);
        REQUIRE(x(0.0) == 4.0);
        REQUIRE(x(2.0) == Approx(6.0).margin(1e-14));
    }
    SECTION("coefficient count must match") {
        const double exps[] = {0.5, 1.0};
        const double one[] = {1.0};
        REQUIRE_THROWS_AS(
            fracvar::constrain_endpoints({}, exps, 0.0, 1.0, 0.0, 1.0),
            std::invalid_argument);
        REQUIRE_THROWS_AS(
            fracvar::constrain_endpoints(one, exps, 0.0, 1.0, std::nullopt, 1.0),
            std::invalid_argument);
    }
    SECTION("random problems satisfy the endpoint equations to 1e-12") {
        std::mt19937 rng(17u);
        std::uniform_real_distribution<double> coef(-3.0, 3.0);
        for (int trial = 0; trial < 100; ++trial) {
            const double a = coef(rng), len = 0.5 + std::abs(coef(rng));
            const double left = coef(rng), right = coef(rng);
            const double exps[] = {0.5, 1.0, 1.7};
            const double free[] = {coef(rng), coef(rng)};
            const auto x =
                fracvar::constrain_endpoints(free, exps, a, a + len, left, right);
            REQUIRE(std::abs(x(a) - left) <= 1e-12);
            REQUIRE(std::abs(x(a + len) - right) <=
                    1e-12 * std::max(1.0, std::abs(right)));
        }
    }
}

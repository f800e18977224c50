#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hfde/models.hpp"
#include "hfde/oracles.hpp"

using hfde::FractionalSystem;
using hfde::Grid;

namespace {

constexpr double kInvGamma15 = 1.12837916709551257390;   // 1 / Gamma(1.5)
constexpr double kInvGamma25 = 0.752252778063675049264;  // 1 / Gamma(2.5)

FractionalSystem scalar_system(double order, std::vector<double> init, hfde::RhsFn f,
                               double T = 1.0) {
    FractionalSystem sys;
    sys.name = "scalar";
    sys.stateNames = {"y"};
    sys.orders = {order};
    sys.initData = {std::move(init)};
    sys.rhs = {std::move(f)};
    sys.T = T;
    sys.validate();
    return sys;
}

}  // namespace

TEST_CASE("rk4 reproduces the exponential") {
    FractionalSystem sys =
        scalar_system(1.0, {1.0}, [](double, std::span<const double> y) { return y[0]; });
    hfde::OracleResult result = hfde::rk4_solve(sys, Grid(1000, 1.0));
    CHECK(result.method == "rk4");
    REQUIRE(result.nodes.size() == 1001);
    double worst = 0.0;
    for (std::size_t j = 0; j <= 1000; ++j)
        worst = std::max(worst, std::abs(result.nodes[j][0] - std::exp(result.grid.node(j))));
    CHECK(worst <= 1e-12);

    // End value at h = 0.002, and a vanishing right-hand side stays put.
    hfde::OracleResult coarse = hfde::rk4_solve(sys, Grid(500, 1.0));
    CHECK(std::abs(coarse.nodes[500][0] - 2.718281828) <= 1e-9);
    FractionalSystem still =
        scalar_system(1.0, {3.0}, [](double, std::span<const double>) { return 0.0; });
    hfde::OracleResult flat = hfde::rk4_solve(still, Grid(10, 1.0));
    for (const auto& node : flat.nodes)
        CHECK(node[0] == 3.0);
}

TEST_CASE("rk4 tracks the linear two-state benchmark") {
    FractionalSystem sys = hfde::get_model("example-6.2");
    hfde::OracleResult result = hfde::rk4_solve(sys, Grid(500, 1.0));
    double worst = 0.0;
    for (std::size_t j = 0; j <= 500; ++j) {
        const double t = result.grid.node(j);
        worst = std::max(worst, std::abs(result.nodes[j][0] - std::exp(t) * std::sin(t)));
        worst = std::max(worst, std::abs(result.nodes[j][1] - std::exp(t) * std::cos(t)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("rk4 refuses fractional orders") {
    CHECK_THROWS_AS(hfde::rk4_solve(hfde::get_model("example-6.1"), Grid(10, 1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(hfde::rk4_solve(hfde::get_model("example-6.3"), Grid(10, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("predictor-corrector at order 1 reproduces the exponential") {
    FractionalSystem sys =
        scalar_system(1.0, {1.0}, [](double, std::span<const double> y) { return y[0]; });
    hfde::OracleResult result = hfde::pece_solve(sys, Grid(1000, 1.0));
    CHECK(result.method == "pece");
    double worst = 0.0;
    for (std::size_t j = 0; j <= 1000; ++j)
        worst = std::max(worst, std::abs(result.nodes[j][0] - std::exp(result.grid.node(j))));
    CHECK(worst <= 1e-5);
}

TEST_CASE("predictor-corrector solves a constant-force half-order problem") {
    // D^0.5 y = 1 with y(0) = 0 has the closed form t^0.5 / Gamma(1.5).
    FractionalSystem sys =
        scalar_system(0.5, {0.0}, [](double, std::span<const double>) { return 1.0; });
    hfde::OracleResult result = hfde::pece_solve(sys, Grid(200, 1.0));
    double worst = 0.0;
    for (std::size_t j = 0; j <= 200; ++j) {
        const double t = result.grid.node(j);
        worst = std::max(worst, std::abs(result.nodes[j][0] - std::sqrt(t) * kInvGamma15));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("extra corrector sweeps converge geometrically") {
    FractionalSystem sys = hfde::get_model("example-6.3");
    Grid g(200, 1.0);
    auto gap = [&](int a, int b) {
        hfde::OracleResult ra = hfde::pece_solve(sys, g, a);
        hfde::OracleResult rb = hfde::pece_solve(sys, g, b);
        double worst = 0.0;
        for (std::size_t j = 0; j <= g.m; ++j)
            for (std::size_t i = 0; i < 3; ++i)
                worst = std::max(worst, std::abs(ra.nodes[j][i] - rb.nodes[j][i]));
        return worst;
    };
    const double g13 = gap(1, 3);
    const double g35 = gap(3, 5);
    const double g510 = gap(5, 10);
    CHECK(g13 > 0.0);  // the sweeps genuinely differ
    CHECK(g13 <= 0.15);  // ~0.6% of the z trajectory on this coarse grid
    CHECK(g35 < 0.1 * g13);
    CHECK(g510 < 0.1 * g35);
    CHECK(g510 <= 1e-4);

    CHECK_THROWS_AS(hfde::pece_solve(sys, g, 0), std::invalid_argument);
    CHECK_THROWS_AS(hfde::pece_solve(sys, g, 11), std::invalid_argument);
}

TEST_CASE("the two oracles agree on an integer-order system") {
    FractionalSystem sys = hfde::get_model("example-6.3", {}, {{1.0, 1.0, 1.0}});
    Grid g(1000, 1.0);
    hfde::OracleResult pc = hfde::pece_solve(sys, g);
    hfde::OracleResult rk = hfde::rk4_solve(sys, g);
    double worst = 0.0;
    for (std::size_t j = 0; j <= g.m; ++j)
        for (std::size_t i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(pc.nodes[j][i] - rk.nodes[j][i]));
    CHECK(worst <= 1e-4);
}

TEST_CASE("oracles propagate non-finite right-hand sides as model errors") {
    FractionalSystem sys = scalar_system(
        1.0, {0.0}, [](double t, std::span<const double>) { return std::sqrt(t - 0.5); });
    CHECK_THROWS_AS(hfde::rk4_solve(sys, Grid(10, 1.0)), hfde::ModelError);
    CHECK_THROWS_AS(hfde::pece_solve(sys, Grid(10, 1.0)), hfde::ModelError);
}

TEST_CASE("closed-form solutions") {
    hfde::ExactSolution benchmark = hfde::exact_solution("example-6.2");
    REQUIRE(benchmark.states.size() == 2);
    CHECK(benchmark.states[0](0.0) == 0.0);
    CHECK(benchmark.states[1](0.0) == 1.0);
    CHECK(benchmark.states[0](1.0) == doctest::Approx(std::exp(1.0) * std::sin(1.0)));

    hfde::ExactSolution sum = hfde::exact_solution("eq-20-sum");
    REQUIRE(sum.states.size() == 1);
    CHECK(sum.states[0](1.0) == doctest::Approx(17.0 / 24.0).epsilon(1e-15));

    hfde::ExactSolution integral = hfde::exact_solution("frac-integral-of-t", 0.5);
    CHECK(integral.states[0](1.0) == doctest::Approx(kInvGamma25).epsilon(1e-15));

    CHECK_THROWS_AS(hfde::exact_solution("nope"), std::invalid_argument);
    try {
        hfde::exact_solution("nope");
    } catch (const std::invalid_argument& err) {
        CHECK(std::string(err.what()).find("known:") != std::string::npos);
    }
}

TEST_CASE("error reports") {
    const std::vector<std::vector<double>> a = {{0.0, 0.0}, {1.0, 2.0}};
    const std::vector<std::vector<double>> b = {{0.0, 0.0}, {1.0, 2.5}};
    hfde::ErrorReport report = hfde::error_report(a, b);
    CHECK(report.absErrors[0][0] == 0.0);
    CHECK(report.absErrors[1][1] == 0.5);
    CHECK(report.infNorms[0] == 0.0);
    CHECK(report.infNorms[1] == 0.5);
    CHECK(report.pctErrorAtEnd[0] == 0.0);
    CHECK(report.pctErrorAtEnd[1] == doctest::Approx(20.0).epsilon(1e-15));

    // Comparing a trajectory against itself is identically zero even where
    // the reference value is zero.
    hfde::ErrorReport self = hfde::error_report(a, a);
    CHECK(self.infNorms[0] == 0.0);
    CHECK(self.pctErrorAtEnd[0] == 0.0);

    const std::vector<std::vector<double>> shorter = {{0.0, 0.0}};
    CHECK_THROWS_AS(hfde::error_report(a, shorter), std::invalid_argument);
    const std::vector<std::vector<double>> ragged = {{0.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(hfde::error_report(a, ragged), std::invalid_argument);
}

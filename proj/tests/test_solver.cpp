#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfde/models.hpp"
#include "hfde/oracles.hpp"
#include "hfde/solver.hpp"

using hfde::ContractionReport;
using hfde::FractionalSystem;
using hfde::SolveConfig;
using hfde::SolveMode;
using hfde::SolveResult;

namespace {

constexpr double kInvGamma15 = 1.12837916709551257390;  // 1 / Gamma(1.5)

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

template <typename F>
std::string thrown_message(F&& f) {
    try {
        f();
    } catch (const std::exception& err) {
        return err.what();
    }
    return "";
}

}  // namespace

TEST_CASE("a unit derivative yields the grid nodes bit-exactly") {
    FractionalSystem sys =
        scalar_system(1.0, {0.0}, [](double, std::span<const double>) { return 1.0; });
    SolveConfig cfg;
    cfg.m = 8;  // h = 0.125 is a binary fraction
    SolveResult result = hfde::solve_hf(sys, cfg);
    for (std::size_t j = 0; j <= 8; ++j)
        CHECK(result.nodes[j][0] == result.grid.node(j));
}

TEST_CASE("a zero right-hand side keeps the initial value bit-exactly") {
    FractionalSystem sys =
        scalar_system(0.5, {5.0}, [](double, std::span<const double>) { return 0.0; });
    SolveConfig cfg;
    cfg.m = 16;
    SolveResult result = hfde::solve_hf(sys, cfg);
    for (std::size_t j = 0; j <= 16; ++j)
        CHECK(result.nodes[j][0] == 5.0);
    CHECK(result.diagnostics.contraction.verdict == ContractionReport::Verdict::Degenerate);
}

TEST_CASE("constant force at half order has the closed-form power solution") {
    FractionalSystem sys =
        scalar_system(0.5, {0.0}, [](double, std::span<const double>) { return 1.0; });
    SolveConfig cfg;
    cfg.m = 100;
    SolveResult result = hfde::solve_hf(sys, cfg);
    double worst = 0.0;
    for (std::size_t j = 0; j <= 100; ++j) {
        const double t = result.grid.node(j);
        worst = std::max(worst, std::abs(result.nodes[j][0] - std::sqrt(t) * kInvGamma15));
    }
    CHECK(worst <= 1e-14);
}

TEST_CASE("first-order exponential growth") {
    FractionalSystem sys =
        scalar_system(1.0, {1.0}, [](double, std::span<const double> y) { return y[0]; });
    SolveConfig cfg;
    cfg.m = 1000;
    SolveResult result = hfde::solve_hf(sys, cfg);
    double worst = 0.0;
    for (std::size_t j = 0; j <= 1000; ++j)
        worst = std::max(worst, std::abs(result.nodes[j][0] - std::exp(result.grid.node(j))));
    CHECK(worst <= 1e-5);
}

TEST_CASE("linear benchmark error norms at h = 1/10") {
    FractionalSystem sys = hfde::get_model("example-6.2");
    SolveConfig cfg;
    cfg.m = 10;
    SolveResult result = hfde::solve_hf(sys, cfg);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t j = 0; j <= 10; ++j) {
        const double t = result.grid.node(j);
        e1 = std::max(e1, std::abs(result.nodes[j][0] - std::exp(t) * std::sin(t)));
        e2 = std::max(e2, std::abs(result.nodes[j][1] - std::exp(t) * std::cos(t)));
    }
    // Pinned reference norms for this discretization, matched to 6 digits.
    CHECK(std::abs(e1 - 1.387236644377e-3) <= 5e-7 * 1.387236644377e-3);
    CHECK(std::abs(e2 - 6.249545001395e-3) <= 5e-7 * 6.249545001395e-3);
}

TEST_CASE("derivative-order initial data enters through the Taylor shift") {
    std::vector<double> data = {0.5, 1.0, -2.0};
    hfde::ShiftPolynomial shift(data);
    CHECK(shift.coefficients()[0] == 0.5);
    CHECK(shift.coefficients()[1] == 1.0);
    CHECK(shift.coefficients()[2] == -1.0);  // -2 / 2!
    CHECK(shift(0.0) == 0.5);
    CHECK(shift(0.3) == doctest::Approx(0.5 + 0.3 - 0.09).epsilon(1e-15));

    FractionalSystem sys = hfde::get_model("example-6.1");
    std::vector<hfde::ShiftPolynomial> shifts = hfde::initial_shift(sys);
    REQUIRE(shifts.size() == 2);
    // y1 carries (0, 1): shift = t.
    CHECK(shifts[0](0.4) == doctest::Approx(0.4).epsilon(1e-15));
    // y2 carries (0, 1, 1): shift = t + t^2/2.
    CHECK(shifts[1](0.4) == doctest::Approx(0.4 + 0.08).epsilon(1e-15));

    const std::vector<double> empty;
    CHECK_THROWS_AS(hfde::ShiftPolynomial{std::span<const double>(empty)},
                    std::invalid_argument);
}

TEST_CASE("mixed-order system tracks the predictor-corrector oracle") {
    FractionalSystem sys = hfde::get_model("example-6.1");
    SolveConfig cfg;
    cfg.m = 1000;
    SolveResult result = hfde::solve_hf(sys, cfg);

    // End values pinned from an independent discretization of the same system.
    CHECK(std::abs(result.nodes[1000][0] - 2.21348029) <= 1e-6);
    CHECK(std::abs(result.nodes[1000][1] - 2.30079043) <= 1e-6);

    hfde::OracleResult oracle = hfde::pece_solve(sys, result.grid);
    for (std::size_t i = 0; i < 2; ++i) {
        double dev = 0.0, scale = 0.0;
        for (std::size_t j = 0; j <= 1000; ++j) {
            dev = std::max(dev, std::abs(result.nodes[j][i] - oracle.nodes[j][i]));
            scale = std::max(scale, std::abs(oracle.nodes[j][i]));
        }
        CHECK(dev / scale <= 1e-5);
    }

    // Orders above 1 are outside the contraction theorem.
    CHECK(result.diagnostics.contraction.verdict == ContractionReport::Verdict::NotApplicable);
    CHECK(result.diagnostics.contraction.note.find("(0, 1]") != std::string::npos);
}

TEST_CASE("marching and global solves agree") {
    for (const char* name : {"example-6.1", "example-6.2", "example-6.3"}) {
        FractionalSystem sys = hfde::get_model(name);
        SolveConfig cfg;
        cfg.m = 50;
        cfg.newtonTol = 1e-13;
        SolveResult march = hfde::solve_hf(sys, cfg);
        cfg.mode = SolveMode::GlobalFixedPoint;
        SolveResult global = hfde::solve_hf(sys, cfg);

        CHECK(march.diagnostics.mode == SolveMode::Marching);
        CHECK(global.diagnostics.mode == SolveMode::GlobalFixedPoint);
        CHECK(global.diagnostics.newtonIters.size() == 1);

        double worst = 0.0;
        for (std::size_t j = 0; j <= 50; ++j)
            for (std::size_t i = 0; i < sys.size(); ++i)
                worst = std::max(worst, std::abs(march.nodes[j][i] - global.nodes[j][i]));
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("interpolated evaluation between nodes") {
    FractionalSystem sys =
        scalar_system(1.0, {0.0}, [](double, std::span<const double>) { return 1.0; });
    SolveConfig cfg;
    cfg.m = 8;
    SolveResult result = hfde::solve_hf(sys, cfg);
    // y = t is piecewise linear, so the reconstruction is exact off-node too.
    CHECK(result.y_value(0, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(result.y_value(0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(result.y_value(1, 0.5), std::invalid_argument);
}

TEST_CASE("solver configuration validation messages are distinct") {
    FractionalSystem sys =
        scalar_system(1.0, {0.0}, [](double, std::span<const double>) { return 1.0; });

    SolveConfig both;
    both.m = 8;
    both.h = 0.125;
    CHECK(thrown_message([&] { hfde::solve_hf(sys, both); }).find("not both") !=
          std::string::npos);

    SolveConfig neither;
    CHECK(thrown_message([&] { hfde::solve_hf(sys, neither); }).find("grid unspecified") !=
          std::string::npos);

    SolveConfig badTol;
    badTol.m = 8;
    badTol.newtonTol = 0.0;
    CHECK(thrown_message([&] { hfde::solve_hf(sys, badTol); }).find("newtonTol") !=
          std::string::npos);

    SolveConfig badIters;
    badIters.m = 8;
    badIters.maxNewtonIters = 0;
    CHECK(thrown_message([&] { hfde::solve_hf(sys, badIters); }).find("maxNewtonIters") !=
          std::string::npos);

    SolveConfig badStep;
    badStep.m = 8;
    badStep.jacobianStep = -1.0;
    CHECK(thrown_message([&] { hfde::solve_hf(sys, badStep); }).find("jacobianStep") !=
          std::string::npos);
}

TEST_CASE("system validation messages are distinct") {
    FractionalSystem sys;
    CHECK(thrown_message([&] { sys.validate(); }).find("empty system") != std::string::npos);

    sys = scalar_system(1.0, {0.0}, [](double, std::span<const double>) { return 1.0; });
    sys.orders[0] = 2.6;
    CHECK(thrown_message([&] { sys.validate(); }).find("outside (0, 2.5]") != std::string::npos);

    sys.orders[0] = 1.5;  // now needs two initial values but only has one
    CHECK(thrown_message([&] { sys.validate(); }).find("initial value(s)") != std::string::npos);

    sys.orders[0] = 1.0;
    sys.T = 0.0;
    CHECK(thrown_message([&] { sys.validate(); }).find("horizon") != std::string::npos);

    sys.T = 1.0;
    sys.rhs[0] = nullptr;
    CHECK(thrown_message([&] { sys.validate(); }).find("missing RHS") != std::string::npos);

    sys.rhs = {};
    CHECK(thrown_message([&] { sys.validate(); }).find("lengths disagree") != std::string::npos);
}

TEST_CASE("a blowing-up problem fails with a node-numbered error") {
    // y' = y^2 with y(0) = 1 blows up at t = 1; the march cannot cross it.
    FractionalSystem sys = scalar_system(
        1.0, {1.0}, [](double, std::span<const double> y) { return y[0] * y[0]; }, 2.0);
    SolveConfig cfg;
    cfg.m = 20;
    try {
        hfde::solve_hf(sys, cfg);
        FAIL("expected the solver to give up");
    } catch (const hfde::SolverError& err) {
        CHECK(err.node() >= 9);
        CHECK(std::string(err.what()).find("node") != std::string::npos);
    } catch (const hfde::ModelError& err) {
        CHECK(std::string(err.what()).find("non-finite") != std::string::npos);
    }
}

TEST_CASE("non-finite right-hand sides are reported as model errors") {
    FractionalSystem sys = scalar_system(
        1.0, {0.0}, [](double, std::span<const double> y) { return std::sqrt(y[0] - 1.0); });
    SolveConfig cfg;
    cfg.m = 8;
    try {
        hfde::solve_hf(sys, cfg);
        FAIL("expected a model error");
    } catch (const hfde::ModelError& err) {
        CHECK(std::string(err.what()).find("non-finite") != std::string::npos);
    }
}

TEST_CASE("contraction bound values and verdicts") {
    ContractionReport a = hfde::contraction_bound(1, 0.5, 1.0, 1.0);
    CHECK(a.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a.verdict == ContractionReport::Verdict::Guaranteed);

    ContractionReport b = hfde::contraction_bound(1, 1.0, 0.5, 1.0);
    CHECK(std::abs(b.value - kInvGamma15) <= 1e-12);
    CHECK(b.verdict == ContractionReport::Verdict::NotGuaranteed);

    ContractionReport c = hfde::contraction_bound(3, 0.1, 1.0, 1.0);
    CHECK(c.value == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(c.verdict == ContractionReport::Verdict::Guaranteed);

    ContractionReport d = hfde::contraction_bound(2, 0.0, 0.7, 1.0);
    CHECK(d.verdict == ContractionReport::Verdict::Degenerate);

    ContractionReport e = hfde::contraction_bound(1, 1.0, 1.3, 1.0);
    CHECK(e.verdict == ContractionReport::Verdict::NotApplicable);
    CHECK(std::isnan(e.value));

    CHECK(std::string(hfde::to_string(a.verdict)) == "guaranteed");
    CHECK(std::string(hfde::to_string(b.verdict)) == "not-guaranteed");
    CHECK(std::string(hfde::to_string(d.verdict)) == "degenerate");
    CHECK(std::string(hfde::to_string(e.verdict)) == "not-applicable");

    CHECK_THROWS_AS(hfde::contraction_bound(0, 1.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(hfde::contraction_bound(1, -1.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(hfde::contraction_bound(1, 1.0, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("explicit Lipschitz constants pass straight through") {
    FractionalSystem sys =
        scalar_system(0.5, {0.0}, [](double, std::span<const double> y) { return 0.2 * y[0]; });
    SolveConfig cfg;
    cfg.m = 32;
    cfg.lipschitz = 0.25;
    SolveResult result = hfde::solve_hf(sys, cfg);
    CHECK(result.diagnostics.contraction.lipschitz == 0.25);
    CHECK_FALSE(result.diagnostics.contraction.heuristicLipschitz);
    CHECK(result.diagnostics.contraction.value ==
          doctest::Approx(0.25 * kInvGamma15).epsilon(1e-12));
    CHECK(result.diagnostics.contraction.verdict == ContractionReport::Verdict::Guaranteed);
}

TEST_CASE("the Lipschitz heuristic recovers a linear slope") {
    FractionalSystem sys = scalar_system(
        1.0, {1.0}, [](double, std::span<const double> y) { return 3.0 * y[0]; });
    SolveConfig cfg;
    cfg.m = 20;
    SolveResult result = hfde::solve_hf(sys, cfg);
    const double L = hfde::estimate_lipschitz(sys, result.nodes);
    CHECK(L == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(result.diagnostics.contraction.heuristicLipschitz);
    CHECK(result.diagnostics.contraction.verdict == ContractionReport::Verdict::NotGuaranteed);

    CHECK_THROWS_AS(hfde::estimate_lipschitz(sys, {}), std::invalid_argument);
}

TEST_CASE("convergence study reports second order on the linear benchmark") {
    FractionalSystem sys = hfde::get_model("example-6.2");
    auto exact = [](double t) {
        return std::vector<double>{std::exp(t) * std::sin(t), std::exp(t) * std::cos(t)};
    };
    const std::vector<double> steps = {1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0};
    hfde::ConvergenceStudy study = hfde::convergence_study(sys, exact, steps);
    REQUIRE(study.rows.size() == 3);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(study.rows[0].infErrors[i] > study.rows[1].infErrors[i]);
        CHECK(study.rows[1].infErrors[i] > study.rows[2].infErrors[i]);
        CHECK_FALSE(study.exactStates[i]);
        CHECK(study.observedOrders[i] == doctest::Approx(2.0).epsilon(0.1));
    }
    // Halving h from 1/200 to 1/400 divides the x error by almost exactly 4.
    CHECK(std::abs(study.rows[1].infErrors[0] / study.rows[2].infErrors[0] - 4.0) <= 0.05);
}

TEST_CASE("convergence study on exponential growth shows second order") {
    FractionalSystem sys =
        scalar_system(1.0, {1.0}, [](double, std::span<const double> y) { return y[0]; });
    auto exact = [](double t) { return std::vector<double>{std::exp(t)}; };
    const std::vector<double> steps = {1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0};
    hfde::ConvergenceStudy study = hfde::convergence_study(sys, exact, steps);
    CHECK_FALSE(study.exactStates[0]);
    CHECK(std::abs(study.observedOrders[0] - 2.0) <= 0.2);
}

TEST_CASE("convergence study flags exactly-solved states") {
    FractionalSystem sys =
        scalar_system(1.0, {0.0}, [](double, std::span<const double>) { return 1.0; });
    auto exact = [](double t) { return std::vector<double>{t}; };
    const std::vector<double> steps = {0.125, 0.0625};
    hfde::ConvergenceStudy study = hfde::convergence_study(sys, exact, steps);
    CHECK(study.exactStates[0]);
    CHECK(std::isnan(study.observedOrders[0]));

    CHECK_THROWS_AS(hfde::convergence_study(sys, nullptr, steps), std::invalid_argument);
    CHECK_THROWS_AS(hfde::convergence_study(sys, exact, {}), std::invalid_argument);
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "hfde/series.hpp"

using hfde::Grid;
using hfde::HFSeries;

TEST_CASE("grid construction and nodes") {
    Grid g(8, 1.0);
    CHECK(g.m == 8);
    CHECK(g.h == 0.125);
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(4) == 0.5);
    CHECK(g.node(8) == 1.0);

    CHECK_THROWS_AS(Grid(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(4, -1.0), std::invalid_argument);
}

TEST_CASE("grid from step width") {
    Grid g = Grid::from_step(0.002, 1.0);
    CHECK(g.m == 500);
    CHECK(g.node(g.m) == 1.0);  // h is recomputed as T/m

    CHECK(Grid::from_step(0.1, 1.0).m == 10);
    CHECK_THROWS_AS(Grid::from_step(0.3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid::from_step(-0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid::from_step(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("sampling the identity function") {
    Grid g(4, 1.0);
    HFSeries s = hfde::sample_to_hf([](double t) { return t; }, g);

    const std::vector<double> cS = {0.0, 0.25, 0.5, 0.75};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(s.sh_coeffs()[i] == cS[i]);
        CHECK(s.tf_coeffs()[i] == 0.25);
    }
    CHECK(s.last_sample() == 1.0);

    const std::vector<double> nodes = s.node_values();
    REQUIRE(nodes.size() == 5);
    for (std::size_t j = 0; j <= 4; ++j)
        CHECK(nodes[j] == g.node(j));
}

TEST_CASE("sampling from a span") {
    Grid g(2, 1.0);
    const std::vector<double> samples = {1.0, 3.0, 2.0};
    HFSeries s = hfde::sample_to_hf(std::span<const double>(samples), g);
    CHECK(s.node_value(0) == 1.0);
    CHECK(s.node_value(1) == 3.0);
    CHECK(s.node_value(2) == 2.0);
    CHECK(s.tf_coeffs()[0] == 2.0);
    CHECK(s.tf_coeffs()[1] == -1.0);

    const std::vector<double> tooShort = {1.0, 2.0};
    CHECK_THROWS_AS(hfde::sample_to_hf(std::span<const double>(tooShort), g),
                    std::invalid_argument);
}

TEST_CASE("series is the piecewise-linear interpolant") {
    Grid g(4, 1.0);
    HFSeries s = hfde::sample_to_hf([](double t) { return t * t; }, g);

    // Exact at every node, linear in between.
    for (std::size_t j = 0; j <= 4; ++j)
        CHECK(s(g.node(j)) == g.node(j) * g.node(j));
    const double mid = s(0.375);  // halfway between nodes 1 and 2
    CHECK(mid == doctest::Approx(0.5 * (0.0625 + 0.25)).epsilon(1e-15));

    // The identity function is reproduced exactly everywhere.
    HFSeries id = hfde::sample_to_hf([](double t) { return t; }, g);
    CHECK(id(0.1) == 0.1);
    CHECK(hfde::hf_eval(id, 0.7) == doctest::Approx(0.7).epsilon(1e-16));

    // Hand value: t^2 on two subintervals, chord midpoint at t = 0.25.
    Grid coarse(2, 1.0);
    HFSeries sq = hfde::sample_to_hf([](double t) { return t * t; }, coarse);
    CHECK(sq(0.25) == 0.125);

    CHECK_THROWS_AS(s(-0.01), std::domain_error);
    CHECK_THROWS_AS(s(1.0 + 1e-9), std::domain_error);
    CHECK(s(1.0) == 1.0);  // right endpoint included
}

TEST_CASE("coefficient length validation") {
    Grid g(4, 1.0);
    CHECK_THROWS_AS(HFSeries(g, {1.0, 2.0}, {0.0, 0.0, 0.0, 0.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(HFSeries(g, {1.0, 2.0, 3.0, 4.0}, {0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("node index validation") {
    Grid g(2, 1.0);
    HFSeries s = hfde::sample_to_hf([](double) { return 1.0; }, g);
    CHECK_THROWS_AS(s.node_value(3), std::invalid_argument);
}

TEST_CASE("addition and scaling act node-wise") {
    Grid g(8, 2.0);
    HFSeries a = hfde::sample_to_hf([](double t) { return std::sin(t); }, g);
    HFSeries b = hfde::sample_to_hf([](double t) { return std::cos(t); }, g);

    HFSeries sum = hfde::hf_add(a, b);
    HFSeries scaled = hfde::hf_scale(a, 2.5);
    for (std::size_t j = 0; j <= g.m; ++j) {
        CHECK(sum.node_value(j) == a.node_value(j) + b.node_value(j));
        CHECK(scaled.node_value(j) == 2.5 * a.node_value(j));
    }

    // Hand value: t plus 1 - t collapses to the constant-one series.
    Grid quarters(4, 1.0);
    HFSeries up = hfde::sample_to_hf([](double t) { return t; }, quarters);
    HFSeries down = hfde::sample_to_hf([](double t) { return 1.0 - t; }, quarters);
    HFSeries one = hfde::hf_add(up, down);
    for (std::size_t j = 0; j <= quarters.m; ++j) {
        CHECK(one.node_value(j) == 1.0);
    }

    Grid other(4, 2.0);
    HFSeries c = hfde::sample_to_hf([](double t) { return t; }, other);
    CHECK_THROWS_AS(hfde::hf_add(a, c), std::invalid_argument);
    CHECK_THROWS_AS(hfde::hf_multiply(a, c), std::invalid_argument);
}

TEST_CASE("product series matches the product at every node") {
    Grid g(10, 1.5);
    HFSeries a = hfde::sample_to_hf([](double t) { return std::exp(t) - 0.5; }, g);
    HFSeries b = hfde::sample_to_hf([](double t) { return std::sin(3.0 * t); }, g);

    HFSeries prod = hfde::hf_multiply(a, b);
    for (std::size_t j = 0; j <= g.m; ++j) {
        const double expected = a.node_value(j) * b.node_value(j);
        CHECK(prod.node_value(j) ==
              doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("powers reduce to iterated products") {
    Grid g(6, 1.0);
    HFSeries a = hfde::sample_to_hf([](double t) { return 1.0 + t - t * t; }, g);

    // Hand value: the cube of the identity on m = 4 is 0.125 at the t = 0.5 node.
    Grid g4(4, 1.0);
    HFSeries id = hfde::sample_to_hf([](double t) { return t; }, g4);
    CHECK(hfde::hf_power(id, 3).node_value(2) == 0.125);

    HFSeries cubeDirect = hfde::hf_power(a, 3);
    HFSeries cubeIterated = hfde::hf_multiply(hfde::hf_multiply(a, a), a);
    for (std::size_t j = 0; j <= g.m; ++j)
        CHECK(cubeDirect.node_value(j) ==
              doctest::Approx(cubeIterated.node_value(j)).epsilon(1e-14));

    HFSeries one = hfde::hf_power(a, 0);
    HFSeries same = hfde::hf_power(a, 1);
    for (std::size_t j = 0; j <= g.m; ++j) {
        CHECK(one.node_value(j) == 1.0);
        CHECK(same.node_value(j) == a.node_value(j));
    }
}

TEST_CASE("inner products have the closed forms") {
    Grid g(16, 2.0);
    hfde::InnerProducts ip = hfde::hf_inner_products(g);
    CHECK(ip.shDiagonal == g.h);
    CHECK(ip.tfDiagonal == g.h / 3.0);
    CHECK(ip.sh(3, 3) == g.h);
    CHECK(ip.tf(7, 7) == g.h / 3.0);
    CHECK(ip.sh(0, 1) == 0.0);
    CHECK(ip.tf(2, 9) == 0.0);
}

TEST_CASE("randomized hybrid-function algebra") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> value(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> size(2, 24);

    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t m = size(rng);
        Grid g(m, 1.0 + 0.1 * static_cast<double>(rep % 7));
        std::vector<double> sa(m + 1), sb(m + 1);
        for (auto& v : sa)
            v = value(rng);
        for (auto& v : sb)
            v = value(rng);
        HFSeries a = hfde::sample_to_hf(std::span<const double>(sa), g);
        HFSeries b = hfde::sample_to_hf(std::span<const double>(sb), g);

        HFSeries prod = hfde::hf_multiply(a, b);
        HFSeries square = hfde::hf_power(a, 2);
        for (std::size_t j = 0; j <= m; ++j) {
            CHECK(std::abs(prod.node_value(j) - sa[j] * sb[j]) <= 1e-13);
            CHECK(std::abs(square.node_value(j) - sa[j] * sa[j]) <= 1e-13);
        }
    }
}

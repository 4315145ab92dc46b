#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "helpers.hpp"
#include "vhsim/errors.hpp"
#include "vhsim/grid.hpp"

using namespace vhsim;

TEST_CASE("build_grid on the default domain") {
    const Grid g = build_grid({{0, 0}, {150, 60}, 0.5, BoundaryMode::outflow});
    CHECK(g.nx() == 300);
    CHECK(g.ny() == 120);
    CHECK(g.cell_area() == 0.25);
    CHECK(g.center(0).x == doctest::Approx(0.25));
    CHECK(g.center(299, 119).y == doctest::Approx(59.75));
}

TEST_CASE("build_grid rejects non-divisible extents and tiny grids") {
    CHECK_THROWS_AS(build_grid({{0, 0}, {10, 10}, 3.0, BoundaryMode::outflow}), ConfigError);
    // 2 x 2 cells breaks the 4-cells-per-axis invariant
    CHECK_THROWS_AS(build_grid({{0, 0}, {10, 10}, 5.0, BoundaryMode::outflow}), ConfigError);
    CHECK_THROWS_AS(build_grid({{0, 0}, {-10, 10}, 0.5, BoundaryMode::outflow}), ConfigError);
    CHECK_NOTHROW(build_grid({{0, 0}, {10, 10}, 2.5, BoundaryMode::outflow}));
}

TEST_CASE("neighbor topology") {
    const Grid g({0, 0}, 4, 5, 1.0);
    const std::size_t k = g.index(0, 0);
    CHECK_FALSE(g.neighbor(k, 0).has_value());
    CHECK(*g.neighbor(k, 1) == g.index(1, 0));
    CHECK_FALSE(g.neighbor(k, 2).has_value());
    CHECK(*g.neighbor(k, 3) == g.index(0, 1));
    CHECK_FALSE(g.neighbor(g.index(3, 4), 1).has_value());
    CHECK_FALSE(g.neighbor(g.index(3, 4), 3).has_value());
}

TEST_CASE("disk mask area approaches pi r^2") {
    const Grid g = build_grid({{0, 0}, {150, 60}, 0.5, BoundaryMode::outflow});
    const Mask m = build_mask(g, {1, {25, 30}, 5.0});
    const double area = static_cast<double>(m.count()) * g.cell_area();
    CHECK(testing::rel(area, std::numbers::pi * 25.0) < 0.03);
    for (std::size_t k : m.cells()) {
        const Point c = g.center(k);
        CHECK(std::hypot(c.x - 25, c.y - 30) <= 5.0);
    }
}

TEST_CASE("tiny disk on a cell center holds one cell") {
    const Grid g = build_grid({{0, 0}, {150, 60}, 0.5, BoundaryMode::outflow});
    const Mask m = build_mask(g, {1, {25.25, 30.25}, 0.1});
    CHECK(m.count() == 1);
    CHECK_THROWS_AS(build_mask(g, {1, {25.0, 30.0}, 0.1}), ConfigError);
}

TEST_CASE("scenario sites give disjoint masks") {
    const DomainSpec d{{0, 0}, {150, 60}, 0.5, BoundaryMode::outflow};
    const std::vector<SubregionSpec> subs{{1, {25, 30}, 5}, {2, {50, 30}, 5}, {3, {125, 30}, 5}};
    CHECK_NOTHROW(validate_subregions(d, subs));
    const Grid g = build_grid(d);
    std::vector<int> owner(g.size(), 0);
    for (const auto& s : subs) {
        for (std::size_t k : build_mask(g, s).cells()) ++owner[k];
    }
    CHECK(*std::max_element(owner.begin(), owner.end()) == 1);
}

TEST_CASE("validate_subregions rejects overlap, touching, margin and duplicate ids") {
    const DomainSpec d{{0, 0}, {150, 60}, 0.5, BoundaryMode::outflow};
    CHECK_THROWS_AS(validate_subregions(d, std::vector<SubregionSpec>{{1, {25, 30}, 5}, {2, {32, 30}, 5}}),
                    ConfigError);
    CHECK_THROWS_AS(validate_subregions(d, std::vector<SubregionSpec>{{1, {25, 30}, 5}, {2, {35, 30}, 5}}),
                    ConfigError);
    CHECK_THROWS_AS(validate_subregions(d, std::vector<SubregionSpec>{{1, {5.5, 30}, 5}}), ConfigError);
    CHECK_THROWS_AS(validate_subregions(d, std::vector<SubregionSpec>{{1, {25, 30}, 5}, {1, {60, 30}, 5}}),
                    ConfigError);
    CHECK_THROWS_AS(validate_subregions(d, std::vector<SubregionSpec>{{1, {25, 30}, 0}}), ConfigError);
}

TEST_CASE("integrate: constants, zero, and mask partition") {
    const Grid g = build_grid({{0, 0}, {150, 60}, 0.5, BoundaryMode::outflow});
    CHECK(integrate(g, Field(g, 1000.0)) == doctest::Approx(9'000'000.0).epsilon(1e-14));
    CHECK(integrate(g, Field(g, 0.0)) == 0.0);

    std::mt19937_64 rng(7);
    const Field f = testing::random_field(g, rng, -3.0, 5.0);
    const std::vector<Mask> masks{build_mask(g, {1, {25, 30}, 5}), build_mask(g, {2, {50, 30}, 5})};
    std::vector<std::uint8_t> in(g.size(), 0);
    double parts = 0.0;
    for (const auto& m : masks) {
        parts += integrate(g, f, &m);
        for (std::size_t k : m.cells()) in[k] = 1;
    }
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!in[k]) rest.push_back(k);
    }
    const Mask complement(g, rest);
    parts += integrate(g, f, &complement);
    CHECK(parts == doctest::Approx(integrate(g, f)).epsilon(1e-12));
}

TEST_CASE("integrate rejects a field from another grid") {
    const Grid a({0, 0}, 4, 4, 1.0);
    const Grid b({0, 0}, 5, 4, 1.0);
    CHECK_THROWS_AS(integrate(a, Field(b, 1.0)), ConfigError);
}

TEST_CASE("expand and restrict_to are inverse on the mask") {
    const Grid g({0, 0}, 10, 10, 1.0);
    const Mask m = build_mask(g, {1, {5, 5}, 2.5});
    std::vector<double> local(m.count());
    for (std::size_t i = 0; i < local.size(); ++i) local[i] = 1.0 + static_cast<double>(i);
    const Field full = expand(g, m, local);
    CHECK(restrict_to(m, full) == local);
    CHECK(integrate(g, full) == doctest::Approx(integrate_local(g, m, local)));
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!m.contains(k)) CHECK(full[k] == 0.0);
    }
}

TEST_CASE("mask local neighbor table") {
    const Grid g({0, 0}, 6, 6, 1.0);
    const Mask m = build_box_mask(g, {1.0, 1.0}, {3.0, 2.0}, true);  // cells (1,1), (2,1)
    REQUIRE(m.count() == 2);
    CHECK(m.local_neighbor(0, 1) == 1);
    CHECK(m.local_neighbor(1, 0) == 0);
    CHECK(m.local_neighbor(0, 0) == -1);
    CHECK(m.local_neighbor(0, 3) == -1);
    CHECK(m.local_index(g.index(2, 1)) == 1);
    CHECK(m.local_index(g.index(0, 0)) == -1);
}

TEST_CASE("boundary mode strings") {
    CHECK(boundary_mode_from_string(to_string(BoundaryMode::zero_flux)) == BoundaryMode::zero_flux);
    CHECK(boundary_mode_from_string(to_string(BoundaryMode::outflow)) == BoundaryMode::outflow);
    CHECK_THROWS_AS(boundary_mode_from_string("periodic"), ConfigError);
}

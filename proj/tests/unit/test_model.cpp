#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <limits>
#include <numbers>

#include "helpers.hpp"
#include "vhsim/config.hpp"
#include "vhsim/errors.hpp"
#include "vhsim/model.hpp"

using namespace vhsim;

namespace {

struct Totals {
    double S1, E1, I1, Vi, S2;
};

Totals preset_totals(double h) {
    ScenarioConfig c = *builtin_preset("bluetongue_c10");
    c.domain.cell_size = h;
    const Scenario s = build_scenario(c);
    const auto& g = s.grid;
    return {integrate_local(g, s.masks[0], s.initial.hosts[0].S), integrate_local(g, s.masks[0], s.initial.hosts[0].E),
            integrate_local(g, s.masks[0], s.initial.hosts[0].I), integrate(g, s.initial.Vi),
            integrate_local(g, s.masks[1], s.initial.hosts[1].S)};
}

std::string label_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const AssumptionViolation& e) {
        return e.label();
    }
    return "none";
}

}  // namespace

TEST_CASE("bump evaluates the isotropic form and integrates to A e 2 pi w") {
    const GaussianBump b{30.0, {25, 30}, 1.0};
    CHECK(b({25, 30}) == doctest::Approx(30.0 * std::numbers::e));
    CHECK(b({26, 31}) == doctest::Approx(30.0));  // exp(1 - 2/2)
    CHECK(b.plane_integral() == doctest::Approx(30.0 * std::numbers::e * 2.0 * std::numbers::pi));
    CHECK(b.plane_integral() == doctest::Approx(512.3).epsilon(1e-3));
}

TEST_CASE("initial totals match the tabulated counts") {
    const Totals t = preset_totals(0.5);
    CHECK(testing::rel(t.S1, 512.0) < 0.02);
    CHECK(testing::rel(t.S2, 530.0) < 0.02);
    // the tabulated 5 is 0.01 x 512 rounded down, so these sit 2.5% above it
    CHECK(testing::rel(t.E1, 5.0) < 0.03);
    CHECK(testing::rel(t.I1, 5.0) < 0.03);
    CHECK(testing::rel(t.Vi, 5.0) < 0.03);
    CHECK(t.E1 == doctest::Approx(0.01 * t.S1).epsilon(1e-12));
    // independent oracle: the integral of each bump over its radius-5 disk
    const double disk = std::numbers::e * 2 * std::numbers::pi * (1.0 - std::exp(-12.5));
    CHECK(testing::rel(t.S1, 30.0 * disk) < 1e-6);
    CHECK(testing::rel(t.S2, 31.0 * disk) < 1e-6);
}

TEST_CASE("initial totals are stable under refinement") {
    const Totals a = preset_totals(0.5);
    const Totals b = preset_totals(0.25);
    CHECK(testing::rel(b.S1, a.S1) < 0.005);
    CHECK(testing::rel(b.S2, a.S2) < 0.005);
    CHECK(testing::rel(b.Vi, a.Vi) < 0.005);
}

TEST_CASE("host fields vanish off their masks and Vi copies I1") {
    const Scenario s = build_scenario(*builtin_preset("bluetongue_c10"));
    const Field I1 = host_field(s.grid, s.masks[0], s.initial.hosts[0].I);
    for (std::size_t k = 0; k < s.grid.size(); ++k) {
        CHECK(s.initial.Vi[k] == I1[k]);
        CHECK(s.initial.Vs[k] == 1000.0);
    }
    CHECK(integrate_local(s.grid, s.masks[1], s.initial.hosts[1].E) == 0.0);
}

TEST_CASE("build_initial_state errors") {
    ScenarioConfig c = testing::small_config();
    SUBCASE("negative amplitude") {
        c.initial.hosts[0].S = InitialSpec::gaussian({-1.0, {6, 6}, 1.0});
        CHECK_THROWS_AS(build_scenario(c), ConfigError);
    }
    SUBCASE("bump centered outside its subregion") {
        c.initial.hosts[0].S = InitialSpec::gaussian({10.0, {12, 6}, 1.0});
        CHECK_THROWS_AS(build_scenario(c), ConfigError);
    }
    SUBCASE("unknown source") {
        c.initial.Vi = InitialSpec::scaled("I7", 1.0);
        CHECK_THROWS_AS(build_scenario(c), ConfigError);
    }
    SUBCASE("cyclic sources") {
        c.initial.hosts[0].E = InitialSpec::scaled("I1", 1.0);
        c.initial.hosts[0].I = InitialSpec::scaled("E1", 1.0);
        CHECK_THROWS_AS(build_scenario(c), ConfigError);
    }
}

TEST_CASE("param_bounds") {
    const Grid g({0, 0}, 8, 8, 0.5);
    ModelParams p;
    p.diffusivity = Field(g, 1.0);
    p.birth = Field(g, 1.0);
    p.mortality = Field(g, 0.001);
    const ParamBounds b = param_bounds(p);
    CHECK(b.D_m == 1.0);
    CHECK(b.D_M == 1.0);
    CHECK(b.beta_star == 1.0);
    CHECK(b.m_lower == 0.001);
    CHECK(b.m_upper == 0.001);

    p.diffusivity[5] = 3.0;
    CHECK(param_bounds(p).D_M == 3.0);
    CHECK(param_bounds(p).D_m == 1.0);

    p.mortality = Field(g, 0.0);
    CHECK(label_of([&] { param_bounds(p); }) == "A6");
    p.mortality = Field(g, 0.001);
    p.diffusivity[3] = 0.0;
    CHECK(label_of([&] { param_bounds(p); }) == "A2");
}

TEST_CASE("carrying capacity") {
    const Grid g({0, 0}, 4, 4, 1.0);
    ModelParams p;
    p.birth = Field(g, 1.0);
    p.mortality = Field(g, 0.001);
    CHECK(carrying_capacity(p).min() == doctest::Approx(1000.0));
    p.birth = Field(g, 2.0);
    CHECK(carrying_capacity(p).max() == doctest::Approx(2000.0));
    p.birth = Field(g, 0.0);
    CHECK(carrying_capacity(p).max() == 0.0);
}

TEST_CASE("assumption labels on load") {
    ScenarioConfig c = testing::small_config();
    SUBCASE("A6") {
        c.parameters.mortality = {0.0, {}};
        CHECK(label_of([&] { build_scenario(c); }) == "A6");
    }
    SUBCASE("A2") {
        c.parameters.diffusivity = {0.0, {}};
        CHECK(label_of([&] { build_scenario(c); }) == "A2");
    }
    SUBCASE("A5") {
        c.parameters.birth = {-0.1, {}};
        CHECK(label_of([&] { build_scenario(c); }) == "A5");
    }
    SUBCASE("A9") {
        c.parameters.removal_rate = 0.0;
        CHECK(label_of([&] { build_scenario(c); }) == "A9");
    }
    SUBCASE("A10") {
        c.parameters.hosts[0].vector_infection = {0.0, {}};
        CHECK(label_of([&] { build_scenario(c); }) == "A10");
    }
    SUBCASE("A8 only in diffusive mode") {
        c.subregions.push_back({2, {15, 6}, 3.0});
        c.parameters.hosts.resize(2);
        c.initial.hosts.resize(2);
        CHECK_NOTHROW(build_scenario(c));
        c.solver.mode = HostMode::two_region_diffusive;
        CHECK(label_of([&] { build_scenario(c); }) == "A8");
        for (auto& h : c.parameters.hosts) {
            h.diffusivity_se = {0.5, {}};
            h.diffusivity_i = {0.25, {}};
        }
        CHECK_NOTHROW(build_scenario(c));
    }
    SUBCASE("A4") {
        c.parameters.transport = {std::numeric_limits<double>::infinity(), 0.0};
        CHECK(label_of([&] { build_scenario(c); }) == "A4");
    }
}

TEST_CASE("coefficient fields with a bump") {
    const Grid g({0, 0}, 20, 20, 0.5);
    const CoefficientSpec spec{1.0, GaussianBump{2.0, {5, 5}, 1.0}};
    const Field f = spec.sample(g);
    // nearest centers sit at distance^2 = 0.125 from (5, 5)
    CHECK(f.max() == doctest::Approx(1.0 + 2.0 * std::exp(1.0 - 0.0625)));
    CHECK(f.min() >= 1.0);
    CHECK(f.at(0, 0) == doctest::Approx(1.0 + 2.0 * std::exp(1.0 - (4.75 * 4.75 * 2) / 2.0)));
}

TEST_CASE("host mode strings") {
    CHECK(host_mode_from_string("two_region_diffusive") == HostMode::two_region_diffusive);
    CHECK(to_string(HostMode::n_region_nondiffusive) == "n_region_nondiffusive");
    CHECK_THROWS_AS(host_mode_from_string("sir"), ConfigError);
}

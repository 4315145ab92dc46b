#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "vhsim/errors.hpp"
#include "vhsim/host_dynamics.hpp"

using namespace vhsim;

namespace {

HostParams uniform_params(std::size_t n, double sigma, double d_se = 0.0, double d_i = 0.0) {
    return {std::vector<double>(n, sigma), std::vector<double>(n, 0.005), std::vector<double>(n, d_se),
            std::vector<double>(n, d_i)};
}

}  // namespace

TEST_CASE("host_reaction examples") {
    const HostState h{{100.0}, {0.0}, {0.0}};
    const std::vector<double> vi{1.0};
    const auto r = host_reaction(h, uniform_params(1, 1.0), vi, 4.0, 1.0);
    CHECK(r.dS[0] == doctest::Approx(-100.0));
    CHECK(r.dE[0] == doctest::Approx(100.0));
    CHECK(r.dI[0] == 0.0);

    const HostState g{{0.0}, {10.0}, {0.0}};
    const auto q = host_reaction(g, uniform_params(1, 1.0), std::vector<double>{0.0}, 4.0, 1.0);
    CHECK(q.dS[0] == 0.0);
    CHECK(q.dE[0] == doctest::Approx(-40.0));
    CHECK(q.dI[0] == doctest::Approx(40.0));

    const HostState z{{50.0}, {0.0}, {0.0}};
    const auto f = host_reaction(z, uniform_params(1, 1.0), std::vector<double>{0.0}, 4.0, 1.0);
    CHECK(f.dS[0] == 0.0);
    CHECK(f.dE[0] == 0.0);
    CHECK(f.dI[0] == 0.0);
}

TEST_CASE("host rates sum to minus removal") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    const std::size_t n = 64;
    for (int trial = 0; trial < 100; ++trial) {
        HostState h{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
        std::vector<double> vi(n);
        for (std::size_t m = 0; m < n; ++m) {
            h.S[m] = u(rng);
            h.E[m] = u(rng);
            h.I[m] = u(rng);
            vi[m] = u(rng);
        }
        const double lambda = 0.1 + u(rng) / 10.0;
        const double delta = 0.1 + u(rng) / 10.0;
        const auto r = host_reaction(h, uniform_params(n, 0.7), vi, lambda, delta);
        for (std::size_t m = 0; m < n; ++m) {
            CHECK(r.dS[m] <= 0.0);
            CHECK(r.dS[m] + r.dE[m] + r.dI[m] == doctest::Approx(-delta * h.I[m]).scale(1e4));
        }
    }
}

TEST_CASE("host_reaction reads Vi from the state on the mask") {
    const Scenario s = build_scenario(testing::small_config());
    SimState st = s.initial;
    const std::size_t k = s.masks[0].cells()[4];
    st.Vi[k] = 2.0;
    const auto r = host_reaction(st, s.params, s.masks[0], 0);
    const double S = st.hosts[0].S[4];
    CHECK(r.dS[4] == doctest::Approx(-S * 2.0));
}

TEST_CASE("host_diffusion") {
    const Grid g({0, 0}, 8, 8, 0.5);
    const Mask pair = build_box_mask(g, {1.0, 1.0}, {2.0, 1.5}, true);  // cells (2,2), (3,2)
    REQUIRE(pair.count() == 2);
    const HostParams hp = uniform_params(2, 1.0, 0.5, 0.25);

    SUBCASE("two cells exchange D (b - a) / h^2") {
        const HostState h{{1.0, 3.0}, {0.0, 2.0}, {4.0, 0.0}};
        const auto r = host_diffusion(g, pair, h, hp, HostMode::two_region_diffusive);
        CHECK(r.dS[0] == doctest::Approx(0.5 * 2.0 / 0.25));
        CHECK(r.dS[1] == doctest::Approx(-0.5 * 2.0 / 0.25));
        CHECK(r.dE[0] == doctest::Approx(0.5 * 2.0 / 0.25));
        CHECK(r.dI[0] == doctest::Approx(-0.25 * 4.0 / 0.25));
        CHECK(r.dI[1] == doctest::Approx(0.25 * 4.0 / 0.25));
    }
    SUBCASE("constant profile is stationary") {
        const HostState h{{2.0, 2.0}, {1.0, 1.0}, {3.0, 3.0}};
        const auto r = host_diffusion(g, pair, h, hp, HostMode::two_region_diffusive);
        for (std::size_t m = 0; m < 2; ++m) {
            CHECK(r.dS[m] == 0.0);
            CHECK(r.dE[m] == 0.0);
            CHECK(r.dI[m] == 0.0);
        }
    }
    SUBCASE("mode mismatch") {
        const HostState h{{1.0, 3.0}, {0.0, 0.0}, {0.0, 0.0}};
        CHECK_THROWS_AS(host_diffusion(g, pair, h, hp, HostMode::n_region_nondiffusive), ConfigError);
    }
}

TEST_CASE("host_diffusion conserves each compartment on a disk") {
    const Grid g({0, 0}, 30, 30, 0.5);
    const Mask disk = build_mask(g, {1, {7.5, 7.5}, 4.0});
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 10.0), d(0.1, 2.0);
    const std::size_t n = disk.count();
    for (int trial = 0; trial < 20; ++trial) {
        HostParams hp = uniform_params(n, 1.0);
        HostState h{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
        for (std::size_t m = 0; m < n; ++m) {
            hp.diffusivity_se[m] = d(rng);
            hp.diffusivity_i[m] = d(rng);
            h.S[m] = u(rng);
            h.E[m] = u(rng);
            h.I[m] = u(rng);
        }
        const auto r = host_diffusion(g, disk, h, hp, HostMode::two_region_diffusive);
        CHECK(integrate_local(g, disk, r.dS) == doctest::Approx(0.0).scale(100.0));
        CHECK(integrate_local(g, disk, r.dE) == doctest::Approx(0.0).scale(100.0));
        CHECK(integrate_local(g, disk, r.dI) == doctest::Approx(0.0).scale(100.0));
    }
}

TEST_CASE("closed_form_S") {
    const std::vector<double> S0{5.0, 8.0};
    const std::vector<double> sigma{1.0, 2.0};
    const auto at0 = closed_form_S(S0, sigma, std::vector<double>{0.0, 0.0});
    CHECK(at0 == S0);
    const auto half = closed_form_S(S0, sigma, std::vector<double>{std::numbers::ln2, std::numbers::ln2 / 2});
    CHECK(half[0] == doctest::Approx(2.5));
    CHECK(half[1] == doctest::Approx(4.0));
}

TEST_CASE("exposed hosts decay at the incubation rate without infected vectors") {
    HostState h{{1.0}, {10.0}, {0.0}};
    const double lambda = 4.0, delta = 1.0, dt = 1e-4;
    const HostParams hp = uniform_params(1, 1.0);
    const std::vector<double> vi{0.0};
    for (int n = 0; n < 10'000; ++n) {
        const auto r = host_reaction(h, hp, vi, lambda, delta);
        h.S[0] += dt * r.dS[0];
        h.E[0] += dt * r.dE[0];
        h.I[0] += dt * r.dI[0];
    }
    // t = 1: E = 10 e^{-4}; I solves I' = 4E - I, I = (40/3)(e^{-t} - e^{-4t})
    CHECK(h.E[0] == doctest::Approx(10.0 * std::exp(-4.0)).epsilon(2e-3));
    CHECK(h.I[0] == doctest::Approx(40.0 / 3.0 * (std::exp(-1.0) - std::exp(-4.0))).epsilon(2e-3));
    CHECK(h.S[0] == 1.0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "vhsim/config.hpp"
#include "vhsim/vector_dynamics.hpp"

using namespace vhsim;

namespace {

Scenario small() { return build_scenario(testing::small_config()); }

}  // namespace

TEST_CASE("incidence") {
    Scenario s = small();
    SUBCASE("zero infected hosts") {
        for (auto& v : s.initial.hosts[0].I) v = 0.0;
        CHECK(incidence(s.initial, s.params, s.masks).max() == 0.0);
    }
    SUBCASE("hand arithmetic at one cell") {
        const std::size_t m = 0;
        const std::size_t k = s.masks[0].cells()[m];
        s.initial.hosts[0].I[m] = 81.5;
        s.initial.Vs[k] = 1000.0;
        CHECK(incidence(s.initial, s.params, s.masks)[k] == doctest::Approx(407.5));
    }
    SUBCASE("no susceptible vectors") {
        s.initial.Vs = Field(s.grid, 0.0);
        CHECK(incidence(s.initial, s.params, s.masks).max() == 0.0);
    }
    SUBCASE("support is the union of masks") {
        const Field f = incidence(s.initial, s.params, s.masks);
        for (std::size_t k = 0; k < s.grid.size(); ++k) {
            if (!s.masks[0].contains(k)) CHECK(f[k] == 0.0);
            CHECK(f[k] >= 0.0);
        }
        CHECK(f.max() > 0.0);
    }
}

TEST_CASE("vector_reaction examples") {
    Scenario s = small();
    const Field zero(s.grid, 0.0);
    SUBCASE("carrying capacity is an equilibrium") {
        s.initial.Vi = zero;
        const auto r = vector_reaction(s.initial, s.params, zero);
        CHECK(std::abs(r.dVs.max()) < 1e-12);
        CHECK(std::abs(r.dVs.min()) < 1e-12);
        CHECK(r.dVi.max() == 0.0);
    }
    SUBCASE("no vectors") {
        s.initial.Vs = zero;
        s.initial.Vi = zero;
        const auto r = vector_reaction(s.initial, s.params, zero);
        CHECK(r.dVs.max() == 0.0);
        CHECK(r.dVi.max() == 0.0);
    }
    SUBCASE("infection seeds the infected class") {
        s.initial.Vi = zero;
        Field f(s.grid, 0.0);
        f[3] = 2.5;
        const auto r = vector_reaction(s.initial, s.params, f);
        CHECK(r.dVi[3] == doctest::Approx(2.5));
    }
}

TEST_CASE("vector_reaction components sum to the logistic rate") {
    const Scenario s = small();
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        SimState st = s.initial;
        st.Vs = testing::random_field(s.grid, rng, 0.0, 2000.0);
        st.Vi = testing::random_field(s.grid, rng, 0.0, 100.0);
        const Field f = testing::random_field(s.grid, rng, 0.0, 50.0);
        const auto r = vector_reaction(st, s.params, f);
        for (std::size_t k = 0; k < s.grid.size(); k += 7) {
            const double V = st.Vs[k] + st.Vi[k];
            const double logistic = s.params.birth[k] * V - s.params.mortality[k] * V * V;
            CHECK(r.dVs[k] + r.dVi[k] == doctest::Approx(logistic).epsilon(1e-12).scale(V));
        }
    }
}

TEST_CASE("advection of constants and zero velocity") {
    const Grid g({0, 0}, 12, 8, 0.5);
    const Field c(g, 3.0);
    const Field a = advection_flux(g, c, {10.0, -4.0}, BoundaryMode::outflow);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(a[k] == doctest::Approx(0.0).scale(1.0));
    std::mt19937_64 rng(3);
    const Field u = testing::random_field(g, rng, 0.0, 1.0);
    const Field z = advection_flux(g, u, {0.0, 0.0});
    CHECK(z.max() == 0.0);
    CHECK(z.min() == 0.0);
    // closed walls: interior of a constant field is zero, walls are not
    const Field w = advection_flux(g, c, {10.0, 0.0}, BoundaryMode::zero_flux);
    CHECK(w.at(5, 4) == 0.0);
    CHECK(w.at(0, 4) == doctest::Approx(60.0));
    CHECK(w.at(11, 4) == doctest::Approx(-60.0));
}

TEST_CASE("upwind pulse moves by w dt / h into the downwind cell") {
    const Grid g({0, 0}, 10, 10, 0.5);
    Field u(g, 0.0);
    u.at(4, 5) = 1.0;
    const double dt = 0.02;
    const Field a = advection_flux(g, u, {10.0, 0.0}, BoundaryMode::outflow);
    Field next = u;
    for (std::size_t k = 0; k < g.size(); ++k) next[k] -= dt * a[k];
    const double frac = 10.0 * dt / 0.5;
    CHECK(next.at(4, 5) == doctest::Approx(1.0 - frac));
    CHECK(next.at(5, 5) == doctest::Approx(frac));
    CHECK(next.at(3, 5) == 0.0);
    CHECK(integrate(g, next) == doctest::Approx(integrate(g, u)));
}

TEST_CASE("advection sums to the boundary outflow") {
    const Grid g({0, 0}, 16, 9, 0.5);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Field u = testing::random_field(g, rng, 0.0, 10.0);
        const Velocity w{std::uniform_real_distribution<double>(-20, 20)(rng),
                         std::uniform_real_distribution<double>(-20, 20)(rng)};
        double out = 0.0;
        const Field a = advection_flux(g, u, w, BoundaryMode::outflow, &out);
        CHECK(integrate(g, a) == doctest::Approx(out).epsilon(1e-10).scale(100.0));
        const Field closed = advection_flux(g, u, w, BoundaryMode::zero_flux, &out);
        CHECK(integrate(g, closed) == doctest::Approx(0.0).scale(100.0));
        CHECK(out == 0.0);
    }
}

TEST_CASE("diffusion examples") {
    const Grid g({0, 0}, 12, 10, 0.5);
    const Field D(g, 1.0);
    SUBCASE("constant field") {
        const Field r = diffusion_flux(g, Field(g, 5.0), D);
        CHECK(r.max() == 0.0);
        CHECK(r.min() == 0.0);
    }
    SUBCASE("linear in x") {
        Field u(g);
        for (std::size_t k = 0; k < g.size(); ++k) u[k] = 2.0 * g.center(k).x;
        const Field r = diffusion_flux(g, u, D);
        CHECK(r.at(5, 5) == doctest::Approx(0.0).scale(1.0));
        // walls: one face carries D (du/dx) / h = 2 / 0.5
        CHECK(r.at(0, 5) == doctest::Approx(4.0));
        CHECK(r.at(11, 5) == doctest::Approx(-4.0));
    }
    SUBCASE("symmetric bump") {
        Field u(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const Point c = g.center(k);
            u[k] = std::exp(-((c.x - 3.0) * (c.x - 3.0) + (c.y - 2.5) * (c.y - 2.5)));
        }
        const Field r = diffusion_flux(g, u, D);
        CHECK(r.at(5, 4) < 0.0);
        CHECK(r.at(5, 4) == doctest::Approx(r.at(6, 5)));
        CHECK(r.at(2, 4) == doctest::Approx(r.at(9, 5)));
    }
}

TEST_CASE("diffusion conserves mass and uses harmonic faces") {
    const Grid g({0, 0}, 9, 7, 0.5);
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const Field D = testing::random_field(g, rng, 0.2, 3.0);
        const Field u = testing::random_field(g, rng, 0.0, 10.0);
        CHECK(integrate(g, diffusion_flux(g, u, D)) == doctest::Approx(0.0).scale(100.0));
    }
    const Grid two({0, 0}, 4, 4, 1.0);
    Field D(two, 1.0);
    D.at(1, 1) = 3.0;
    Field u(two, 0.0);
    u.at(1, 1) = 1.0;
    const Field r = diffusion_flux(two, u, D);
    // face between D = 3 and D = 1 carries 2 * 3 * 1 / 4 = 1.5
    CHECK(r.at(0, 1) == doctest::Approx(1.5));
    CHECK(r.at(1, 1) == doctest::Approx(-6.0));
}

TEST_CASE("one explicit step inside the limits keeps fields nonnegative") {
    const Grid g({0, 0}, 20, 12, 0.5);
    const Field D(g, 1.0);
    const DiffusionOperator op(g, D);
    std::mt19937_64 rng(21);
    const Velocity w{10.0, 5.0};
    const double h = g.h();
    const double dt = 0.9 * std::min(h * h / 4.0, h / 15.0);
    std::vector<double> out(g.size());
    for (int trial = 0; trial < 100; ++trial) {
        Field u = testing::random_field(g, rng, 0.0, 1.0);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (rng() % 3 == 0) u[k] = 0.0;
        }
        op.apply(u.values(), out);
        Field v = u;
        for (std::size_t k = 0; k < g.size(); ++k) v[k] += dt * out[k];
        CHECK(v.min() >= 0.0);
        advection_divergence(g, v.values(), w, BoundaryMode::outflow, out);
        for (std::size_t k = 0; k < g.size(); ++k) v[k] -= dt * out[k];
        CHECK(v.min() >= 0.0);
    }
}

#pragma once

#include <cmath>
#include <random>

#include "vhsim/config.hpp"
#include "vhsim/grid.hpp"
#include "vhsim/model.hpp"

namespace testing {

/// 20 x 12 km box, h = 0.5, one site at (6, 6) with a bump of amplitude 10.
inline vhsim::ScenarioConfig small_config() {
    vhsim::ScenarioConfig c;
    c.name = "small";
    c.domain = {{0.0, 0.0}, {20.0, 12.0}, 0.5, vhsim::BoundaryMode::outflow};
    c.subregions = {{1, {6.0, 6.0}, 3.0}};
    c.parameters.hosts.resize(1);
    c.initial.Vs = vhsim::InitialSpec::constant(1000.0);
    c.initial.Vi = vhsim::InitialSpec::scaled("I1", 1.0);
    vhsim::InitialConditions::Host h;
    h.S = vhsim::InitialSpec::gaussian({10.0, {6.0, 6.0}, 1.0});
    h.E = vhsim::InitialSpec::scaled("S1", 0.01);
    h.I = vhsim::InitialSpec::scaled("S1", 0.01);
    c.initial.hosts = {h};
    c.solver.t_end = 0.5;
    c.solver.output_stride = 10;
    c.solver.snapshot_times = {0.0, 0.25, 0.5};
    return c;
}

/// Grid whose cell centers fall on x, y = +-L (origin -L - h/2) with the
/// open box (-L, L)^2 as the Dirichlet domain.
struct NodeAlignedSquare {
    vhsim::Grid grid;
    vhsim::Mask box;
};

inline NodeAlignedSquare node_aligned_square(double L, double h) {
    const auto n = static_cast<std::size_t>(std::lround(2.0 * L / h)) + 1;
    vhsim::Grid grid({-L - h / 2, -L - h / 2}, n, n, h);
    auto box = vhsim::build_box_mask(grid, {-L, -L}, {L, L}, false);
    return {grid, box};
}

inline vhsim::Field random_field(const vhsim::Grid& grid, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    vhsim::Field f(grid);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = dist(rng);
    return f;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing

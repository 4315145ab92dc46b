#pragma once

#include <span>
#include <vector>

#include "vhsim/grid.hpp"
#include "vhsim/model.hpp"

namespace vhsim {

/// Mask-local rates of the three host compartments.
struct HostRates {
    std::vector<double> dS;
    std::vector<double> dE;
    std::vector<double> dI;
};

/// SEIR reaction on the cells of one subregion:
///   dS = -sigma S V_i,  dE = sigma S V_i - lambda E,  dI = lambda E - delta I.
/// `vi` holds V_i on the mask cells.
HostRates host_reaction(const HostState& host, const HostParams& hp, std::span<const double> vi,
                        double lambda, double delta);

/// Same, reading V_i from the full state for subregion j.
HostRates host_reaction(const SimState& state, const ModelParams& params, const Mask& mask, std::size_t j);

/// Masked five-point diffusion with zero flux across the mask boundary:
/// D_1j drives S and E, D_2j drives I. Throws ConfigError when the
/// parameters are not in two_region_diffusive mode.
HostRates host_diffusion(const Grid& grid, const Mask& mask, const HostState& host, const HostParams& hp,
                         HostMode mode);

HostRates host_diffusion(const SimState& state, const ModelParams& params, const Grid& grid, const Mask& mask,
                         std::size_t j);

/// S_0(x) exp(-sigma(x) * vi_integral(x)), where vi_integral is the
/// accumulated time integral of V_i at each mask cell.
std::vector<double> closed_form_S(std::span<const double> S0, std::span<const double> sigma,
                                  std::span<const double> vi_integral);

}  // namespace vhsim

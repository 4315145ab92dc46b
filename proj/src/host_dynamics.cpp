#include "vhsim/host_dynamics.hpp"

#include <cmath>

#include "vhsim/errors.hpp"

namespace vhsim {

HostRates host_reaction(const HostState& host, const HostParams& hp, std::span<const double> vi,
                        double lambda, double delta) {
    const std::size_t n = host.S.size();
    HostRates r{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t m = 0; m < n; ++m) {
        const double infection = hp.host_infection[m] * host.S[m] * vi[m];
        r.dS[m] = -infection;
        r.dE[m] = infection - lambda * host.E[m];
        r.dI[m] = lambda * host.E[m] - delta * host.I[m];
    }
    return r;
}

HostRates host_reaction(const SimState& state, const ModelParams& params, const Mask& mask, std::size_t j) {
    const auto vi = restrict_to(mask, state.Vi);
    return host_reaction(state.hosts[j], params.hosts[j], vi, params.incubation_rate, params.removal_rate);
}

namespace {

void masked_diffusion(const Mask& mask, double inv_h2, std::span<const double> D, std::span<const double> u,
                      std::span<double> out) {
    const std::size_t n = mask.count();
    for (std::size_t m = 0; m < n; ++m) {
        double acc = 0.0;
        for (int d = 0; d < 4; ++d) {
            const std::ptrdiff_t nb = mask.local_neighbor(m, d);
            if (nb < 0) continue;
            const auto q = static_cast<std::size_t>(nb);
            const double dm = D[m];
            const double dq = D[q];
            const double face = (dm + dq) > 0.0 ? 2.0 * dm * dq / (dm + dq) : 0.0;
            acc += face * (u[q] - u[m]);
        }
        out[m] = acc * inv_h2;
    }
}

}  // namespace

HostRates host_diffusion(const Grid& grid, const Mask& mask, const HostState& host, const HostParams& hp,
                         HostMode mode) {
    if (mode != HostMode::two_region_diffusive) {
        throw ConfigError("host diffusion requires two_region_diffusive mode");
    }
    if (hp.diffusivity_se.size() != mask.count() || hp.diffusivity_i.size() != mask.count()) {
        throw ConfigError("host diffusivities are not defined on the subregion mask");
    }
    const std::size_t n = mask.count();
    const double inv_h2 = 1.0 / grid.cell_area();
    HostRates r{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    masked_diffusion(mask, inv_h2, hp.diffusivity_se, host.S, r.dS);
    masked_diffusion(mask, inv_h2, hp.diffusivity_se, host.E, r.dE);
    masked_diffusion(mask, inv_h2, hp.diffusivity_i, host.I, r.dI);
    return r;
}

HostRates host_diffusion(const SimState& state, const ModelParams& params, const Grid& grid, const Mask& mask,
                         std::size_t j) {
    return host_diffusion(grid, mask, state.hosts[j], params.hosts[j], params.mode);
}

std::vector<double> closed_form_S(std::span<const double> S0, std::span<const double> sigma,
                                  std::span<const double> vi_integral) {
    std::vector<double> out(S0.size());
    for (std::size_t m = 0; m < S0.size(); ++m) out[m] = S0[m] * std::exp(-sigma[m] * vi_integral[m]);
    return out;
}

}  // namespace vhsim

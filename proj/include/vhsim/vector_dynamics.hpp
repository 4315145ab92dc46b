#pragma once

#include <span>
#include <vector>

#include "vhsim/grid.hpp"
#include "vhsim/model.hpp"

namespace vhsim {

/// f(x) = alpha_j(x) I_j(x) V_s(x) on mask j, zero off every mask.
Field incidence(const SimState& state, const ModelParams& params, std::span<const Mask> masks);

struct VectorRates {
    Field dVs;
    Field dVi;
};

/// Pointwise reaction rates
///   dV_s = beta V - m V_s V - f
///   dV_i = -m V_i V + f,        V = V_s + V_i.
VectorRates vector_reaction(const SimState& state, const ModelParams& params, const Field& f);

/// Conservative five-point operator div(D grad u) with harmonic-mean face
/// diffusivities and zero flux through the outer boundary. Face
/// coefficients are computed once; apply() is allocation-free.
class DiffusionOperator {
public:
    DiffusionOperator(const Grid& grid, const Field& D);

    /// out = div(D grad u), per unit area per month.
    void apply(std::span<const double> u, std::span<double> out) const;

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

private:
    Grid grid_;
    std::vector<double> dx_face_;  // (nx-1) * ny, face between (i, j) and (i+1, j), divided by h^2
    std::vector<double> dy_face_;  // nx * (ny-1), face between (i, j) and (i, j+1), divided by h^2
};

/// div(D grad u) as a field.
Field diffusion_flux(const Grid& grid, const Field& field, const Field& D);

/// First-order upwind divergence div(w u) for a constant velocity w.
/// In outflow mode the boundary faces carry w.n u_cell (zero-gradient
/// ghost, so inflow faces import the boundary cell's own value); in
/// zero_flux mode they carry nothing. Returns the net outward boundary
/// transport rate (amount per month) through `outflow` when requested.
void advection_divergence(const Grid& grid, std::span<const double> u, Velocity w, BoundaryMode mode,
                          std::span<double> out, double* outflow = nullptr);

Field advection_flux(const Grid& grid, const Field& field, Velocity w,
                     BoundaryMode mode = BoundaryMode::outflow, double* outflow = nullptr);

}  // namespace vhsim

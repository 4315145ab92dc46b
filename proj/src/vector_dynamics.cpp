#include "vhsim/vector_dynamics.hpp"

#include <algorithm>

#include "vhsim/errors.hpp"

namespace vhsim {

Field incidence(const SimState& state, const ModelParams& params, std::span<const Mask> masks) {
    Field f = state.Vs;
    std::fill(f.values().begin(), f.values().end(), 0.0);
    f.set_units("vectors/(km^2 month)");
    for (std::size_t j = 0; j < masks.size(); ++j) {
        const auto cells = masks[j].cells();
        const auto& alpha = params.hosts[j].vector_infection;
        const auto& I = state.hosts[j].I;
        for (std::size_t m = 0; m < cells.size(); ++m) {
            f[cells[m]] = alpha[m] * I[m] * state.Vs[cells[m]];
        }
    }
    return f;
}

VectorRates vector_reaction(const SimState& state, const ModelParams& params, const Field& f) {
    VectorRates r{state.Vs, state.Vi};
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double vs = state.Vs[k];
        const double vi = state.Vi[k];
        const double v = vs + vi;
        r.dVs[k] = params.birth[k] * v - params.mortality[k] * vs * v - f[k];
        r.dVi[k] = -params.mortality[k] * vi * v + f[k];
    }
    r.dVs.set_units("vectors/(km^2 month)");
    r.dVi.set_units("vectors/(km^2 month)");
    return r;
}

namespace {

double harmonic(double a, double b) {
    return (a + b) > 0.0 ? 2.0 * a * b / (a + b) : 0.0;
}

}  // namespace

DiffusionOperator::DiffusionOperator(const Grid& grid, const Field& D) : grid_(grid) {
    if (!D.matches(grid)) throw ConfigError("diffusivity field does not match grid");
    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    dx_face_.resize((nx - 1) * ny);
    dy_face_.resize(nx * (ny - 1));
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            dx_face_[j * (nx - 1) + i] = harmonic(D.at(i, j), D.at(i + 1, j)) * inv_h2;
        }
    }
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            dy_face_[j * nx + i] = harmonic(D.at(i, j), D.at(i, j + 1)) * inv_h2;
        }
    }
}

void DiffusionOperator::apply(std::span<const double> u, std::span<double> out) const {
    const std::size_t nx = grid_.nx();
    const std::size_t ny = grid_.ny();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < ny; ++j) {
        const std::size_t row = j * nx;
        const double* c = &dx_face_[j * (nx - 1)];
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const double flux = c[i] * (u[row + i + 1] - u[row + i]);
            out[row + i] += flux;
            out[row + i + 1] -= flux;
        }
    }
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        const std::size_t row = j * nx;
        const double* c = &dy_face_[row];
        for (std::size_t i = 0; i < nx; ++i) {
            const double flux = c[i] * (u[row + nx + i] - u[row + i]);
            out[row + i] += flux;
            out[row + nx + i] -= flux;
        }
    }
}

Field diffusion_flux(const Grid& grid, const Field& field, const Field& D) {
    if (!field.matches(grid)) throw ConfigError("diffusion_flux: field does not match grid");
    Field out(grid, 0.0, field.units().empty() ? std::string{} : field.units() + "/month");
    DiffusionOperator(grid, D).apply(field.values(), out.values());
    return out;
}

void advection_divergence(const Grid& grid, std::span<const double> u, Velocity w, BoundaryMode mode,
                          std::span<double> out, double* outflow) {
    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    const double inv_h = 1.0 / grid.h();
    const bool open = mode == BoundaryMode::outflow;
    std::fill(out.begin(), out.end(), 0.0);
    double boundary = 0.0;  // sum of outward face fluxes (per unit face length)

    if (w.x != 0.0) {
        const bool pos = w.x > 0.0;
        for (std::size_t j = 0; j < ny; ++j) {
            const std::size_t row = j * nx;
            for (std::size_t i = 0; i + 1 < nx; ++i) {
                const double flux = w.x * (pos ? u[row + i] : u[row + i + 1]) * inv_h;
                out[row + i] += flux;
                out[row + i + 1] -= flux;
            }
            if (open) {
                const double west = w.x * u[row] * inv_h;
                const double east = w.x * u[row + nx - 1] * inv_h;
                out[row] -= west;
                out[row + nx - 1] += east;
                boundary += (east - west);
            }
        }
    }
    if (w.y != 0.0) {
        const bool pos = w.y > 0.0;
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            const std::size_t row = j * nx;
            for (std::size_t i = 0; i < nx; ++i) {
                const double flux = w.y * (pos ? u[row + i] : u[row + nx + i]) * inv_h;
                out[row + i] += flux;
                out[row + nx + i] -= flux;
            }
        }
        if (open) {
            const std::size_t top = (ny - 1) * nx;
            for (std::size_t i = 0; i < nx; ++i) {
                const double south = w.y * u[i] * inv_h;
                const double north = w.y * u[top + i] * inv_h;
                out[i] -= south;
                out[top + i] += north;
                boundary += (north - south);
            }
        }
    }
    // each boundary face flux was scaled by 1/h; one face carries h of length
    // and the divergence is per unit area, so the amount rate is flux * h^2
    if (outflow != nullptr) *outflow = boundary * grid.cell_area();
}

Field advection_flux(const Grid& grid, const Field& field, Velocity w, BoundaryMode mode, double* outflow) {
    if (!field.matches(grid)) throw ConfigError("advection_flux: field does not match grid");
    Field out(grid, 0.0, field.units().empty() ? std::string{} : field.units() + "/month");
    advection_divergence(grid, field.values(), w, mode, out.values(), outflow);
    return out;
}

}  // namespace vhsim

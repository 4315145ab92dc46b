#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vhsim/grid.hpp"

namespace vhsim {

/// A * exp(1 - |x - center|^2 / (2 w)), isotropic. The integral over the
/// plane is A e 2 pi w.
struct GaussianBump {
    double amplitude{0.0};  // per km^2
    Point center{};
    double width{1.0};      // km^2

    [[nodiscard]] double operator()(Point p) const noexcept;
    [[nodiscard]] double plane_integral() const noexcept;

    bool operator==(const GaussianBump&) const = default;
};

/// Coefficient field: a constant base plus an optional Gaussian bump.
struct CoefficientSpec {
    double base{0.0};
    std::optional<GaussianBump> bump;

    [[nodiscard]] Field sample(const Grid& grid, std::string units = {}) const;
    bool operator==(const CoefficientSpec&) const = default;
};

/// Initial condition of one compartment.
///   constant: value everywhere (restricted to the mask for host fields)
///   gaussian: bump sampled at cell centers
///   scaled:   factor * (another compartment), named "S1", "E2", "I1", "Vs", "Vi"
///             where the digit is the 1-based position in the subregion list
struct InitialSpec {
    enum class Kind { constant, gaussian, scaled };
    Kind kind{Kind::constant};
    double value{0.0};
    GaussianBump bump{};
    std::string source;
    double factor{1.0};

    static InitialSpec constant(double v) { return {Kind::constant, v, {}, {}, 1.0}; }
    static InitialSpec gaussian(GaussianBump b) { return {Kind::gaussian, 0.0, b, {}, 1.0}; }
    static InitialSpec scaled(std::string src, double f) { return {Kind::scaled, 0.0, {}, std::move(src), f}; }

    bool operator==(const InitialSpec&) const = default;
};

struct Velocity {
    double x{0.0};
    double y{0.0};

    [[nodiscard]] double norm() const noexcept;
    bool operator==(const Velocity&) const = default;
};

enum class HostMode { n_region_nondiffusive, two_region_diffusive };

std::string to_string(HostMode mode);
HostMode host_mode_from_string(const std::string& name);

/// Per-subregion host coefficients, sampled on the mask cells.
struct HostParams {
    std::vector<double> host_infection;    // sigma_j, km^2/(month vector)
    std::vector<double> vector_infection;  // alpha_j, km^2/(month host)
    std::vector<double> diffusivity_se;    // D_1j, km^2/month (diffusive mode only)
    std::vector<double> diffusivity_i;     // D_2j, km^2/month (diffusive mode only)
};

/// All coefficients of the coupled system, sampled on the grid.
struct ModelParams {
    Field diffusivity;          // D, km^2/month
    Velocity transport;         // w, km/month; the vector density moves along w
    Field birth;                // beta, 1/month
    Field mortality;            // m, km^2/(month vector)
    std::vector<HostParams> hosts;
    double incubation_rate{4.0};  // lambda, 1/month
    double removal_rate{1.0};     // delta, 1/month
    HostMode mode{HostMode::n_region_nondiffusive};
};

struct ParamBounds {
    double D_m{0.0};
    double D_M{0.0};
    double beta_star{0.0};
    double m_lower{0.0};
    double m_upper{0.0};
};

/// Exact min/max of the coefficient fields. Throws AssumptionViolation
/// (A2 or A6) when D_m <= 0 or m_* <= 0.
ParamBounds param_bounds(const ModelParams& params);

/// Pointwise logistic equilibrium beta(x) / m(x).
Field carrying_capacity(const ModelParams& params);

/// Host compartments of one subregion, stored on its mask cells.
struct HostState {
    std::vector<double> S;
    std::vector<double> E;
    std::vector<double> I;

    bool operator==(const HostState&) const = default;
};

struct SimState {
    double t{0.0};
    Field Vs;  // vectors/km^2
    Field Vi;  // vectors/km^2
    std::vector<HostState> hosts;

    bool operator==(const SimState&) const = default;
};

/// Initial conditions for every compartment.
struct InitialConditions {
    InitialSpec Vs{InitialSpec::constant(0.0)};
    InitialSpec Vi{InitialSpec::constant(0.0)};
    struct Host {
        InitialSpec S{InitialSpec::constant(0.0)};
        InitialSpec E{InitialSpec::constant(0.0)};
        InitialSpec I{InitialSpec::constant(0.0)};
        bool operator==(const Host&) const = default;
    };
    std::vector<Host> hosts;

    bool operator==(const InitialConditions&) const = default;
};

/// Builds the t = 0 state. Scaled copies are resolved in dependency order;
/// host values outside their masks are zero by construction, and a scaled
/// vector field copied from a host compartment is zero off that mask.
/// Throws ConfigError for negative amplitudes, bumps centered outside their
/// subregion, unknown or cyclic sources.
SimState build_initial_state(const Grid& grid, std::span<const SubregionSpec> subs,
                             std::span<const Mask> masks, const InitialConditions& init);

/// Full-grid view of a host compartment (zero outside the mask).
Field host_field(const Grid& grid, const Mask& mask, std::span<const double> values);

/// Checks the assumptions verifiable on discrete data: A2, A4 (finite
/// constant velocity), A5, A6, A8 (diffusive mode), A9, A10, A11, A12.
/// Throws AssumptionViolation naming the label.
void validate_assumptions(const ModelParams& params, const SimState& initial);

}  // namespace vhsim

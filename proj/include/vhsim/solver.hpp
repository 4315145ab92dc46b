#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vhsim/diagnostics.hpp"
#include "vhsim/grid.hpp"
#include "vhsim/model.hpp"
#include "vhsim/vector_dynamics.hpp"

namespace vhsim {

struct SolverConfig {
    double dt_max{0.05};       // months
    double cfl_safety{0.9};    // in (0, 1]
    double t_end{12.0};        // months
    std::size_t output_stride{25};
    HostMode mode{HostMode::n_region_nondiffusive};
    std::vector<double> snapshot_times;  // months

    bool operator==(const SolverConfig&) const = default;
};

enum class ViolationPolicy { abort, warn };

std::string to_string(ViolationPolicy policy);
ViolationPolicy violation_policy_from_string(const std::string& name);

struct DiagnosticsConfig {
    double outbreak_threshold{1.0};  // hosts
    ViolationPolicy policy{ViolationPolicy::abort};
    double convergence_window{2.0};  // months
    double budget_tolerance{1e-6};   // relative to the initial host total

    bool operator==(const DiagnosticsConfig&) const = default;
};

/// Largest stable step of each explicit sub-step, already scaled by the
/// CFL safety factor:
///   advection  (|w_x| + |w_y|) dt / h <= cfl
///   diffusion  4 D_max dt / h^2 <= cfl        (D_max includes host diffusivities)
///   reaction   dt * max_rate <= cfl
/// where max_rate = max(beta*, lambda, delta, sigma_max V_bound,
/// m* V_bound + alpha_max H_bound), V_bound = max{beta*/m_*, max V(0)} and
/// H_bound the largest initial S + E + I peak sum over the subregions.
struct StabilityLimits {
    double advection_dt{0.0};
    double diffusion_dt{0.0};
    double reaction_dt{0.0};
    double vector_bound{0.0};
    double host_bound{0.0};
    double max_rate{0.0};

    [[nodiscard]] double dt() const noexcept;
};

/// What one step moved across the boundary and produced by reaction.
struct StepTally {
    double outflow{0.0};          // vectors leaving through the outer boundary
    double logistic_source{0.0};  // int (beta V - m V^2) dt
};

/// Operator-split explicit stepper. Per step: (1) incidence and all
/// reactions from the old state, (2) vector diffusion, (3) vector
/// advection, (4) host diffusion in diffusive mode. Each sub-step is
/// monotone under the limits above, so nonnegativity and the vector sup
/// bound carry over from step to step.
class Integrator {
public:
    Integrator(Grid grid, std::vector<Mask> masks, ModelParams params, BoundaryMode boundary, double cfl_safety,
               const SimState& initial);

    [[nodiscard]] const StabilityLimits& limits() const noexcept { return limits_; }
    [[nodiscard]] double stable_dt() const noexcept { return limits_.dt(); }
    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<Mask>& masks() const noexcept { return masks_; }
    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] BoundaryMode boundary() const noexcept { return boundary_; }

    /// Advances `state` by dt in place. Throws StabilityError when dt exceeds
    /// the stable step or a non-finite value appears.
    StepTally step(SimState& state, double dt);

private:
    Grid grid_;
    std::vector<Mask> masks_;
    ModelParams params_;
    BoundaryMode boundary_;
    DiffusionOperator diffusion_;
    StabilityLimits limits_;
    std::vector<double> scratch_;
    std::vector<std::vector<double>> incidence_;
};

/// Receives run output. Snapshots and records are handed over by const
/// reference and must be copied if kept.
class RunSink {
public:
    virtual ~RunSink() = default;
    virtual void on_record(const DiagnosticsRecord& record) { (void)record; }
    virtual void on_snapshot(const SimState& state) { (void)state; }
};

struct RunResult {
    DiagnosticsSeries series;
    SimState final_state;
    double dt{0.0};          // nominal step (segments may shorten it to land on stop times)
    std::size_t steps{0};
    /// int_0^t V_i dtau on each mask cell, accumulated with the step's own
    /// left-endpoint rule.
    std::vector<std::vector<double>> vi_integral;
    InvariantFlags violations;  // union over every step
    std::size_t violating_steps{0};
};

/// Steps from initial.t to cfg.t_end, landing exactly on every snapshot
/// time. Invariants are checked after every step; records are kept every
/// output_stride steps and at every stop time. Under the abort policy a
/// fatal violation is recorded, handed to the sink, and then raised as
/// InvariantViolation. Deterministic for a fixed configuration.
RunResult run(const SimState& initial, Integrator& integrator, const SolverConfig& cfg,
              const DiagnosticsConfig& dcfg, RunSink* sink = nullptr);

}  // namespace vhsim

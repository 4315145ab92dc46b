#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vhsim/grid.hpp"
#include "vhsim/model.hpp"
#include "vhsim/solver.hpp"

namespace vhsim {

/// Coefficients of one subregion, as written in the config.
struct HostCoefficients {
    CoefficientSpec host_infection{1.0, {}};      // sigma_j
    CoefficientSpec vector_infection{0.005, {}};  // alpha_j
    CoefficientSpec diffusivity_se{0.0, {}};      // D_1j, diffusive mode only
    CoefficientSpec diffusivity_i{0.0, {}};       // D_2j, diffusive mode only

    bool operator==(const HostCoefficients&) const = default;
};

struct ParameterSpec {
    CoefficientSpec diffusivity{1.0, {}};
    Velocity transport{};  // w = -C
    CoefficientSpec birth{1.0, {}};
    CoefficientSpec mortality{0.001, {}};
    std::vector<HostCoefficients> hosts;
    double incubation_rate{4.0};
    double removal_rate{1.0};

    bool operator==(const ParameterSpec&) const = default;
};

struct ScenarioConfig {
    std::string name{"scenario"};
    DomainSpec domain{};
    std::vector<SubregionSpec> subregions;
    ParameterSpec parameters;
    InitialConditions initial;
    SolverConfig solver;
    DiagnosticsConfig diagnostics;
    std::string output_directory{"."};

    bool operator==(const ScenarioConfig&) const = default;
};

/// Everything a run needs, sampled on the grid.
struct Scenario {
    ScenarioConfig config;
    Grid grid;
    std::vector<Mask> masks;
    ModelParams params;
    SimState initial;
};

/// Builds grid, masks, coefficient fields and the initial state, then runs
/// every assumption check. Throws ConfigError / AssumptionViolation.
Scenario build_scenario(const ScenarioConfig& config);

/// Parses YAML text. Errors carry "<source>:<line>:". Unknown keys are
/// rejected. The result is validated with build_scenario.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Reads a config file, or a built-in preset when `path_or_preset` names
/// one and no such file exists. Throws IoError for unreadable files.
ScenarioConfig load_config(const std::string& path_or_preset);

/// Emits every field, defaults included, with round-trip precision.
std::string write_config(const ScenarioConfig& config);

std::vector<std::string> preset_names();
std::optional<ScenarioConfig> builtin_preset(const std::string& name);

}  // namespace vhsim

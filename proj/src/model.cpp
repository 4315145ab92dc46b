#include "vhsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>

#include "vhsim/errors.hpp"

namespace vhsim {

double GaussianBump::operator()(Point p) const noexcept {
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    return amplitude * std::exp(1.0 - (dx * dx + dy * dy) / (2.0 * width));
}

double GaussianBump::plane_integral() const noexcept {
    return amplitude * std::numbers::e * 2.0 * std::numbers::pi * width;
}

Field CoefficientSpec::sample(const Grid& grid, std::string units) const {
    Field out(grid, base, std::move(units));
    if (bump) {
        for (std::size_t k = 0; k < grid.size(); ++k) out[k] += (*bump)(grid.center(k));
    }
    return out;
}

double Velocity::norm() const noexcept { return std::hypot(x, y); }

std::string to_string(HostMode mode) {
    return mode == HostMode::two_region_diffusive ? "two_region_diffusive" : "n_region_nondiffusive";
}

HostMode host_mode_from_string(const std::string& name) {
    if (name == "n_region_nondiffusive") return HostMode::n_region_nondiffusive;
    if (name == "two_region_diffusive") return HostMode::two_region_diffusive;
    throw ConfigError("unknown host mode '" + name +
                      "' (expected n_region_nondiffusive or two_region_diffusive)");
}

ParamBounds param_bounds(const ModelParams& params) {
    ParamBounds b;
    b.D_m = params.diffusivity.min();
    b.D_M = params.diffusivity.max();
    b.beta_star = params.birth.max();
    b.m_lower = params.mortality.min();
    b.m_upper = params.mortality.max();
    if (!(b.D_m > 0.0)) {
        throw AssumptionViolation("A2", "D must satisfy D(x) >= D_m > 0 (found min " +
                                            std::to_string(b.D_m) + ")");
    }
    if (!(b.m_lower > 0.0)) {
        throw AssumptionViolation("A6", "m must be >= m_* > 0 (found min " +
                                            std::to_string(b.m_lower) + ")");
    }
    return b;
}

Field carrying_capacity(const ModelParams& params) {
    Field out = params.birth;
    out.set_units("vectors/km^2");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = params.birth[k] / params.mortality[k];
    return out;
}

Field host_field(const Grid& grid, const Mask& mask, std::span<const double> values) {
    return expand(grid, mask, values, "hosts/km^2");
}

namespace {

void require_nonnegative_spec(const InitialSpec& spec, const std::string& name) {
    switch (spec.kind) {
        case InitialSpec::Kind::constant:
            if (!(spec.value >= 0.0)) throw ConfigError(name + ": constant initial value must be >= 0");
            break;
        case InitialSpec::Kind::gaussian:
            if (!(spec.bump.amplitude >= 0.0)) throw ConfigError(name + ": bump amplitude must be >= 0");
            if (!(spec.bump.width > 0.0)) throw ConfigError(name + ": bump width must be > 0");
            break;
        case InitialSpec::Kind::scaled:
            if (!(spec.factor >= 0.0)) throw ConfigError(name + ": scale factor must be >= 0");
            break;
    }
}

}  // namespace

SimState build_initial_state(const Grid& grid, std::span<const SubregionSpec> subs,
                             std::span<const Mask> masks, const InitialConditions& init) {
    if (init.hosts.size() != subs.size() || masks.size() != subs.size()) {
        throw ConfigError("initial conditions must be given for every subregion");
    }

    // name -> (spec, mask index or -1 for vector fields)
    std::map<std::string, std::pair<const InitialSpec*, std::ptrdiff_t>> specs;
    specs["Vs"] = {&init.Vs, -1};
    specs["Vi"] = {&init.Vi, -1};
    for (std::size_t j = 0; j < subs.size(); ++j) {
        const std::string n = std::to_string(j + 1);
        specs["S" + n] = {&init.hosts[j].S, static_cast<std::ptrdiff_t>(j)};
        specs["E" + n] = {&init.hosts[j].E, static_cast<std::ptrdiff_t>(j)};
        specs["I" + n] = {&init.hosts[j].I, static_cast<std::ptrdiff_t>(j)};
    }

    std::map<std::string, Field> done;
    std::set<std::string> visiting;
    std::function<const Field&(const std::string&)> resolve = [&](const std::string& name) -> const Field& {
        if (auto it = done.find(name); it != done.end()) return it->second;
        auto it = specs.find(name);
        if (it == specs.end()) throw ConfigError("initial condition refers to unknown compartment '" + name + "'");
        if (!visiting.insert(name).second) throw ConfigError("cyclic initial condition at '" + name + "'");
        const auto [spec, j] = it->second;
        require_nonnegative_spec(*spec, name);

        Field f(grid, 0.0, j < 0 ? "vectors/km^2" : "hosts/km^2");
        switch (spec->kind) {
            case InitialSpec::Kind::constant:
                for (std::size_t k = 0; k < grid.size(); ++k) f[k] = spec->value;
                break;
            case InitialSpec::Kind::gaussian: {
                if (j >= 0) {
                    const auto& s = subs[static_cast<std::size_t>(j)];
                    if (std::hypot(spec->bump.center.x - s.center.x, spec->bump.center.y - s.center.y) > s.radius) {
                        throw ConfigError(name + ": bump is centered outside subregion " + std::to_string(s.id));
                    }
                }
                for (std::size_t k = 0; k < grid.size(); ++k) f[k] = spec->bump(grid.center(k));
                break;
            }
            case InitialSpec::Kind::scaled: {
                const Field& src = resolve(spec->source);
                for (std::size_t k = 0; k < grid.size(); ++k) f[k] = spec->factor * src[k];
                break;
            }
        }
        if (j >= 0) {
            const Mask& mask = masks[static_cast<std::size_t>(j)];
            for (std::size_t k = 0; k < grid.size(); ++k) {
                if (!mask.contains(k)) f[k] = 0.0;
            }
        }
        visiting.erase(name);
        return done.emplace(name, std::move(f)).first->second;
    };

    SimState state;
    state.t = 0.0;
    state.Vs = resolve("Vs");
    state.Vi = resolve("Vi");
    for (std::size_t j = 0; j < subs.size(); ++j) {
        const std::string n = std::to_string(j + 1);
        HostState h;
        h.S = restrict_to(masks[j], resolve("S" + n));
        h.E = restrict_to(masks[j], resolve("E" + n));
        h.I = restrict_to(masks[j], resolve("I" + n));
        state.hosts.push_back(std::move(h));
    }
    return state;
}

namespace {

double min_of(std::span<const double> v) {
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void validate_assumptions(const ModelParams& params, const SimState& initial) {
    if (!all_finite(params.diffusivity.values()) || !all_finite(params.birth.values()) ||
        !all_finite(params.mortality.values())) {
        throw AssumptionViolation("A1", "coefficient fields must be finite");
    }
    // D_m > 0 (A2) and m_* > 0 (A6)
    param_bounds(params);
    if (!std::isfinite(params.transport.x) || !std::isfinite(params.transport.y)) {
        throw AssumptionViolation("A4", "transport velocity must be a finite constant (divergence-free)");
    }
    if (!(params.birth.min() >= 0.0)) {
        throw AssumptionViolation("A5", "beta must be >= 0 everywhere");
    }
    if (!(params.incubation_rate > 0.0) || !(params.removal_rate > 0.0)) {
        throw AssumptionViolation("A9", "lambda and delta must be > 0");
    }
    if (params.hosts.size() != initial.hosts.size()) {
        throw ConfigError("host parameters and host state disagree on the subregion count");
    }
    for (std::size_t j = 0; j < params.hosts.size(); ++j) {
        const auto& hp = params.hosts[j];
        const std::string where = " on subregion #" + std::to_string(j + 1);
        if (!(min_of(hp.host_infection) > 0.0) || !(min_of(hp.vector_infection) > 0.0) ||
            !all_finite(hp.host_infection) || !all_finite(hp.vector_infection)) {
            throw AssumptionViolation("A10", "sigma_j and alpha_j must be >= a positive lower bound" + where);
        }
        if (params.mode == HostMode::two_region_diffusive) {
            if (hp.diffusivity_se.size() != hp.host_infection.size() ||
                hp.diffusivity_i.size() != hp.host_infection.size() ||
                !(min_of(hp.diffusivity_se) > 0.0) || !(min_of(hp.diffusivity_i) > 0.0)) {
                throw AssumptionViolation("A8", "host diffusivities must be >= D_* > 0" + where);
            }
        }
        const auto& h = initial.hosts[j];
        if (!(min_of(h.S) >= 0.0) || !(min_of(h.E) >= 0.0) || !(min_of(h.I) >= 0.0) ||
            !all_finite(h.S) || !all_finite(h.E) || !all_finite(h.I)) {
            throw AssumptionViolation("A11", "host initial data must be finite and nonnegative" + where);
        }
    }
    if (!(initial.Vs.min() >= 0.0) || !(initial.Vi.min() >= 0.0) || !all_finite(initial.Vs.values()) ||
        !all_finite(initial.Vi.values())) {
        throw AssumptionViolation("A12", "vector initial data must be finite and nonnegative");
    }
}

}  // namespace vhsim

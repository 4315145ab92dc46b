#include "vhsim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "vhsim/errors.hpp"
#include "vhsim/host_dynamics.hpp"

namespace vhsim {

std::string to_string(ViolationPolicy policy) {
    return policy == ViolationPolicy::abort ? "abort" : "warn";
}

ViolationPolicy violation_policy_from_string(const std::string& name) {
    if (name == "abort") return ViolationPolicy::abort;
    if (name == "warn") return ViolationPolicy::warn;
    throw ConfigError("unknown violation policy '" + name + "' (expected abort or warn)");
}

double StabilityLimits::dt() const noexcept {
    return std::min({advection_dt, diffusion_dt, reaction_dt});
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

StabilityLimits compute_limits(const Grid& grid, const ModelParams& params, double cfl, const SimState& initial) {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl_safety must lie in (0, 1]");
    const ParamBounds b = param_bounds(params);
    StabilityLimits lim;
    const double h = grid.h();

    const double speed = std::abs(params.transport.x) + std::abs(params.transport.y);
    lim.advection_dt = speed > 0.0 ? cfl * h / speed : kInf;

    double d_max = b.D_M;
    double sigma_max = 0.0;
    double alpha_max = 0.0;
    for (const auto& hp : params.hosts) {
        if (params.mode == HostMode::two_region_diffusive) {
            d_max = std::max({d_max, max_of(hp.diffusivity_se), max_of(hp.diffusivity_i)});
        }
        sigma_max = std::max(sigma_max, max_of(hp.host_infection));
        alpha_max = std::max(alpha_max, max_of(hp.vector_infection));
    }
    lim.diffusion_dt = d_max > 0.0 ? cfl * h * h / (4.0 * d_max) : kInf;

    double v0 = 0.0;
    for (std::size_t k = 0; k < initial.Vs.size(); ++k) v0 = std::max(v0, initial.Vs[k] + initial.Vi[k]);
    lim.vector_bound = std::max(b.beta_star / b.m_lower, v0);
    for (const auto& hs : initial.hosts) {
        lim.host_bound = std::max(lim.host_bound, max_of(hs.S) + max_of(hs.E) + max_of(hs.I));
    }
    lim.max_rate = std::max({b.beta_star, params.incubation_rate, params.removal_rate,
                             sigma_max * lim.vector_bound,
                             b.m_upper * lim.vector_bound + alpha_max * lim.host_bound});
    lim.reaction_dt = lim.max_rate > 0.0 ? cfl / lim.max_rate : kInf;
    return lim;
}

}  // namespace

Integrator::Integrator(Grid grid, std::vector<Mask> masks, ModelParams params, BoundaryMode boundary,
                       double cfl_safety, const SimState& initial)
    : grid_(std::move(grid)),
      masks_(std::move(masks)),
      params_(std::move(params)),
      boundary_(boundary),
      diffusion_(grid_, params_.diffusivity),
      limits_(compute_limits(grid_, params_, cfl_safety, initial)),
      scratch_(grid_.size()) {
    if (masks_.size() != params_.hosts.size()) {
        throw ConfigError("integrator: one set of host parameters is required per mask");
    }
    incidence_.resize(masks_.size());
    for (std::size_t j = 0; j < masks_.size(); ++j) incidence_[j].resize(masks_[j].count());
}

StepTally Integrator::step(SimState& state, double dt) {
    if (!(dt > 0.0) || dt > stable_dt() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "time step " << dt << " months exceeds the stable limit " << stable_dt()
           << " (advection " << limits_.advection_dt << ", diffusion " << limits_.diffusion_dt << ", reaction "
           << limits_.reaction_dt << ")";
        throw StabilityError(os.str());
    }
    StepTally tally;
    const double lambda = params_.incubation_rate;
    const double delta = params_.removal_rate;
    auto vs = state.Vs.values();
    auto vi = state.Vi.values();

    // (1) reactions, all rates from the old state
    for (std::size_t j = 0; j < masks_.size(); ++j) {
        const auto cells = masks_[j].cells();
        auto& host = state.hosts[j];
        const auto& hp = params_.hosts[j];
        auto& f = incidence_[j];
        for (std::size_t m = 0; m < cells.size(); ++m) {
            const std::size_t k = cells[m];
            f[m] = hp.vector_infection[m] * host.I[m] * vs[k];
            const double s = host.S[m];
            const double e = host.E[m];
            const double i = host.I[m];
            const double infection = hp.host_infection[m] * s * vi[k];
            host.S[m] = s - dt * infection;
            host.E[m] = e + dt * (infection - lambda * e);
            host.I[m] = i + dt * (lambda * e - delta * i);
        }
    }
    double source = 0.0;
    for (std::size_t k = 0; k < vs.size(); ++k) {
        const double s = vs[k];
        const double in = vi[k];
        const double v = s + in;
        const double beta = params_.birth[k];
        const double m = params_.mortality[k];
        source += beta * v - m * v * v;
        vs[k] = s + dt * (beta * v - m * s * v);
        vi[k] = in - dt * (m * in * v);
    }
    tally.logistic_source = source * grid_.cell_area() * dt;
    for (std::size_t j = 0; j < masks_.size(); ++j) {
        const auto cells = masks_[j].cells();
        const auto& f = incidence_[j];
        for (std::size_t m = 0; m < cells.size(); ++m) {
            vs[cells[m]] -= dt * f[m];
            vi[cells[m]] += dt * f[m];
        }
    }

    // (2) vector diffusion
    for (auto field : {vs, vi}) {
        diffusion_.apply(field, scratch_);
        for (std::size_t k = 0; k < field.size(); ++k) field[k] += dt * scratch_[k];
    }

    // (3) vector advection
    if (params_.transport.x != 0.0 || params_.transport.y != 0.0) {
        for (auto field : {vs, vi}) {
            double out = 0.0;
            advection_divergence(grid_, field, params_.transport, boundary_, scratch_, &out);
            for (std::size_t k = 0; k < field.size(); ++k) field[k] -= dt * scratch_[k];
            tally.outflow += dt * out;
        }
    }

    // (4) host diffusion
    if (params_.mode == HostMode::two_region_diffusive) {
        for (std::size_t j = 0; j < masks_.size(); ++j) {
            const HostRates r = host_diffusion(grid_, masks_[j], state.hosts[j], params_.hosts[j], params_.mode);
            auto& host = state.hosts[j];
            for (std::size_t m = 0; m < host.S.size(); ++m) {
                host.S[m] += dt * r.dS[m];
                host.E[m] += dt * r.dE[m];
                host.I[m] += dt * r.dI[m];
            }
        }
    }

    state.t += dt;
    for (std::size_t k = 0; k < vs.size(); ++k) {
        if (!std::isfinite(vs[k]) || !std::isfinite(vi[k])) {
            throw StabilityError("non-finite vector density at t = " + std::to_string(state.t));
        }
    }
    return tally;
}

namespace {

std::vector<double> stop_times(const SolverConfig& cfg, double t0) {
    std::vector<double> stops;
    for (double t : cfg.snapshot_times) {
        if (t > t0 && t < cfg.t_end) stops.push_back(t);
    }
    stops.push_back(cfg.t_end);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    return stops;
}

bool is_snapshot_time(const SolverConfig& cfg, double t) {
    return std::any_of(cfg.snapshot_times.begin(), cfg.snapshot_times.end(),
                       [t](double s) { return std::abs(s - t) <= 1e-12 * std::max(1.0, std::abs(t)); });
}

}  // namespace

RunResult run(const SimState& initial, Integrator& integrator, const SolverConfig& cfg,
              const DiagnosticsConfig& dcfg, RunSink* sink) {
    if (!(cfg.t_end >= initial.t)) throw ConfigError("t_end must not precede the initial time");
    if (!(cfg.dt_max > 0.0)) throw ConfigError("dt_max must be positive");
    if (cfg.output_stride == 0) throw ConfigError("output_stride must be at least 1");

    const Grid& grid = integrator.grid();
    const auto& masks = integrator.masks();
    const ModelParams& params = integrator.params();
    const BoundContext ctx = bound_context(params, initial);
    const double area = grid.cell_area();

    RunResult result;
    result.dt = std::min(cfg.dt_max, integrator.stable_dt());
    result.final_state = initial;
    SimState& state = result.final_state;

    // cumulative quantities
    std::vector<double> exposed_out(masks.size(), 0.0);
    std::vector<double> infected_out(masks.size(), 0.0);
    std::vector<double> initial_total(masks.size(), 0.0);
    result.vi_integral.resize(masks.size());
    for (std::size_t j = 0; j < masks.size(); ++j) {
        result.vi_integral[j].assign(masks[j].count(), 0.0);
        const auto& h = initial.hosts[j];
        initial_total[j] = integrate_local(grid, masks[j], h.S) + integrate_local(grid, masks[j], h.E) +
                           integrate_local(grid, masks[j], h.I);
    }
    double outflow = 0.0;
    double source = 0.0;

    auto annotate = [&](DiagnosticsRecord& rec) {
        rec.step = result.steps;
        rec.outflow = outflow;
        rec.logistic_source = source;
        for (std::size_t j = 0; j < masks.size(); ++j) {
            rec.sites[j].exposed_outflow = exposed_out[j];
            rec.sites[j].infected_outflow = infected_out[j];
            rec.sites[j].initial_total = initial_total[j];
            if (exposed_out[j] + infected_out[j] > initial_total[j] * (1.0 + dcfg.budget_tolerance)) {
                rec.flags.host_budget = true;
            }
        }
    };

    bool warned = false;
    auto handle = [&](DiagnosticsRecord& rec, bool kept) {
        if (rec.flags.any()) {
            result.violations |= rec.flags;
            ++result.violating_steps;
        }
        if (!rec.flags.fatal()) return;
        std::ostringstream os;
        os << "invariant violation at t = " << rec.t << " (step " << rec.step << "): " << rec.flags.describe();
        if (dcfg.policy == ViolationPolicy::abort) {
            if (!kept) {
                result.series.push_back(rec);
                if (sink) sink->on_record(rec);
            }
            throw InvariantViolation(os.str());
        }
        if (!warned) {
            std::cerr << "warning: " << os.str() << " (continuing under warn policy)\n";
            warned = true;
        }
    };

    DiagnosticsRecord rec = measure(state, grid);
    annotate(rec);
    rec.flags |= check_bounds(state, ctx);
    result.series.push_back(rec);
    if (sink) sink->on_record(rec);
    handle(result.series.back(), true);
    if (sink && is_snapshot_time(cfg, state.t)) sink->on_snapshot(state);

    std::vector<double> prev_S(masks.size());
    for (std::size_t j = 0; j < masks.size(); ++j) prev_S[j] = rec.sites[j].S;

    if (cfg.t_end == initial.t) return result;

    double t_start = initial.t;
    for (double stop : stop_times(cfg, initial.t)) {
        const double len = stop - t_start;
        const std::size_t n =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / result.dt * (1.0 - 1e-12))));
        const double dt = len / static_cast<double>(n);
        for (std::size_t s = 1; s <= n; ++s) {
            for (std::size_t j = 0; j < masks.size(); ++j) {
                const auto& h = state.hosts[j];
                double es = 0.0, is = 0.0;
                for (std::size_t m = 0; m < h.E.size(); ++m) {
                    es += h.E[m];
                    is += h.I[m];
                }
                exposed_out[j] += params.incubation_rate * dt * es * area;
                infected_out[j] += params.removal_rate * dt * is * area;
                const auto cells = masks[j].cells();
                auto& acc = result.vi_integral[j];
                for (std::size_t m = 0; m < cells.size(); ++m) acc[m] += dt * state.Vi[cells[m]];
            }
            const StepTally tally = integrator.step(state, dt);
            outflow += tally.outflow;
            source += tally.logistic_source;
            ++result.steps;
            if (s == n) state.t = stop;

            DiagnosticsRecord r = measure(state, grid);
            annotate(r);
            r.flags |= check_bounds(state, ctx);
            for (std::size_t j = 0; j < masks.size(); ++j) {
                if (r.sites[j].S > prev_S[j] + 1e-10 * result.series.front().sites[j].S) {
                    r.flags.monotone_S = true;
                }
                prev_S[j] = r.sites[j].S;
            }
            const bool keep = (result.steps % cfg.output_stride == 0) || s == n;
            if (keep) {
                result.series.push_back(r);
                if (sink) sink->on_record(r);
            }
            handle(r, keep);
        }
        if (sink && is_snapshot_time(cfg, state.t)) sink->on_snapshot(state);
        t_start = stop;
    }
    return result;
}

}  // namespace vhsim

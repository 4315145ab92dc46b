#include "vhsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vhsim {

std::string InvariantFlags::describe() const {
    std::string out;
    auto add = [&](bool f, const char* name) {
        if (!f) return;
        if (!out.empty()) out += ",";
        out += name;
    };
    add(nonfinite, "nonfinite");
    add(negative, "negative");
    add(sup_bound, "sup_bound");
    add(monotone_S, "monotone_S");
    add(host_budget, "host_budget");
    return out.empty() ? "ok" : out;
}

InvariantFlags& InvariantFlags::operator|=(const InvariantFlags& o) noexcept {
    nonfinite |= o.nonfinite;
    negative |= o.negative;
    sup_bound |= o.sup_bound;
    monotone_S |= o.monotone_S;
    host_budget |= o.host_budget;
    return *this;
}

DiagnosticsRecord measure(const SimState& state, const Grid& grid) {
    DiagnosticsRecord r;
    r.t = state.t;
    const double area = grid.cell_area();
    double vs_sum = 0.0;
    double vi_sum = 0.0;
    double vmax = 0.0;
    double vimax = 0.0;
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < state.Vs.size(); ++k) {
        const double vs = state.Vs[k];
        const double vi = state.Vi[k];
        vs_sum += vs;
        vi_sum += vi;
        vmax = std::max(vmax, vs + vi);
        vimax = std::max(vimax, vi);
        vmin = std::min({vmin, vs, vi});
    }
    r.Vs_total = vs_sum * area;
    r.Vi_total = vi_sum * area;
    r.V_total = r.Vs_total + r.Vi_total;
    r.V_max = vmax;
    r.Vi_max = vimax;
    r.sites.resize(state.hosts.size());
    for (std::size_t j = 0; j < state.hosts.size(); ++j) {
        const auto& h = state.hosts[j];
        auto& s = r.sites[j];
        double ss = 0.0, es = 0.0, is = 0.0;
        for (std::size_t m = 0; m < h.S.size(); ++m) {
            ss += h.S[m];
            es += h.E[m];
            is += h.I[m];
            s.S_max = std::max(s.S_max, h.S[m]);
            s.E_max = std::max(s.E_max, h.E[m]);
            s.I_max = std::max(s.I_max, h.I[m]);
            vmin = std::min({vmin, h.S[m], h.E[m], h.I[m]});
        }
        s.S = ss * area;
        s.E = es * area;
        s.I = is * area;
    }
    r.min_value = vmin;
    return r;
}

BoundContext bound_context(const ModelParams& params, const SimState& initial) {
    BoundContext ctx;
    const ParamBounds b = param_bounds(params);
    double vmax0 = 0.0;
    for (std::size_t k = 0; k < initial.Vs.size(); ++k) vmax0 = std::max(vmax0, initial.Vs[k] + initial.Vi[k]);
    ctx.sup_bound = std::max(b.beta_star / b.m_lower, vmax0);
    ctx.vector_scale = std::max(ctx.sup_bound, 1.0);
    double hmax = 0.0;
    for (const auto& h : initial.hosts) {
        for (std::size_t m = 0; m < h.S.size(); ++m) hmax = std::max(hmax, h.S[m] + h.E[m] + h.I[m]);
    }
    ctx.host_scale = std::max(hmax, 1.0);
    return ctx;
}

InvariantFlags check_bounds(const SimState& state, const BoundContext& ctx) {
    InvariantFlags f;
    const double vneg = -1e-12 * ctx.vector_scale;
    const double hneg = -1e-12 * ctx.host_scale;
    const double cap = ctx.sup_bound * (1.0 + 1e-9);
    for (std::size_t k = 0; k < state.Vs.size(); ++k) {
        const double vs = state.Vs[k];
        const double vi = state.Vi[k];
        if (!std::isfinite(vs) || !std::isfinite(vi)) {
            f.nonfinite = true;
            continue;
        }
        if (vs < vneg || vi < vneg) f.negative = true;
        if (vs + vi > cap) f.sup_bound = true;
    }
    for (const auto& h : state.hosts) {
        for (const auto* comp : {&h.S, &h.E, &h.I}) {
            for (double x : *comp) {
                if (!std::isfinite(x)) f.nonfinite = true;
                else if (x < hneg) f.negative = true;
            }
        }
    }
    return f;
}

InvariantFlags check_bounds(const SimState& state, const ModelParams& params, double initial_max_V) {
    BoundContext ctx;
    const ParamBounds b = param_bounds(params);
    ctx.sup_bound = std::max(b.beta_star / b.m_lower, initial_max_V);
    ctx.vector_scale = std::max(ctx.sup_bound, 1.0);
    double hmax = 1.0;
    for (const auto& h : state.hosts) {
        for (std::size_t m = 0; m < h.S.size(); ++m) hmax = std::max(hmax, h.S[m] + h.E[m] + h.I[m]);
    }
    ctx.host_scale = hmax;
    return check_bounds(state, ctx);
}

std::vector<BudgetResidual> check_host_budget(const DiagnosticsSeries& series, double rel_tol) {
    std::vector<BudgetResidual> out;
    if (series.empty()) return out;
    const std::size_t n_sites = series.front().sites.size();
    for (std::size_t j = 0; j < n_sites; ++j) {
        BudgetResidual r;
        r.site = j;
        r.worst_residual = std::numeric_limits<double>::infinity();
        r.exposed_residual = std::numeric_limits<double>::infinity();
        r.infected_residual = std::numeric_limits<double>::infinity();
        double rhs = 0.0;
        for (const auto& rec : series) {
            const auto& s = rec.sites[j];
            rhs = s.initial_total;
            const double residual = rhs - (s.exposed_outflow + s.infected_outflow);
            if (residual < r.worst_residual) {
                r.worst_residual = residual;
                r.worst_time = rec.t;
            }
            r.exposed_residual = std::min(r.exposed_residual, rhs - s.exposed_outflow);
            r.infected_residual = std::min(r.infected_residual, rhs - s.infected_outflow);
        }
        r.violated = r.worst_residual < -rel_tol * rhs;
        out.push_back(r);
    }
    return out;
}

std::vector<MonotoneViolation> check_monotone_susceptibles(const DiagnosticsSeries& series, double rel_tol) {
    if (series.size() < 2) throw std::invalid_argument("monotonicity check needs at least two records");
    std::vector<MonotoneViolation> out;
    const std::size_t n_sites = series.front().sites.size();
    for (std::size_t j = 0; j < n_sites; ++j) {
        const double tol = rel_tol * series.front().sites[j].S;
        for (std::size_t r = 1; r < series.size(); ++r) {
            const double inc = series[r].sites[j].S - series[r - 1].sites[j].S;
            if (inc > tol) {
                out.push_back({j, series[r].t, inc});
                break;
            }
        }
    }
    return out;
}

std::vector<OutbreakEvent> detect_outbreak(const DiagnosticsSeries& series, std::span<const SubregionSpec> subs,
                                           double threshold) {
    std::vector<OutbreakEvent> out;
    if (series.empty()) return out;
    const std::size_t n_sites = series.front().sites.size();
    for (std::size_t j = 0; j < n_sites; ++j) {
        std::optional<double> onset;
        if (series.front().sites[j].I >= threshold) {
            onset = series.front().t;
        } else {
            for (std::size_t r = 1; r < series.size() && !onset; ++r) {
                const double a = series[r - 1].sites[j].I;
                const double b = series[r].sites[j].I;
                if (a < threshold && b >= threshold) {
                    const double frac = (threshold - a) / (b - a);
                    onset = series[r - 1].t + frac * (series[r].t - series[r - 1].t);
                }
            }
        }
        if (onset) {
            OutbreakEvent e;
            e.site = j;
            if (j < subs.size()) {
                e.site_id = subs[j].id;
                e.center = subs[j].center;
            }
            e.onset = *onset;
            e.threshold = threshold;
            out.push_back(e);
        }
    }
    return out;
}

AsymptoticSummary asymptotic_summary(const DiagnosticsSeries& series, double window, double rel_tol) {
    AsymptoticSummary a;
    if (series.empty()) return a;
    const auto& last = series.back();
    a.t_final = last.t;
    a.window = window;
    // latest record at or before t_final - window
    const double t_ref = last.t - window;
    const DiagnosticsRecord* ref = &series.front();
    for (const auto& rec : series) {
        if (rec.t <= t_ref + 1e-12) ref = &rec;
    }
    const bool window_covered = series.front().t <= t_ref + 1e-12;

    a.sites.resize(last.sites.size());
    a.converged = window_covered;
    for (std::size_t j = 0; j < last.sites.size(); ++j) {
        auto& s = a.sites[j];
        s.S_star = last.sites[j].S;
        const double base = ref->sites[j].S;
        s.S_relative_change = base > 0.0 ? std::abs(base - s.S_star) / base : 0.0;
        s.converged = window_covered && s.S_relative_change < rel_tol;
        s.E_final = last.sites[j].E;
        s.I_final = last.sites[j].I;
        s.E_max_final = last.sites[j].E_max;
        s.I_max_final = last.sites[j].I_max;
        for (const auto& rec : series) {
            s.E_peak = std::max(s.E_peak, rec.sites[j].E);
            s.I_peak = std::max(s.I_peak, rec.sites[j].I);
        }
        a.converged = a.converged && s.converged;
    }
    a.Vi_final = last.Vi_total;
    a.Vi_max_final = last.Vi_max;
    for (const auto& rec : series) {
        a.Vi_peak = std::max(a.Vi_peak, rec.Vi_total);
        a.Vi_max_peak = std::max(a.Vi_max_peak, rec.Vi_max);
    }
    return a;
}

}  // namespace vhsim

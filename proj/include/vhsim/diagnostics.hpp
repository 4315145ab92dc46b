#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vhsim/grid.hpp"
#include "vhsim/model.hpp"

namespace vhsim {

struct InvariantFlags {
    bool nonfinite{false};
    bool negative{false};    // some field below -eps_neg
    bool sup_bound{false};   // max V above max{beta*/m_*, max V(0)}
    bool monotone_S{false};  // a susceptible total increased
    bool host_budget{false}; // lambda int int E + delta int int I above the initial host total

    [[nodiscard]] bool any() const noexcept {
        return nonfinite || negative || sup_bound || monotone_S || host_budget;
    }
    /// Violations that stop a run under the abort policy. The host budget is
    /// reported but never aborts.
    [[nodiscard]] bool fatal() const noexcept { return nonfinite || negative || sup_bound || monotone_S; }
    [[nodiscard]] std::string describe() const;

    InvariantFlags& operator|=(const InvariantFlags& o) noexcept;
};

struct SiteTotals {
    double S{0.0};
    double E{0.0};
    double I{0.0};
    double S_max{0.0};
    double E_max{0.0};
    double I_max{0.0};
    double exposed_outflow{0.0};   // lambda int_0^t int E
    double infected_outflow{0.0};  // delta int_0^t int I
    double initial_total{0.0};     // int (S0 + E0 + I0)
};

struct DiagnosticsRecord {
    double t{0.0};
    std::size_t step{0};
    double Vs_total{0.0};
    double Vi_total{0.0};
    double V_total{0.0};
    double V_max{0.0};
    double Vi_max{0.0};
    double min_value{0.0};
    double outflow{0.0};          // cumulative net boundary outflow of vectors
    double logistic_source{0.0};  // cumulative int int (beta V - m V^2)
    std::vector<SiteTotals> sites;
    InvariantFlags flags;
};

using DiagnosticsSeries = std::vector<DiagnosticsRecord>;

/// Totals and maxima of a state. Cumulative fields are left at zero.
DiagnosticsRecord measure(const SimState& state, const Grid& grid);

/// Reference scales for the pointwise checks.
struct BoundContext {
    double sup_bound{0.0};     // max{beta*/m_*, max V(., 0)}
    double vector_scale{1.0};
    double host_scale{1.0};
};

BoundContext bound_context(const ModelParams& params, const SimState& initial);

/// Nonnegativity (min >= -1e-12 scale), finiteness, and
/// max V <= sup_bound (1 + 1e-9).
InvariantFlags check_bounds(const SimState& state, const BoundContext& ctx);
InvariantFlags check_bounds(const SimState& state, const ModelParams& params, double initial_max_V);

struct BudgetResidual {
    std::size_t site{0};
    double worst_residual{0.0};  // min over t of rhs - (lambda int int E + delta int int I)
    double worst_time{0.0};
    double exposed_residual{0.0};   // min over t of rhs - lambda int int E
    double infected_residual{0.0};  // min over t of rhs - delta int int I
    bool violated{false};           // worst_residual < -tol * rhs
};

/// Host budget inequality per subregion, checked at every record.
std::vector<BudgetResidual> check_host_budget(const DiagnosticsSeries& series, double rel_tol = 1e-6);

struct MonotoneViolation {
    std::size_t site{0};
    double t{0.0};
    double increase{0.0};
};

/// Susceptible totals must not increase between consecutive records
/// (tolerance rel_tol times the initial total). Empty result means pass.
/// Throws std::invalid_argument for fewer than two records.
std::vector<MonotoneViolation> check_monotone_susceptibles(const DiagnosticsSeries& series,
                                                           double rel_tol = 1e-10);

struct OutbreakEvent {
    std::size_t site{0};
    int site_id{0};
    Point center{};
    double onset{0.0};
    double threshold{1.0};
};

/// First time each subregion's infected total reaches `threshold`, by
/// linear interpolation between records. A site already at or above the
/// threshold in the first record reports that record's time.
std::vector<OutbreakEvent> detect_outbreak(const DiagnosticsSeries& series, std::span<const SubregionSpec> subs,
                                           double threshold = 1.0);

struct SiteSummary {
    double S_star{0.0};
    double S_relative_change{0.0};  // over the trailing window
    bool converged{false};
    double E_final{0.0};
    double I_final{0.0};
    double E_peak{0.0};
    double I_peak{0.0};
    double E_max_final{0.0};
    double I_max_final{0.0};
};

struct AsymptoticSummary {
    double t_final{0.0};
    double window{0.0};
    std::vector<SiteSummary> sites;
    double Vi_final{0.0};
    double Vi_peak{0.0};
    double Vi_max_final{0.0};
    double Vi_max_peak{0.0};
    bool converged{false};  // every site converged
};

/// Reads S*_j off the final record and judges convergence by the relative
/// change of each S total over the trailing `window` months (< rel_tol).
AsymptoticSummary asymptotic_summary(const DiagnosticsSeries& series, double window, double rel_tol = 1e-3);

}  // namespace vhsim

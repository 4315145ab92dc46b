#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vhsim/config.hpp"
#include "vhsim/diagnostics.hpp"
#include "vhsim/grid.hpp"
#include "vhsim/solver.hpp"

namespace vhsim {

/// Snapshot file layout:
///   # nx=<nx> ny=<ny> h=<h> t=<t> field=<name> origin=<x0>,<y0>
///   ny lines of nx comma-separated values, row j = 0 (lowest y) first,
///   every value printed with %.17g.
struct Snapshot {
    std::size_t nx{0};
    std::size_t ny{0};
    double h{0.0};
    double t{0.0};
    std::string field;
    Point origin{};
    std::vector<double> values;  // k = j * nx + i
};

void write_snapshot(const std::filesystem::path& path, const Grid& grid, const Field& field, double t,
                    const std::string& name);
Snapshot read_snapshot(const std::filesystem::path& path);

/// "<field>_t<ttt.ttt>.csv", e.g. Vi_t002.000.csv.
std::string snapshot_filename(const std::string& field, double t);

/// Column names of the diagnostics CSV for n_sites subregions.
std::vector<std::string> diagnostics_columns(std::size_t n_sites);
void write_diagnostics_header(std::ostream& out, std::size_t n_sites);
void write_diagnostics_row(std::ostream& out, const DiagnosticsRecord& record);
/// Parses a file written by the two functions above. Throws IoError.
DiagnosticsSeries read_diagnostics_csv(const std::filesystem::path& path);

struct RunOutcome {
    RunResult result;
    std::filesystem::path run_dir;
    std::vector<OutbreakEvent> events;
    AsymptoticSummary summary;
    std::vector<BudgetResidual> budget;
    std::vector<MonotoneViolation> monotone;
};

std::string format_report(const ScenarioConfig& config, const RunOutcome& outcome, const std::string& abort_reason = {});

/// Output root: `override_root` if given, else $VHSIM_OUTPUT_ROOT if set,
/// else config.output_directory. The root must already exist (IoError
/// otherwise); artifacts go to <root>/<config.name>/:
///   config.yaml, diagnostics.csv, report.txt, snapshots/*.csv
/// Diagnostics rows are flushed as they are produced, so an aborted run
/// leaves everything up to the violating record. Throws IoError and
/// InvariantViolation (after writing the report).
RunOutcome run_scenario(const Scenario& scenario, const std::optional<std::filesystem::path>& override_root = {});

}  // namespace vhsim

#include "vhsim/output.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vhsim/errors.hpp"

namespace vhsim {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const fs::path& path) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw IoError(path.string() + ": bad number '" + s + "'");
    return v;
}

}  // namespace

std::string snapshot_filename(const std::string& field, double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_t%07.3f.csv", field.c_str(), t);
    return buf;
}

void write_snapshot(const fs::path& path, const Grid& grid, const Field& field, double t, const std::string& name) {
    auto out = open_out(path);
    out << "# nx=" << grid.nx() << " ny=" << grid.ny() << " h=" << num(grid.h()) << " t=" << num(t)
        << " field=" << name << " origin=" << num(grid.origin().x) << "," << num(grid.origin().y) << "\n";
    std::string line;
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        line.clear();
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            if (i) line += ',';
            line += num(field.at(i, j));
        }
        line += '\n';
        out << line;
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Snapshot read_snapshot(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string header;
    std::getline(in, header);
    if (header.rfind("# ", 0) != 0) throw IoError(path.string() + ": missing snapshot header");
    Snapshot s;
    for (const auto& token : split(header.substr(2), ' ')) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "nx") s.nx = static_cast<std::size_t>(parse_double(value, path));
        else if (key == "ny") s.ny = static_cast<std::size_t>(parse_double(value, path));
        else if (key == "h") s.h = parse_double(value, path);
        else if (key == "t") s.t = parse_double(value, path);
        else if (key == "field") s.field = value;
        else if (key == "origin") {
            const auto xy = split(value, ',');
            if (xy.size() != 2) throw IoError(path.string() + ": bad origin");
            s.origin = {parse_double(xy[0], path), parse_double(xy[1], path)};
        }
    }
    if (s.nx == 0 || s.ny == 0) throw IoError(path.string() + ": header lacks nx/ny");
    s.values.reserve(s.nx * s.ny);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != s.nx) throw IoError(path.string() + ": row has " + std::to_string(cells.size()) + " values");
        for (const auto& c : cells) s.values.push_back(parse_double(c, path));
    }
    if (s.values.size() != s.nx * s.ny) throw IoError(path.string() + ": expected " + std::to_string(s.ny) + " rows");
    return s;
}

std::vector<std::string> diagnostics_columns(std::size_t n_sites) {
    std::vector<std::string> cols{"t",       "step",   "Vs_total", "Vi_total",        "V_total",
                                  "V_max",   "Vi_max", "min_value", "outflow", "logistic_source"};
    for (std::size_t j = 1; j <= n_sites; ++j) {
        const std::string s = std::to_string(j);
        for (const char* base : {"S", "E", "I", "S_max", "E_max", "I_max", "exposed_outflow", "infected_outflow",
                                 "initial_total"}) {
            cols.push_back(std::string(base) + "_" + s);
        }
    }
    cols.emplace_back("flags");
    return cols;
}

void write_diagnostics_header(std::ostream& out, std::size_t n_sites) {
    const auto cols = diagnostics_columns(n_sites);
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << "\n";
}

void write_diagnostics_row(std::ostream& out, const DiagnosticsRecord& r) {
    std::string line = num(r.t) + "," + std::to_string(r.step);
    for (double v : {r.Vs_total, r.Vi_total, r.V_total, r.V_max, r.Vi_max, r.min_value, r.outflow, r.logistic_source}) {
        line += "," + num(v);
    }
    for (const auto& s : r.sites) {
        for (double v : {s.S, s.E, s.I, s.S_max, s.E_max, s.I_max, s.exposed_outflow, s.infected_outflow, s.initial_total}) {
            line += "," + num(v);
        }
    }
    // flags never contain commas in the CSV: use '|'
    std::string flags = r.flags.describe();
    for (char& ch : flags) {
        if (ch == ',') ch = '|';
    }
    out << line << "," << flags << "\n";
}

DiagnosticsSeries read_diagnostics_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw IoError(path.string() + ": empty file");
    const auto cols = split(header, ',');
    constexpr std::size_t fixed_cols = 10;
    constexpr std::size_t per_site = 9;
    if (cols.size() < fixed_cols + 1 || (cols.size() - fixed_cols - 1) % per_site != 0) {
        throw IoError(path.string() + ": unexpected header");
    }
    const std::size_t n_sites = (cols.size() - fixed_cols - 1) / per_site;
    if (cols != diagnostics_columns(n_sites)) throw IoError(path.string() + ": unexpected header");

    DiagnosticsSeries series;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != cols.size()) throw IoError(path.string() + ": ragged row");
        DiagnosticsRecord r;
        std::size_t c = 0;
        auto next = [&] { return parse_double(cells[c++], path); };
        r.t = next();
        r.step = static_cast<std::size_t>(next());
        r.Vs_total = next();
        r.Vi_total = next();
        r.V_total = next();
        r.V_max = next();
        r.Vi_max = next();
        r.min_value = next();
        r.outflow = next();
        r.logistic_source = next();
        r.sites.resize(n_sites);
        for (auto& s : r.sites) {
            s.S = next();
            s.E = next();
            s.I = next();
            s.S_max = next();
            s.E_max = next();
            s.I_max = next();
            s.exposed_outflow = next();
            s.infected_outflow = next();
            s.initial_total = next();
        }
        const std::string& flags = cells[c];
        r.flags.nonfinite = flags.find("nonfinite") != std::string::npos;
        r.flags.negative = flags.find("negative") != std::string::npos;
        r.flags.sup_bound = flags.find("sup_bound") != std::string::npos;
        r.flags.monotone_S = flags.find("monotone_S") != std::string::npos;
        r.flags.host_budget = flags.find("host_budget") != std::string::npos;
        series.push_back(std::move(r));
    }
    return series;
}

std::string format_report(const ScenarioConfig& config, const RunOutcome& o, const std::string& abort_reason) {
    std::ostringstream out;
    const auto& res = o.result;
    out << "scenario: " << config.name << "\n";
    out << "status: " << (abort_reason.empty() ? "completed" : "aborted: " + abort_reason) << "\n";
    out << "dt_months: " << num(res.dt) << "\n";
    out << "steps: " << res.steps << "\n";
    out << "t_final_months: " << num(res.final_state.t) << "\n";
    out << "invariant_flags: " << res.violations.describe() << "\n";
    out << "violating_steps: " << res.violating_steps << "\n\n";

    out << "outbreaks (infected total >= " << num(config.diagnostics.outbreak_threshold) << " hosts):\n";
    for (std::size_t j = 0; j < config.subregions.size(); ++j) {
        const auto& sub = config.subregions[j];
        out << "  site " << sub.id << " at (" << num(sub.center.x) << ", " << num(sub.center.y) << ") km: ";
        const OutbreakEvent* e = nullptr;
        for (const auto& ev : o.events) {
            if (ev.site == j) e = &ev;
        }
        if (e) out << "onset " << fixed(e->onset, 3) << " months\n";
        else out << "none\n";
    }

    out << "\nhost budget (initial total - lambda int int E - delta int int I):\n";
    for (const auto& b : o.budget) {
        out << "  site " << config.subregions[b.site].id << ": worst " << num(b.worst_residual) << " at t = "
            << fixed(b.worst_time, 3) << ", exposed term " << num(b.exposed_residual) << ", infected term "
            << num(b.infected_residual) << (b.violated ? "  VIOLATED" : "") << "\n";
    }

    out << "\nsusceptible monotonicity: " << (o.monotone.empty() ? "ok" : "VIOLATED") << "\n";
    for (const auto& m : o.monotone) {
        out << "  site " << config.subregions[m.site].id << " increased by " << num(m.increase) << " at t = "
            << fixed(m.t, 3) << "\n";
    }

    const auto& a = o.summary;
    out << "\nasymptotics (window " << num(a.window) << " months, verdict "
        << (a.converged ? "converged" : "not converged") << "):\n";
    for (std::size_t j = 0; j < a.sites.size(); ++j) {
        const auto& s = a.sites[j];
        out << "  site " << config.subregions[j].id << ": S* = " << num(s.S_star) << " (window change "
            << num(s.S_relative_change) << "), E final/peak = " << num(s.E_final) << " / " << num(s.E_peak)
            << ", I final/peak = " << num(s.I_final) << " / " << num(s.I_peak) << "\n";
    }
    out << "  Vi total final/peak = " << num(a.Vi_final) << " / " << num(a.Vi_peak) << ", Vi max final/peak = "
        << num(a.Vi_max_final) << " / " << num(a.Vi_max_peak) << "\n";
    return out.str();
}

namespace {

class FileSink : public RunSink {
public:
    FileSink(const fs::path& dir, const Scenario& scenario) : dir_(dir), scenario_(scenario) {
        csv_ = open_out(dir / "diagnostics.csv");
        write_diagnostics_header(csv_, scenario.masks.size());
        fs::create_directories(dir / "snapshots");
    }

    void on_record(const DiagnosticsRecord& record) override {
        write_diagnostics_row(csv_, record);
        csv_.flush();
        if (!csv_) throw IoError("write failed: " + (dir_ / "diagnostics.csv").string());
    }

    void on_snapshot(const SimState& state) override {
        const auto& grid = scenario_.grid;
        const auto snap = dir_ / "snapshots";
        write_snapshot(snap / snapshot_filename("Vs", state.t), grid, state.Vs, state.t, "Vs");
        write_snapshot(snap / snapshot_filename("Vi", state.t), grid, state.Vi, state.t, "Vi");
        for (std::size_t j = 0; j < state.hosts.size(); ++j) {
            const auto& mask = scenario_.masks[j];
            const auto& h = state.hosts[j];
            const std::string id = std::to_string(j + 1);
            write_snapshot(snap / snapshot_filename("S" + id, state.t), grid, host_field(grid, mask, h.S), state.t, "S" + id);
            write_snapshot(snap / snapshot_filename("E" + id, state.t), grid, host_field(grid, mask, h.E), state.t, "E" + id);
            write_snapshot(snap / snapshot_filename("I" + id, state.t), grid, host_field(grid, mask, h.I), state.t, "I" + id);
        }
    }

private:
    fs::path dir_;
    const Scenario& scenario_;
    std::ofstream csv_;
};

void finish(const Scenario& s, RunOutcome& o) {
    const auto& cfg = s.config;
    o.events = detect_outbreak(o.result.series, cfg.subregions, cfg.diagnostics.outbreak_threshold);
    o.summary = asymptotic_summary(o.result.series, cfg.diagnostics.convergence_window);
    o.budget = check_host_budget(o.result.series, cfg.diagnostics.budget_tolerance);
    if (o.result.series.size() >= 2) o.monotone = check_monotone_susceptibles(o.result.series);
}

}  // namespace

RunOutcome run_scenario(const Scenario& scenario, const std::optional<fs::path>& override_root) {
    fs::path root;
    if (override_root) root = *override_root;
    else if (const char* env = std::getenv("VHSIM_OUTPUT_ROOT"); env && *env) root = env;
    else root = scenario.config.output_directory;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw IoError("output directory does not exist: " + root.string());

    RunOutcome o;
    o.run_dir = root / scenario.config.name;
    fs::create_directories(o.run_dir, ec);
    if (ec) throw IoError("cannot create " + o.run_dir.string() + ": " + ec.message());
    {
        auto cfg_out = open_out(o.run_dir / "config.yaml");
        cfg_out << write_config(scenario.config);
    }

    FileSink sink(o.run_dir, scenario);
    Integrator integrator(scenario.grid, scenario.masks, scenario.params, scenario.config.domain.boundary_mode,
                          scenario.config.solver.cfl_safety, scenario.initial);
    try {
        o.result = run(scenario.initial, integrator, scenario.config.solver, scenario.config.diagnostics, &sink);
    } catch (const InvariantViolation& e) {
        auto rep = open_out(o.run_dir / "report.txt");
        rep << format_report(scenario.config, o, e.what());
        throw;
    }
    finish(scenario, o);
    auto rep = open_out(o.run_dir / "report.txt");
    rep << format_report(scenario.config, o);
    if (!rep) throw IoError("write failed: " + (o.run_dir / "report.txt").string());
    return o;
}

}  // namespace vhsim

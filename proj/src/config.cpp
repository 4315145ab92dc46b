#include "vhsim/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "vhsim/errors.hpp"

namespace vhsim {

namespace {

HostParams sample_host(const Grid& grid, const Mask& mask, const HostCoefficients& hc) {
    HostParams hp;
    hp.host_infection = restrict_to(mask, hc.host_infection.sample(grid));
    hp.vector_infection = restrict_to(mask, hc.vector_infection.sample(grid));
    hp.diffusivity_se = restrict_to(mask, hc.diffusivity_se.sample(grid));
    hp.diffusivity_i = restrict_to(mask, hc.diffusivity_i.sample(grid));
    return hp;
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& config) {
    const auto& c = config;
    if (c.subregions.empty()) throw ConfigError("at least one subregion is required");
    if (c.parameters.hosts.size() != c.subregions.size()) {
        throw ConfigError("parameters.hosts has " + std::to_string(c.parameters.hosts.size()) +
                          " entries for " + std::to_string(c.subregions.size()) + " subregions");
    }
    if (c.initial.hosts.size() != c.subregions.size()) {
        throw ConfigError("initial_conditions.hosts has " + std::to_string(c.initial.hosts.size()) +
                          " entries for " + std::to_string(c.subregions.size()) + " subregions");
    }
    if (c.solver.mode == HostMode::two_region_diffusive && c.subregions.size() != 2) {
        throw ConfigError("two_region_diffusive mode needs exactly 2 subregions");
    }
    if (!(c.solver.dt_max > 0.0)) throw ConfigError("solver.dt_max_months must be > 0");
    if (!(c.solver.cfl_safety > 0.0 && c.solver.cfl_safety <= 1.0)) {
        throw ConfigError("solver.cfl_safety must lie in (0, 1]");
    }
    if (!(c.solver.t_end >= 0.0)) throw ConfigError("solver.t_end_months must be >= 0");
    if (c.solver.output_stride == 0) throw ConfigError("solver.output_stride_steps must be >= 1");
    for (double t : c.solver.snapshot_times) {
        if (!(t >= 0.0 && t <= c.solver.t_end)) throw ConfigError("snapshot times must lie in [0, t_end]");
    }
    if (!(c.diagnostics.outbreak_threshold > 0.0)) throw ConfigError("outbreak threshold must be > 0");
    if (!(c.diagnostics.convergence_window > 0.0)) throw ConfigError("convergence window must be > 0");
    if (!(c.diagnostics.budget_tolerance >= 0.0)) throw ConfigError("budget tolerance must be >= 0");

    validate_subregions(c.domain, c.subregions);
    Scenario s{c, build_grid(c.domain), {}, {}, {}};
    for (const auto& sub : c.subregions) s.masks.push_back(build_mask(s.grid, sub));

    auto& p = s.params;
    p.diffusivity = c.parameters.diffusivity.sample(s.grid, "km^2/month");
    p.transport = c.parameters.transport;
    p.birth = c.parameters.birth.sample(s.grid, "1/month");
    p.mortality = c.parameters.mortality.sample(s.grid, "km^2/(month vector)");
    for (std::size_t j = 0; j < c.subregions.size(); ++j) {
        p.hosts.push_back(sample_host(s.grid, s.masks[j], c.parameters.hosts[j]));
    }
    p.incubation_rate = c.parameters.incubation_rate;
    p.removal_rate = c.parameters.removal_rate;
    p.mode = c.solver.mode;

    s.initial = build_initial_state(s.grid, c.subregions, s.masks, c.initial);
    validate_assumptions(p, s.initial);
    return s;
}

namespace {

// ---- reading -------------------------------------------------------------

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
        const auto mark = node.Mark();
        std::string where = source_;
        if (!mark.is_null()) where += ":" + std::to_string(mark.line + 1);
        throw ConfigError(where + ": " + msg);
    }

    void keys(const YAML::Node& node, const std::string& what, std::initializer_list<const char*> allowed) const {
        if (!node.IsMap()) fail(node, what + " must be a mapping");
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
                fail(kv.first, "unknown key '" + key + "' in " + what);
            }
        }
    }

    double number(const YAML::Node& node, const std::string& what) const {
        if (!node.IsScalar()) fail(node, what + " must be a number");
        try {
            return node.as<double>();
        } catch (const YAML::Exception&) {
            fail(node, what + " must be a number, got '" + node.Scalar() + "'");
        }
    }

    double number(const YAML::Node& map, const char* key, double fallback) const {
        const auto n = map[key];
        return n ? number(n, key) : fallback;
    }

    std::string text(const YAML::Node& node, const std::string& what) const {
        if (!node.IsScalar()) fail(node, what + " must be a string");
        return node.Scalar();
    }

    Point point(const YAML::Node& node, const std::string& what) const {
        if (!node.IsSequence() || node.size() != 2) fail(node, what + " must be a [x, y] pair");
        return {number(node[0], what), number(node[1], what)};
    }

    GaussianBump bump(const YAML::Node& node) const {
        keys(node, "gaussian", {"amplitude_per_km2", "center_km", "width_km2"});
        GaussianBump b;
        if (!node["amplitude_per_km2"] || !node["center_km"]) fail(node, "gaussian needs amplitude_per_km2 and center_km");
        b.amplitude = number(node["amplitude_per_km2"], "amplitude_per_km2");
        b.center = point(node["center_km"], "center_km");
        b.width = number(node, "width_km2", 1.0);
        if (!(b.width > 0.0)) fail(node, "width_km2 must be > 0");
        return b;
    }

    /// A bare number, or {base: x, gaussian: {...}}.
    CoefficientSpec coefficient(const YAML::Node& node, const std::string& what, CoefficientSpec fallback) const {
        if (!node) return fallback;
        if (node.IsScalar()) return {number(node, what), {}};
        keys(node, what, {"base", "gaussian"});
        CoefficientSpec c{number(node, "base", 0.0), {}};
        if (node["gaussian"]) c.bump = bump(node["gaussian"]);
        return c;
    }

    InitialSpec initial(const YAML::Node& node, const std::string& what) const {
        if (!node) return InitialSpec::constant(0.0);
        keys(node, what, {"constant_per_km2", "gaussian", "scaled_from", "factor"});
        if (node["constant_per_km2"]) return InitialSpec::constant(number(node["constant_per_km2"], what));
        if (node["gaussian"]) return InitialSpec::gaussian(bump(node["gaussian"]));
        if (node["scaled_from"]) {
            return InitialSpec::scaled(text(node["scaled_from"], "scaled_from"), number(node, "factor", 1.0));
        }
        fail(node, what + " needs one of constant_per_km2, gaussian, scaled_from");
    }

    template <typename F>
    auto wrap(const YAML::Node& node, F&& f) const -> decltype(f()) {
        try {
            return f();
        } catch (const std::exception& e) {
            fail(node, e.what());
        }
    }

private:
    std::string source_;
};

ScenarioConfig read(const YAML::Node& root, const Reader& r) {
    ScenarioConfig c;
    r.keys(root, "config",
           {"name", "domain", "subregions", "parameters", "initial_conditions", "solver", "diagnostics", "output"});
    if (root["name"]) c.name = r.text(root["name"], "name");

    if (const auto d = root["domain"]) {
        r.keys(d, "domain", {"origin_km", "extent_km", "cell_size_km", "boundary_mode"});
        if (d["origin_km"]) c.domain.origin = r.point(d["origin_km"], "origin_km");
        if (d["extent_km"]) c.domain.extent = r.point(d["extent_km"], "extent_km");
        c.domain.cell_size = r.number(d, "cell_size_km", c.domain.cell_size);
        if (d["boundary_mode"]) {
            c.domain.boundary_mode =
                r.wrap(d["boundary_mode"], [&] { return boundary_mode_from_string(r.text(d["boundary_mode"], "boundary_mode")); });
        }
    }

    const auto subs = root["subregions"];
    if (!subs || !subs.IsSequence()) r.fail(subs ? subs : root, "subregions must be a list");
    for (const auto& s : subs) {
        r.keys(s, "subregion", {"id", "center_km", "radius_km"});
        if (!s["center_km"] || !s["radius_km"]) r.fail(s, "subregion needs center_km and radius_km");
        SubregionSpec sub;
        sub.id = s["id"] ? static_cast<int>(r.number(s["id"], "id")) : static_cast<int>(c.subregions.size() + 1);
        sub.center = r.point(s["center_km"], "center_km");
        sub.radius = r.number(s["radius_km"], "radius_km");
        c.subregions.push_back(sub);
    }

    auto& p = c.parameters;
    if (const auto n = root["parameters"]) {
        r.keys(n, "parameters",
               {"vector_diffusivity_km2_per_month", "transport_velocity_km_per_month", "vector_birth_rate_per_month",
                "vector_mortality_km2_per_month_per_vector", "incubation_rate_per_month", "removal_rate_per_month",
                "hosts"});
        p.diffusivity = r.coefficient(n["vector_diffusivity_km2_per_month"], "vector_diffusivity_km2_per_month", p.diffusivity);
        if (const auto w = n["transport_velocity_km_per_month"]) {
            const Point v = r.point(w, "transport_velocity_km_per_month");
            p.transport = {v.x, v.y};
        }
        p.birth = r.coefficient(n["vector_birth_rate_per_month"], "vector_birth_rate_per_month", p.birth);
        p.mortality =
            r.coefficient(n["vector_mortality_km2_per_month_per_vector"], "vector_mortality_km2_per_month_per_vector", p.mortality);
        p.incubation_rate = r.number(n, "incubation_rate_per_month", p.incubation_rate);
        p.removal_rate = r.number(n, "removal_rate_per_month", p.removal_rate);
        if (const auto hs = n["hosts"]) {
            if (!hs.IsSequence()) r.fail(hs, "parameters.hosts must be a list");
            for (const auto& h : hs) {
                r.keys(h, "host parameters",
                       {"host_infection_km2_per_month_per_vector", "vector_infection_km2_per_month_per_host",
                        "susceptible_exposed_diffusivity_km2_per_month", "infected_diffusivity_km2_per_month"});
                HostCoefficients hc;
                hc.host_infection = r.coefficient(h["host_infection_km2_per_month_per_vector"],
                                                  "host_infection_km2_per_month_per_vector", hc.host_infection);
                hc.vector_infection = r.coefficient(h["vector_infection_km2_per_month_per_host"],
                                                    "vector_infection_km2_per_month_per_host", hc.vector_infection);
                hc.diffusivity_se = r.coefficient(h["susceptible_exposed_diffusivity_km2_per_month"],
                                                  "susceptible_exposed_diffusivity_km2_per_month", hc.diffusivity_se);
                hc.diffusivity_i = r.coefficient(h["infected_diffusivity_km2_per_month"],
                                                 "infected_diffusivity_km2_per_month", hc.diffusivity_i);
                p.hosts.push_back(hc);
            }
        }
    }
    if (p.hosts.empty()) p.hosts.resize(c.subregions.size());

    if (const auto n = root["initial_conditions"]) {
        r.keys(n, "initial_conditions", {"Vs", "Vi", "hosts"});
        c.initial.Vs = r.initial(n["Vs"], "Vs");
        c.initial.Vi = r.initial(n["Vi"], "Vi");
        if (const auto hs = n["hosts"]) {
            if (!hs.IsSequence()) r.fail(hs, "initial_conditions.hosts must be a list");
            for (const auto& h : hs) {
                r.keys(h, "host initial conditions", {"S", "E", "I"});
                c.initial.hosts.push_back({r.initial(h["S"], "S"), r.initial(h["E"], "E"), r.initial(h["I"], "I")});
            }
        }
    }

    if (const auto n = root["solver"]) {
        r.keys(n, "solver",
               {"dt_max_months", "cfl_safety", "t_end_months", "output_stride_steps", "host_mode",
                "snapshot_times_months"});
        c.solver.dt_max = r.number(n, "dt_max_months", c.solver.dt_max);
        c.solver.cfl_safety = r.number(n, "cfl_safety", c.solver.cfl_safety);
        c.solver.t_end = r.number(n, "t_end_months", c.solver.t_end);
        if (n["output_stride_steps"]) {
            const double stride = r.number(n["output_stride_steps"], "output_stride_steps");
            if (!(stride >= 1.0) || stride != std::floor(stride)) r.fail(n["output_stride_steps"], "output_stride_steps must be a positive integer");
            c.solver.output_stride = static_cast<std::size_t>(stride);
        }
        if (n["host_mode"]) {
            c.solver.mode = r.wrap(n["host_mode"], [&] { return host_mode_from_string(r.text(n["host_mode"], "host_mode")); });
        }
        if (const auto ts = n["snapshot_times_months"]) {
            if (!ts.IsSequence()) r.fail(ts, "snapshot_times_months must be a list");
            for (const auto& t : ts) c.solver.snapshot_times.push_back(r.number(t, "snapshot time"));
        }
    }

    if (const auto n = root["diagnostics"]) {
        r.keys(n, "diagnostics",
               {"outbreak_threshold_hosts", "violation_policy", "convergence_window_months", "budget_tolerance_relative"});
        auto& d = c.diagnostics;
        d.outbreak_threshold = r.number(n, "outbreak_threshold_hosts", d.outbreak_threshold);
        if (n["violation_policy"]) {
            d.policy = r.wrap(n["violation_policy"],
                              [&] { return violation_policy_from_string(r.text(n["violation_policy"], "violation_policy")); });
        }
        d.convergence_window = r.number(n, "convergence_window_months", d.convergence_window);
        d.budget_tolerance = r.number(n, "budget_tolerance_relative", d.budget_tolerance);
    }

    if (const auto n = root["output"]) {
        r.keys(n, "output", {"directory"});
        if (n["directory"]) c.output_directory = r.text(n["directory"], "directory");
    }
    return c;
}

// ---- writing -------------------------------------------------------------

/// Shortest decimal form that parses back to the same double.
struct Real {
    double v;
};

YAML::Emitter& operator<<(YAML::Emitter& out, Real r) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, r.v);
    return out << std::string(buf, res.ptr);
}

void emit_point(YAML::Emitter& out, Point p) {
    out << YAML::Flow << YAML::BeginSeq << Real{p.x} << Real{p.y} << YAML::EndSeq;
}

void emit_bump(YAML::Emitter& out, const GaussianBump& b) {
    out << YAML::BeginMap;
    out << YAML::Key << "amplitude_per_km2" << YAML::Value << Real{b.amplitude};
    out << YAML::Key << "center_km" << YAML::Value;
    emit_point(out, b.center);
    out << YAML::Key << "width_km2" << YAML::Value << Real{b.width};
    out << YAML::EndMap;
}

void emit_coefficient(YAML::Emitter& out, const char* key, const CoefficientSpec& c) {
    out << YAML::Key << key << YAML::Value;
    if (!c.bump) {
        out << Real{c.base};
        return;
    }
    out << YAML::BeginMap << YAML::Key << "base" << YAML::Value << Real{c.base};
    out << YAML::Key << "gaussian" << YAML::Value;
    emit_bump(out, *c.bump);
    out << YAML::EndMap;
}

void emit_initial(YAML::Emitter& out, const char* key, const InitialSpec& s) {
    out << YAML::Key << key << YAML::Value << YAML::BeginMap;
    switch (s.kind) {
        case InitialSpec::Kind::constant:
            out << YAML::Key << "constant_per_km2" << YAML::Value << Real{s.value};
            break;
        case InitialSpec::Kind::gaussian:
            out << YAML::Key << "gaussian" << YAML::Value;
            emit_bump(out, s.bump);
            break;
        case InitialSpec::Kind::scaled:
            out << YAML::Key << "scaled_from" << YAML::Value << s.source;
            out << YAML::Key << "factor" << YAML::Value << Real{s.factor};
            break;
    }
    out << YAML::EndMap;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    if (!root.IsMap()) throw ConfigError(source + ": top level must be a mapping");
    const Reader reader(source);
    ScenarioConfig c = read(root, reader);
    build_scenario(c);
    return c;
}

ScenarioConfig load_config(const std::string& path_or_preset) {
    if (!std::filesystem::exists(path_or_preset)) {
        if (auto preset = builtin_preset(path_or_preset)) return *preset;
        throw IoError("no config file or preset named '" + path_or_preset + "'");
    }
    return parse_config(read_file(path_or_preset), path_or_preset);
}

std::string write_config(const ScenarioConfig& c) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << c.name;

    out << YAML::Key << "domain" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "origin_km" << YAML::Value;
    emit_point(out, c.domain.origin);
    out << YAML::Key << "extent_km" << YAML::Value;
    emit_point(out, c.domain.extent);
    out << YAML::Key << "cell_size_km" << YAML::Value << Real{c.domain.cell_size};
    out << YAML::Key << "boundary_mode" << YAML::Value << to_string(c.domain.boundary_mode);
    out << YAML::EndMap;

    out << YAML::Key << "subregions" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : c.subregions) {
        out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << s.id;
        out << YAML::Key << "center_km" << YAML::Value;
        emit_point(out, s.center);
        out << YAML::Key << "radius_km" << YAML::Value << Real{s.radius} << YAML::EndMap;
    }
    out << YAML::EndSeq;

    const auto& p = c.parameters;
    out << YAML::Key << "parameters" << YAML::Value << YAML::BeginMap;
    emit_coefficient(out, "vector_diffusivity_km2_per_month", p.diffusivity);
    out << YAML::Key << "transport_velocity_km_per_month" << YAML::Value;
    emit_point(out, {p.transport.x, p.transport.y});
    emit_coefficient(out, "vector_birth_rate_per_month", p.birth);
    emit_coefficient(out, "vector_mortality_km2_per_month_per_vector", p.mortality);
    out << YAML::Key << "incubation_rate_per_month" << YAML::Value << Real{p.incubation_rate};
    out << YAML::Key << "removal_rate_per_month" << YAML::Value << Real{p.removal_rate};
    out << YAML::Key << "hosts" << YAML::Value << YAML::BeginSeq;
    for (const auto& h : p.hosts) {
        out << YAML::BeginMap;
        emit_coefficient(out, "host_infection_km2_per_month_per_vector", h.host_infection);
        emit_coefficient(out, "vector_infection_km2_per_month_per_host", h.vector_infection);
        emit_coefficient(out, "susceptible_exposed_diffusivity_km2_per_month", h.diffusivity_se);
        emit_coefficient(out, "infected_diffusivity_km2_per_month", h.diffusivity_i);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;

    out << YAML::Key << "initial_conditions" << YAML::Value << YAML::BeginMap;
    emit_initial(out, "Vs", c.initial.Vs);
    emit_initial(out, "Vi", c.initial.Vi);
    out << YAML::Key << "hosts" << YAML::Value << YAML::BeginSeq;
    for (const auto& h : c.initial.hosts) {
        out << YAML::BeginMap;
        emit_initial(out, "S", h.S);
        emit_initial(out, "E", h.E);
        emit_initial(out, "I", h.I);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;

    out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "dt_max_months" << YAML::Value << Real{c.solver.dt_max};
    out << YAML::Key << "cfl_safety" << YAML::Value << Real{c.solver.cfl_safety};
    out << YAML::Key << "t_end_months" << YAML::Value << Real{c.solver.t_end};
    out << YAML::Key << "output_stride_steps" << YAML::Value << c.solver.output_stride;
    out << YAML::Key << "host_mode" << YAML::Value << to_string(c.solver.mode);
    out << YAML::Key << "snapshot_times_months" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double t : c.solver.snapshot_times) out << Real{t};
    out << YAML::EndSeq;
    out << YAML::EndMap;

    out << YAML::Key << "diagnostics" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "outbreak_threshold_hosts" << YAML::Value << Real{c.diagnostics.outbreak_threshold};
    out << YAML::Key << "violation_policy" << YAML::Value << to_string(c.diagnostics.policy);
    out << YAML::Key << "convergence_window_months" << YAML::Value << Real{c.diagnostics.convergence_window};
    out << YAML::Key << "budget_tolerance_relative" << YAML::Value << Real{c.diagnostics.budget_tolerance};
    out << YAML::EndMap;

    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "directory" << YAML::Value << c.output_directory << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

// ---- presets -------------------------------------------------------------

namespace {

/// Table values shared by the three bluetongue scenarios. Transport is
/// stored as w = -C, so C = (-10, 0) becomes w = (+10, 0).
ScenarioConfig bluetongue(const std::string& name, std::vector<double> site_x, std::vector<double> amplitudes,
                          double w, double t_end, std::vector<double> snapshots) {
    ScenarioConfig c;
    c.name = name;
    c.domain = DomainSpec{{0.0, 0.0}, {150.0, 60.0}, 0.5, BoundaryMode::outflow};
    c.parameters.transport = {w, 0.0};
    c.initial.Vs = InitialSpec::constant(1000.0);
    c.initial.Vi = InitialSpec::scaled("I1", 1.0);
    for (std::size_t j = 0; j < site_x.size(); ++j) {
        c.subregions.push_back({static_cast<int>(j + 1), {site_x[j], 30.0}, 5.0});
        c.parameters.hosts.push_back(HostCoefficients{});
        InitialConditions::Host h;
        h.S = InitialSpec::gaussian({amplitudes[j], {site_x[j], 30.0}, 1.0});
        if (j == 0) {
            h.E = InitialSpec::scaled("S1", 0.01);
            h.I = InitialSpec::scaled("S1", 0.01);
        }
        c.initial.hosts.push_back(h);
    }
    c.solver.t_end = t_end;
    c.solver.snapshot_times = std::move(snapshots);
    return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"bluetongue_c0", "bluetongue_c10", "bluetongue_c20"}; }

std::optional<ScenarioConfig> builtin_preset(const std::string& name) {
    if (name == "bluetongue_c0") {
        return bluetongue(name, {25.0, 50.0, 125.0}, {30.0, 31.0, 31.0}, 0.0, 12.0, {0, 2, 4, 6, 8, 10, 12});
    }
    if (name == "bluetongue_c10") {
        return bluetongue(name, {25.0, 50.0}, {30.0, 31.0}, 10.0, 10.0, {0, 2, 4, 5, 6, 10});
    }
    if (name == "bluetongue_c20") {
        return bluetongue(name, {25.0, 125.0}, {30.0, 31.0}, 20.0, 10.0, {0, 3, 5, 6, 8, 10});
    }
    return std::nullopt;
}

}  // namespace vhsim

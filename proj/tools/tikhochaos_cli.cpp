// tikhochaos: command-line front end.
//
//   tikhochaos <simulate|energy|lyapunov|hopf|poincare|bifurcation|map|critical> [flags]
//
// Settings are layered: built-in defaults, then --config (a SystemSpec JSON
// with optional "integrator", "initial" and "options" objects, or any output
// file of this tool), then explicit flags. The resolved configuration is
// written as the manifest of every output, so a run can be repeated from its
// output file alone.
//
// Exit codes: 0 success (divergence included), 1 invalid input, 2 runtime failure.

#include "tikhochaos/tikhochaos.hpp"

#include <CLI11.hpp>

#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace tikhochaos;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

const std::map<std::string, json>& default_options() {
    static const json lyap{{"estimator", "variational"}, {"d0", 1e-8}, {"renorm_steps", 100}, {"transient_fraction", 0.1}};
    static const std::map<std::string, json> table{
        {"simulate", json::object()},
        {"energy", json::object()},
        {"lyapunov", lyap},
        {"hopf", {{"axis", nullptr}, {"lo", nullptr}, {"hi", nullptr}, {"steps", 101}, {"at_time", nullptr},
                  {"resolution", 1e-6}}},
        {"poincare", {{"section", "stroboscopic"}, {"direction", "falling"}, {"transient_fraction", 0.1}}},
        {"bifurcation", {{"axis", nullptr}, {"lo", nullptr}, {"hi", nullptr}, {"steps", 21},
                         {"section", "stroboscopic"}, {"direction", "falling"}, {"transient_fraction", 0.1}}},
        {"map", [] {
             json j{{"axis1", nullptr}, {"lo1", nullptr}, {"hi1", nullptr}, {"steps1", 11},
                    {"axis2", nullptr}, {"lo2", nullptr}, {"hi2", nullptr}, {"steps2", 11}};
             j.update(lyap);
             return j;
         }()},
        {"critical", [] {
             json j{{"axis", nullptr}, {"lo", nullptr}, {"hi", nullptr}, {"tol", 1e-3}};
             j.update(lyap);
             return j;
         }()},
    };
    return table;
}

/// A flag bound to a JSON pointer inside the run configuration.
struct Binding {
    CLI::Option* option;
    json::json_pointer target;
    std::function<json()> value;
};

struct Flags {
    std::vector<Binding> bindings;
    std::string config_path;
    std::string out_path;
    std::string plot_prefix;
    std::optional<std::string> epsilon_kind;
    std::optional<double> epsilon_value;
    std::optional<std::string> g_kind;
    std::optional<double> g_k;
    std::optional<double> g_w;
    bool theorem = false;
    CLI::Option* theorem_opt = nullptr;
    // storage for bound values, stable addresses
    std::deque<double> doubles;
    std::deque<int> ints;
    std::deque<std::string> strings;
};

void bind_double(CLI::App& app, Flags& f, const std::string& flag, const std::string& pointer, const std::string& help) {
    double& slot = f.doubles.emplace_back();
    f.bindings.push_back({app.add_option(flag, slot, help), json::json_pointer(pointer), [&slot] { return json(slot); }});
}

void bind_int(CLI::App& app, Flags& f, const std::string& flag, const std::string& pointer, const std::string& help) {
    int& slot = f.ints.emplace_back();
    f.bindings.push_back({app.add_option(flag, slot, help), json::json_pointer(pointer), [&slot] { return json(slot); }});
}

void bind_string(CLI::App& app, Flags& f, const std::string& flag, const std::string& pointer, const std::string& help) {
    std::string& slot = f.strings.emplace_back();
    f.bindings.push_back({app.add_option(flag, slot, help), json::json_pointer(pointer), [&slot] { return json(slot); }});
}

void add_common_flags(CLI::App& app, Flags& f) {
    app.add_option("--config", f.config_path, "SystemSpec JSON or a previous output file");
    app.add_option("--out", f.out_path, "Output path (stdout when omitted)");
    app.add_option("--plot-data", f.plot_prefix, "Write PREFIX.dat and PREFIX.json plot data");
    bind_string(app, f, "--form", "/form", "System form: A1, A2 or B");
    for (const char* name : {"alpha", "beta", "gamma", "delta", "omega", "q", "p"})
        bind_double(app, f, std::string("--") + name, std::string("/params/") + name, name);
    bind_int(app, f, "--n", "/params/n", "Forcing polynomial degree (form B)");
    bind_double(app, f, "--t0", "/t0", "Start time");
    f.theorem_opt = app.add_flag("--theorem", f.theorem, "Validate the theorem hypotheses");
    app.add_option("--epsilon-kind", f.epsilon_kind, "zero, constant or power_law");
    app.add_option("--epsilon", f.epsilon_value, "Constant value, or power-law coefficient");
    app.add_option("--g", f.g_kind, "Nonlinearity preset: zero, linear, cubic, sine");
    app.add_option("--g-k", f.g_k, "Nonlinearity strength k");
    app.add_option("--g-w", f.g_w, "Sine nonlinearity frequency w");
    bind_double(app, f, "--x0", "/initial/x", "Initial position");
    bind_double(app, f, "--v0", "/initial/v", "Initial velocity");
    bind_string(app, f, "--method", "/integrator/method", "rk4 or rkf45");
    bind_double(app, f, "--dt", "/integrator/dt", "Step (initial step for rkf45)");
    bind_double(app, f, "--abs-tol", "/integrator/abs_tol", "Absolute tolerance (rkf45)");
    bind_double(app, f, "--rel-tol", "/integrator/rel_tol", "Relative tolerance (rkf45)");
    bind_double(app, f, "--t-end", "/integrator/t_end", "Final time");
    bind_int(app, f, "--sample-every", "/integrator/sample_every", "Keep every k-th step");
    bind_double(app, f, "--blowup", "/integrator/blowup_threshold", "Divergence threshold on |x|, |v|");
    bind_int(app, f, "--seed", "/seed", "Reserved; runs are deterministic");
}

void add_lyapunov_flags(CLI::App& app, Flags& f) {
    bind_string(app, f, "--estimator", "/options/estimator", "variational or two_trajectory");
    bind_double(app, f, "--d0", "/options/d0", "Initial separation (two_trajectory)");
    bind_int(app, f, "--renorm-steps", "/options/renorm_steps", "Steps between renormalizations");
    bind_double(app, f, "--transient-fraction", "/options/transient_fraction", "Discarded fraction of the run");
}

void add_axis_flags(CLI::App& app, Flags& f, const std::string& suffix) {
    bind_string(app, f, "--axis" + suffix, "/options/axis" + suffix, "Parameter axis");
    bind_double(app, f, "--lo" + suffix, "/options/lo" + suffix, "Axis start");
    bind_double(app, f, "--hi" + suffix, "/options/hi" + suffix, "Axis end");
    bind_int(app, f, "--steps" + suffix, "/options/steps" + suffix, "Grid points (inclusive)");
}

void add_section_flags(CLI::App& app, Flags& f, bool transient) {
    bind_string(app, f, "--section", "/options/section", "stroboscopic or velocity_zero");
    bind_string(app, f, "--direction", "/options/direction", "rising, falling or both");
    if (transient) bind_double(app, f, "--transient-fraction", "/options/transient_fraction", "Discarded fraction");
}

// ---------------------------------------------------------------------------
// Configuration assembly
// ---------------------------------------------------------------------------

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    if (in.peek() == '#') {
        auto manifest = read_manifest(in);
        if (!manifest) throw UsageError("no manifest line in " + path);
        return *manifest;
    }
    json j = json::parse(in);
    if (j.contains("manifest")) return j.at("manifest");
    return j;
}

json resolve_config(const std::string& command, const Flags& f) {
    json cfg{{"command", command},
             {"form", "B"},
             {"params", json::object()},
             {"nonlinearity", {{"kind", "zero"}}},
             {"epsilon", {{"kind", "zero"}}},
             {"theorem_mode", false},
             {"initial", {{"x", 1.0}, {"v", 0.0}}},
             {"integrator", json(IntegratorConfig{})},
             {"options", default_options().at(command)},
             {"seed", 0}};
    if (!f.config_path.empty()) {
        json file = load_config_file(f.config_path);
        if (file.contains("command") && file.at("command") != command)
            throw UsageError("config was written by '" + file.at("command").get<std::string>() + "', not '" + command + "'");
        file.erase("command");
        file.erase("status");
        cfg.merge_patch(file);
    }
    for (const Binding& b : f.bindings)
        if (b.option->count() > 0) cfg[b.target] = b.value();
    if (f.theorem_opt->count() > 0) cfg["theorem_mode"] = f.theorem;
    if (!cfg.contains("t0")) cfg["t0"] = default_t0(form_from_string(cfg.at("form").get<std::string>()));

    json& eps = cfg["epsilon"];
    if (f.epsilon_kind) eps = {{"kind", *f.epsilon_kind}};
    const std::string eps_kind = eps.at("kind").get<std::string>();
    if (f.epsilon_value) {
        if (eps_kind == "power_law") eps["coefficient"] = *f.epsilon_value;
        else eps = {{"kind", "constant"}, {"value", *f.epsilon_value}};
    }
    if (eps.at("kind") == "power_law") {
        if (!eps.contains("coefficient")) eps["coefficient"] = 1.0;
        eps["exponent"] = cfg["params"].value("p", 0.0);
    } else if (eps.at("kind") == "constant" && !eps.contains("value")) {
        throw UsageError("--epsilon-kind constant needs --epsilon VALUE");
    }

    json& g = cfg["nonlinearity"];
    if (f.g_kind) g = {{"kind", *f.g_kind}};
    if (f.g_k) g["k"] = *f.g_k;
    if (f.g_w) g["w"] = *f.g_w;
    if (g.at("kind") != "zero" && !g.contains("k")) g["k"] = 1.0;
    if (g.at("kind") == "sine" && !g.contains("w")) g["w"] = 1.0;
    return cfg;
}

struct RunConfig {
    std::string command;
    SystemSpec spec;
    State initial;
    IntegratorConfig integrator;
    json options;
    int seed = 0;

    /// Canonical manifest; decoding it again yields the same RunConfig.
    json manifest() const {
        json j{{"command", command}};
        j.update(json(spec));
        j["initial"] = {{"x", initial.x}, {"v", initial.v}};
        j["integrator"] = json(integrator);
        j["options"] = options;
        j["seed"] = seed;
        return j;
    }
};

RunConfig decode(const json& cfg) {
    RunConfig rc;
    rc.command = cfg.at("command").get<std::string>();
    rc.spec = cfg.get<SystemSpec>();
    rc.initial = {rc.spec.t0, cfg.at("initial").value("x", 1.0), cfg.at("initial").value("v", 0.0)};
    rc.integrator = IntegratorConfig{};
    from_json(cfg.at("integrator"), rc.integrator);
    rc.options = cfg.at("options");
    rc.seed = cfg.value("seed", 0);
    return rc;
}

template <typename T>
T require(const json& options, const char* key) {
    if (!options.contains(key) || options.at(key).is_null()) throw UsageError(std::string("missing required --") + key);
    return options.at(key).get<T>();
}

ScanAxis axis_from(const json& o, const std::string& suffix = "") {
    ScanAxis axis{require<std::string>(o, ("axis" + suffix).c_str()), require<double>(o, ("lo" + suffix).c_str()),
                  require<double>(o, ("hi" + suffix).c_str()), require<int>(o, ("steps" + suffix).c_str())};
    check_axis(axis.name);
    return axis;
}

LyapunovOptions lyapunov_options(const json& o) {
    return {o.at("d0").get<double>(), o.at("renorm_steps").get<int>(), o.at("transient_fraction").get<double>()};
}

SectionSpec section_from(const json& o) {
    SectionSpec s{section_kind_from_string(o.at("section").get<std::string>()), Direction::Falling};
    const auto dir = o.at("direction").get<std::string>();
    if (dir == "rising") s.direction = Direction::Rising;
    else if (dir == "falling") s.direction = Direction::Falling;
    else if (dir == "both") s.direction = Direction::Both;
    else throw UsageError("unknown direction: " + dir);
    return s;
}

json status_json(const RunStatus& st) { return {{"status", std::string(to_string(st.kind))}, {"at", st.at}}; }

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

class Output {
public:
    explicit Output(const std::string& path) : path_(path) {}

    std::ostream& stream() { return buffer_; }

    void commit() {
        if (path_.empty()) {
            std::cout << buffer_.str();
            return;
        }
        std::ofstream out(path_, std::ios::binary);
        if (!(out << buffer_.str())) throw std::runtime_error("cannot write " + path_);
    }

private:
    std::string path_;
    std::ostringstream buffer_;
};

template <typename Result>
void emit_plotdata(const std::string& prefix, const Result& result) {
    if (prefix.empty()) return;
    std::ofstream data(prefix + ".dat", std::ios::binary);
    const PlotSidecar sidecar = write_plotdata(data, result);
    std::ofstream side(prefix + ".json", std::ios::binary);
    side << json(sidecar).dump(2) << '\n';
    if (!data || !side) throw std::runtime_error("cannot write plot data under " + prefix);
}

void write_json(Output& out, json manifest, json body) {
    json doc{{"manifest", std::move(manifest)}};
    doc.update(body);
    out.stream() << doc.dump(2) << '\n';
}

json probe_json(const Probe& p) {
    return {{"value", p.value}, {"lambda", std::isfinite(p.lambda) ? json(p.lambda) : json(nullptr)},
            {"diverged", std::isinf(p.lambda)}};
}

int run(const RunConfig& rc, const Flags& f) {
    const json& o = rc.options;
    json manifest = rc.manifest();
    Output out(f.out_path);
    const bool scan = rc.command == "hopf" || rc.command == "critical";
    validate(rc.spec, scan ? ValidationMode::Scan : ValidationMode::Standard);
    validate(rc.integrator, rc.initial.t);

    if (rc.command == "simulate" || rc.command == "energy") {
        const Trajectory traj = integrate(rc.spec, rc.initial, rc.integrator);
        manifest["status"] = status_json(traj.status);
        if (rc.command == "simulate") {
            write_trajectory_csv(out.stream(), traj, manifest);
            emit_plotdata(f.plot_prefix, traj);
        } else {
            const EnergyTrace trace = traj.status.ok() ? energy_trace(traj) : EnergyTrace{};
            write_energy_csv(out.stream(), trace, manifest);
            emit_plotdata(f.plot_prefix, trace);
        }
    } else if (rc.command == "lyapunov") {
        const auto estimator = estimator_from_string(o.at("estimator").get<std::string>());
        try {
            const LyapunovEstimate est = lyapunov(estimator, rc.spec, rc.initial, rc.integrator, lyapunov_options(o));
            json body = json(est);
            body["status"] = "completed";
            write_json(out, manifest, body);
        } catch (const IntegrationFailure& e) {
            write_json(out, manifest, status_json(e.status));
        }
    } else if (rc.command == "hopf") {
        const ScanAxis axis = axis_from(o);
        std::optional<double> at_time;
        if (o.contains("at_time") && !o.at("at_time").is_null()) at_time = o.at("at_time").get<double>();
        const auto crossings = hopf_scan(rc.spec, axis, at_time, o.at("resolution").get<double>());
        json grid = json::array();
        for (double v : axis_grid(axis)) {
            const EigenReport r = linearized_eigen(with_param(rc.spec, axis.name, v), at_time);
            grid.push_back({{"value", v},
                            {"max_real_part", r.max_real_part},
                            {"eigenvalues", {{r.eigenvalues[0].real(), r.eigenvalues[0].imag()},
                                             {r.eigenvalues[1].real(), r.eigenvalues[1].imag()}}}});
        }
        json list = json::array();
        for (const auto& c : crossings) list.push_back({{"value", c.value}, {"destabilizing", c.destabilizing}});
        write_json(out, manifest, {{"crossings", list}, {"grid", grid}});
    } else if (rc.command == "poincare") {
        const PoincareSection ps =
            poincare(rc.spec, rc.initial, rc.integrator, section_from(o), o.at("transient_fraction").get<double>());
        manifest["status"] = status_json(ps.status);
        write_poincare_csv(out.stream(), ps, manifest);
        emit_plotdata(f.plot_prefix, ps);
    } else if (rc.command == "bifurcation") {
        const BifurcationDiagram d = bifurcation_sweep(rc.spec, axis_from(o), rc.initial, rc.integrator, section_from(o),
                                                       o.at("transient_fraction").get<double>());
        write_bifurcation_csv(out.stream(), d, manifest);
        emit_plotdata(f.plot_prefix, d);
    } else if (rc.command == "map") {
        const LambdaMap m = lambda_map(rc.spec, axis_from(o, "1"), axis_from(o, "2"), rc.initial, rc.integrator,
                                       estimator_from_string(o.at("estimator").get<std::string>()), lyapunov_options(o));
        write_lambda_map_csv(out.stream(), m, manifest);
        emit_plotdata(f.plot_prefix, m);
    } else if (rc.command == "critical") {
        const auto axis = require<std::string>(o, "axis");
        const CriticalSet cs = critical_bisect(rc.spec, axis, require<double>(o, "lo"), require<double>(o, "hi"),
                                               o.at("tol").get<double>(), rc.initial, rc.integrator,
                                               estimator_from_string(o.at("estimator").get<std::string>()),
                                               lyapunov_options(o));
        json probes = json::array();
        for (const Probe& p : cs.probes) probes.push_back(probe_json(p));
        write_json(out, manifest,
                   {{"axis", cs.axis},
                    {"estimator", std::string(to_string(cs.estimator))},
                    {"boundary", cs.boundary},
                    {"tolerance", cs.tolerance},
                    {"lo", probe_json(cs.lo)},
                    {"hi", probe_json(cs.hi)},
                    {"probes", probes}});
    }
    out.commit();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability and chaos diagnostics for regularized second-order systems"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {{"simulate", "Integrate a trajectory (CSV t,x,v)"},
                        {"energy", "Lyapunov-function and energy traces"},
                        {"lyapunov", "Largest Lyapunov exponent (JSON)"},
                        {"hopf", "Eigenvalue crossings of the imaginary axis along a parameter"},
                        {"poincare", "Poincare section points"},
                        {"bifurcation", "Bifurcation diagram over one parameter"},
                        {"map", "Lyapunov-exponent map over two parameters"},
                        {"critical", "Bisect the sign change of lambda along a parameter"}};
    std::map<std::string, Flags> flags;
    for (const Sub& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        Flags& f = flags[s.name];
        add_common_flags(*sub, f);
        const std::string name = s.name;
        if (name == "lyapunov") add_lyapunov_flags(*sub, f);
        if (name == "hopf") {
            add_axis_flags(*sub, f, "");
            bind_double(*sub, f, "--at-time", "/options/at_time", "Freeze time for forms A1/A2");
            bind_double(*sub, f, "--resolution", "/options/resolution", "Bisection resolution");
        }
        if (name == "poincare") add_section_flags(*sub, f, true);
        if (name == "bifurcation") {
            add_axis_flags(*sub, f, "");
            add_section_flags(*sub, f, true);
        }
        if (name == "map") {
            add_axis_flags(*sub, f, "1");
            add_axis_flags(*sub, f, "2");
            add_lyapunov_flags(*sub, f);
        }
        if (name == "critical") {
            bind_string(*sub, f, "--axis", "/options/axis", "Parameter axis");
            bind_double(*sub, f, "--lo", "/options/lo", "Lower end");
            bind_double(*sub, f, "--hi", "/options/hi", "Upper end");
            bind_double(*sub, f, "--tol", "/options/tol", "Bracket width");
            add_lyapunov_flags(*sub, f);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(decode(resolve_config(command, flags.at(command))), flags.at(command));
    } catch (const ValidationError& e) {
        for (const auto& v : e.violations) std::cerr << "error: " << v << '\n';
        return 1;
    } catch (const SingularTime& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const SectionMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: bad configuration: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 2;
    }
}

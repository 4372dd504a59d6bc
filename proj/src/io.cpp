#include "tikhochaos/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace tikhochaos {

namespace {

json nonlinearity_json(const Nonlinearity& g) {
    return std::visit(
        [](const auto& preset) -> json {
            using T = std::decay_t<decltype(preset)>;
            if constexpr (std::is_same_v<T, GLinear>) return {{"kind", "linear"}, {"k", preset.k}};
            else if constexpr (std::is_same_v<T, GCubic>) return {{"kind", "cubic"}, {"k", preset.k}};
            else if constexpr (std::is_same_v<T, GSine>) return {{"kind", "sine"}, {"k", preset.k}, {"w", preset.w}};
            else return {{"kind", "zero"}};
        },
        g);
}

Nonlinearity nonlinearity_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "zero") return GZero{};
    if (kind == "linear") return GLinear{j.at("k").get<double>()};
    if (kind == "cubic") return GCubic{j.at("k").get<double>()};
    if (kind == "sine") return GSine{j.at("k").get<double>(), j.value("w", 1.0)};
    throw std::invalid_argument("unknown nonlinearity kind: " + kind);
}

json epsilon_json(const EpsilonSchedule& eps) {
    if (const auto* c = std::get_if<EpsilonConstant>(&eps)) return {{"kind", "constant"}, {"value", c->value}};
    if (const auto* pl = std::get_if<EpsilonPowerLaw>(&eps))
        return {{"kind", "power_law"}, {"coefficient", pl->coefficient}, {"exponent", pl->exponent}};
    return {{"kind", "zero"}};
}

EpsilonSchedule epsilon_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "zero") return EpsilonZero{};
    if (kind == "constant") return EpsilonConstant{j.at("value").get<double>()};
    if (kind == "power_law") return EpsilonPowerLaw{j.at("coefficient").get<double>(), j.at("exponent").get<double>()};
    throw std::invalid_argument("unknown epsilon kind: " + kind);
}

void write_row(std::ostream& os, std::initializer_list<double> values, char sep = ',') {
    bool first = true;
    for (double v : values) {
        if (!first) os << sep;
        os << format_double(v);
        first = false;
    }
    os << '\n';
}

}  // namespace

void to_json(json& j, const SystemSpec& spec) {
    const Params& k = spec.params;
    j = json{{"form", std::string(to_string(spec.form))},
             {"params",
              {{"alpha", k.alpha},
               {"beta", k.beta},
               {"gamma", k.gamma},
               {"delta", k.delta},
               {"omega", k.omega},
               {"q", k.q},
               {"p", k.p},
               {"n", k.n}}},
             {"nonlinearity", nonlinearity_json(spec.nonlinearity)},
             {"epsilon", epsilon_json(spec.epsilon)},
             {"t0", spec.t0},
             {"theorem_mode", spec.theorem_mode}};
}

void from_json(const json& j, SystemSpec& spec) {
    spec.form = form_from_string(j.at("form").get<std::string>());
    Params k;
    if (j.contains("params")) {
        const json& p = j.at("params");
        k.alpha = p.value("alpha", k.alpha);
        k.beta = p.value("beta", k.beta);
        k.gamma = p.value("gamma", k.gamma);
        k.delta = p.value("delta", k.delta);
        k.omega = p.value("omega", k.omega);
        k.q = p.value("q", k.q);
        k.p = p.value("p", k.p);
        k.n = p.value("n", k.n);
    }
    spec.params = k;
    spec.nonlinearity = j.contains("nonlinearity") ? nonlinearity_from_json(j.at("nonlinearity")) : GZero{};
    spec.epsilon = j.contains("epsilon") ? epsilon_from_json(j.at("epsilon")) : EpsilonZero{};
    spec.t0 = j.value("t0", default_t0(spec.form));
    spec.theorem_mode = j.value("theorem_mode", false);
}

void to_json(json& j, const IntegratorConfig& cfg) {
    j = json{{"method", std::string(to_string(cfg.method))},
             {"dt", cfg.dt},
             {"abs_tol", cfg.abs_tol},
             {"rel_tol", cfg.rel_tol},
             {"t_end", cfg.t_end},
             {"sample_every", cfg.sample_every},
             {"blowup_threshold", cfg.blowup_threshold}};
}

void from_json(const json& j, IntegratorConfig& cfg) {
    if (j.contains("method")) cfg.method = method_from_string(j.at("method").get<std::string>());
    cfg.dt = j.value("dt", cfg.dt);
    cfg.abs_tol = j.value("abs_tol", cfg.abs_tol);
    cfg.rel_tol = j.value("rel_tol", cfg.rel_tol);
    cfg.t_end = j.value("t_end", cfg.t_end);
    cfg.sample_every = j.value("sample_every", cfg.sample_every);
    cfg.blowup_threshold = j.value("blowup_threshold", cfg.blowup_threshold);
}

void to_json(json& j, const LyapunovEstimate& est) {
    j = json{{"lambda", est.lambda},
             {"method", std::string(to_string(est.method))},
             {"transient_skipped", est.transient_skipped},
             {"convergence", est.convergence}};
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_manifest(std::ostream& os, const json& manifest) { os << "# " << manifest.dump() << '\n'; }

std::optional<json> read_manifest(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) return std::nullopt;
    return json::parse(line.substr(2));
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const json& manifest) {
    write_manifest(os, manifest);
    os << "t,x,v\n";
    for (const State& s : traj.samples) write_row(os, {s.t, s.x, s.v});
}

void write_energy_csv(std::ostream& os, const EnergyTrace& trace, const json& manifest) {
    write_manifest(os, manifest);
    os << "t,V,V_dot_exact,V_dot_paper,V_reg,E\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
        write_row(os, {trace.t[i], trace.V[i], trace.V_dot_exact[i], trace.V_dot_paper[i], trace.V_reg[i], trace.E[i]});
}

void write_poincare_csv(std::ostream& os, const PoincareSection& section, const json& manifest) {
    write_manifest(os, manifest);
    os << (section.section.kind == SectionKind::Stroboscopic ? "x,v\n" : "t,x\n");
    for (const auto& p : section.points()) write_row(os, {p.x(), p.y()});
}

void write_bifurcation_csv(std::ostream& os, const BifurcationDiagram& diagram, const json& manifest) {
    write_manifest(os, manifest);
    os << "param,x\n";
    for (const auto& cell : diagram.cells) {
        if (!cell.status.ok()) {
            os << format_double(cell.value) << ',' << to_string(cell.status.kind) << '\n';
            continue;
        }
        for (double x : cell.x) write_row(os, {cell.value, x});
    }
}

void write_lambda_map_csv(std::ostream& os, const LambdaMap& map, const json& manifest) {
    write_manifest(os, manifest);
    os << "axis1,axis2,lambda,status\n";
    for (std::size_t i = 0; i < map.values1.size(); ++i) {
        for (std::size_t j = 0; j < map.values2.size(); ++j) {
            const auto r = static_cast<Eigen::Index>(i);
            const auto c = static_cast<Eigen::Index>(j);
            os << format_double(map.values1[i]) << ',' << format_double(map.values2[j]) << ','
               << format_double(map.lambda(r, c)) << ',' << to_string(map.regime(r, c)) << '\n';
        }
    }
}

void to_json(json& j, const PlotSidecar& s) {
    j = json{{"kind", s.kind}, {"columns", s.columns}, {"xlabel", s.xlabel}, {"ylabel", s.ylabel}, {"title", s.title}};
}

PlotSidecar write_plotdata(std::ostream& os, const Trajectory& traj) {
    os << "# t x v\n";
    for (const State& s : traj.samples) write_row(os, {s.t, s.x, s.v}, ' ');
    return {"trajectory", {"t", "x", "v"}, "t", "x(t), x'(t)", "Temporal evolution of state variables"};
}

PlotSidecar write_plotdata(std::ostream& os, const PoincareSection& section) {
    const bool strobe = section.section.kind == SectionKind::Stroboscopic;
    os << (strobe ? "# x v\n" : "# t x\n");
    for (const auto& p : section.points()) write_row(os, {p.x(), p.y()}, ' ');
    if (strobe) return {"poincare", {"x", "v"}, "x", "x'", "Poincare section (stroboscopic)"};
    return {"poincare", {"t", "x"}, "t", "x", "Poincare section (x' = 0 crossings)"};
}

PlotSidecar write_plotdata(std::ostream& os, const BifurcationDiagram& diagram) {
    os << "# " << diagram.parameter << " x\n";
    for (const auto& cell : diagram.cells)
        for (double x : cell.x) write_row(os, {cell.value, x}, ' ');
    return {"bifurcation", {diagram.parameter, "x"}, diagram.parameter, "x", "Bifurcation diagram"};
}

PlotSidecar write_plotdata(std::ostream& os, const LambdaMap& map) {
    os << "# " << map.axis1.name << ' ' << map.axis2.name << " lambda\n";
    for (std::size_t i = 0; i < map.values1.size(); ++i) {
        for (std::size_t j = 0; j < map.values2.size(); ++j)
            write_row(os, {map.values1[i], map.values2[j],
                           map.lambda(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))},
                      ' ');
        os << '\n';  // gnuplot pm3d scan separator
    }
    return {"lambda_map", {map.axis1.name, map.axis2.name, "lambda"}, map.axis1.name, map.axis2.name,
            "Largest Lyapunov exponent"};
}

PlotSidecar write_plotdata(std::ostream& os, const EnergyTrace& trace) {
    os << "# t V V_dot_exact V_dot_paper V_reg E\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
        write_row(os, {trace.t[i], trace.V[i], trace.V_dot_exact[i], trace.V_dot_paper[i], trace.V_reg[i], trace.E[i]},
                  ' ');
    return {"energy", {"t", "V", "V_dot_exact", "V_dot_paper", "V_reg", "E"}, "t", "energy", "Lyapunov function trace"};
}

}  // namespace tikhochaos

#include "tikhochaos/model.hpp"

#include <algorithm>

namespace tikhochaos {

std::string_view to_string(SystemForm form) {
    switch (form) {
    case SystemForm::A1: return "A1";
    case SystemForm::A2: return "A2";
    case SystemForm::B: return "B";
    }
    return "?";
}

SystemForm form_from_string(std::string_view name) {
    if (name == "A1" || name == "a1") return SystemForm::A1;
    if (name == "A2" || name == "a2") return SystemForm::A2;
    if (name == "B" || name == "b") return SystemForm::B;
    throw std::invalid_argument("unknown system form: " + std::string(name));
}

double default_t0(SystemForm form) { return form == SystemForm::B ? 0.0 : 1.0; }

double epsilon_integral(const EpsilonSchedule& eps, double from, double to) {
    if (const auto* c = std::get_if<EpsilonConstant>(&eps)) return c->value * (to - from);
    if (const auto* pl = std::get_if<EpsilonPowerLaw>(&eps)) {
        if (pl->exponent == 1.0) return pl->coefficient * std::log(to / from);
        const double e = 1.0 - pl->exponent;
        return pl->coefficient * (std::pow(to, e) - std::pow(from, e)) / e;
    }
    return 0.0;
}

SingularTime::SingularTime(double t_)
    : std::domain_error("SingularTime: coefficients 1/t^q are singular at t = " + std::to_string(t_)), t(t_) {}

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out = "validation failed:";
    for (const auto& l : lines) out += "\n  " + l;
    return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> v)
    : std::invalid_argument(join_lines(v)), violations(std::move(v)) {}

std::vector<std::string> violations(const SystemSpec& spec, ValidationMode mode) {
    std::vector<std::string> out;
    const Params& k = spec.params;
    const bool scan = mode == ValidationMode::Scan;

    auto finite = [&](double value, const char* name) {
        if (!std::isfinite(value)) out.push_back(std::string(name) + " must be finite");
    };
    finite(k.alpha, "alpha");
    finite(k.beta, "beta");
    finite(k.gamma, "gamma");
    finite(k.delta, "delta");
    finite(k.omega, "omega");
    finite(k.q, "q");
    finite(k.p, "p");
    finite(spec.t0, "t0");

    if (!scan) {
        if (k.alpha < 0) out.push_back("alpha must be >= 0");
        if (k.beta < 0) out.push_back("beta must be >= 0");
        if (k.gamma < 0) out.push_back("gamma must be >= 0");
    }
    if (k.delta != 0.0 && !(k.omega > 0)) out.push_back("omega must be > 0 when delta != 0");
    if (k.q < 0) out.push_back("q must be >= 0");
    if (k.p < 0) out.push_back("p must be >= 0");
    if (k.n < 1) out.push_back("n must be an integer >= 1");

    if (const auto* c = std::get_if<EpsilonConstant>(&spec.epsilon)) {
        if (!scan && c->value < 0) out.push_back("constant epsilon must be >= 0");
    } else if (const auto* pl = std::get_if<EpsilonPowerLaw>(&spec.epsilon)) {
        if (!(pl->coefficient > 0) && !scan) out.push_back("power-law epsilon coefficient must be > 0");
        if (pl->exponent < 0) out.push_back("power-law epsilon exponent must be >= 0");
        if (pl->exponent != k.p) out.push_back("power-law epsilon exponent must equal p");
        if (spec.t0 <= 0 && pl->exponent > 0) out.push_back("SingularTime: power-law epsilon needs t0 > 0");
    }

    if (spec.form == SystemForm::B) {
        if (!std::holds_alternative<GZero>(spec.nonlinearity))
            out.push_back("form B fixes its nonlinearity; nonlinearity must be zero");
        if (spec.t0 < 0) out.push_back("t0 must be >= 0");
    } else {
        if (spec.t0 <= 0) out.push_back("SingularTime: forms A1/A2 require t0 > 0");
        if (const auto* s = std::get_if<GSine>(&spec.nonlinearity); s && !std::isfinite(s->w))
            out.push_back("sine nonlinearity frequency must be finite");
    }

    if (spec.theorem_mode) {
        if (spec.form == SystemForm::B && k.n < 2) out.push_back("theorem mode requires n >= 2");
        if (!(k.alpha > 0 && k.beta > 0 && k.gamma > 0)) out.push_back("theorem mode requires alpha, beta, gamma > 0");
        if (const auto* pl = std::get_if<EpsilonPowerLaw>(&spec.epsilon); pl && !(pl->exponent > k.q + 1))
            out.push_back("theorem mode requires p > q + 1");
    }
    return out;
}

const SystemSpec& validate(const SystemSpec& spec, ValidationMode mode) {
    auto v = violations(spec, mode);
    if (!v.empty()) throw ValidationError(std::move(v));
    return spec;
}

const std::vector<std::string>& axis_names() {
    static const std::vector<std::string> names{"alpha", "beta", "gamma", "delta", "omega",
                                                "q",     "p",    "n",     "epsilon"};
    return names;
}

void check_axis(std::string_view axis) {
    const auto& names = axis_names();
    if (std::find(names.begin(), names.end(), axis) == names.end()) throw InvalidAxis(std::string(axis));
}

SystemSpec with_param(SystemSpec spec, std::string_view axis, double value) {
    Params& k = spec.params;
    if (axis == "alpha") k.alpha = value;
    else if (axis == "beta") k.beta = value;
    else if (axis == "gamma") k.gamma = value;
    else if (axis == "delta") k.delta = value;
    else if (axis == "omega") k.omega = value;
    else if (axis == "q") k.q = value;
    else if (axis == "p") {
        k.p = value;
        if (auto* pl = std::get_if<EpsilonPowerLaw>(&spec.epsilon)) pl->exponent = value;
    } else if (axis == "n") k.n = static_cast<int>(std::lround(value));
    else if (axis == "epsilon") {
        if (auto* pl = std::get_if<EpsilonPowerLaw>(&spec.epsilon)) pl->coefficient = value;
        else spec.epsilon = EpsilonConstant{value};
    } else throw InvalidAxis(std::string(axis));
    return spec;
}

double get_param(const SystemSpec& spec, std::string_view axis) {
    const Params& k = spec.params;
    if (axis == "alpha") return k.alpha;
    if (axis == "beta") return k.beta;
    if (axis == "gamma") return k.gamma;
    if (axis == "delta") return k.delta;
    if (axis == "omega") return k.omega;
    if (axis == "q") return k.q;
    if (axis == "p") return k.p;
    if (axis == "n") return k.n;
    if (axis == "epsilon") {
        if (const auto* pl = std::get_if<EpsilonPowerLaw>(&spec.epsilon)) return pl->coefficient;
        if (const auto* c = std::get_if<EpsilonConstant>(&spec.epsilon)) return c->value;
        return 0.0;
    }
    throw InvalidAxis(std::string(axis));
}

}  // namespace tikhochaos

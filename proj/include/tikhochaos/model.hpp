// Second-order systems with time-dependent damping, Tikhonov-type regularization
// and nonlinear forcing.
//
// Three right-hand sides share one parameter set:
//   A1  x'' + a/t^q x' + g(x + (c + b/t^q) x') + eps(t) x + d sin(w x) = 0
//   A2  x'' + a/t^q x' + g(x) + (c + b/t^q) x' + eps(t) x + d sin(w x) = 0
//   B   x'' + a x' + b x + c d sin(w t) x^n + eps(t) = 0
// with (a, b, c, d, w) = (alpha, beta, gamma, delta, omega).
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tikhochaos {

enum class SystemForm { A1, A2, B };

std::string_view to_string(SystemForm form);
SystemForm form_from_string(std::string_view name);

struct Params {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    double omega = 1.0;
    double q = 0.0;
    double p = 0.0;
    int n = 1;
};

// ---------------------------------------------------------------------------
// Regularization schedules eps(t)
// ---------------------------------------------------------------------------

struct EpsilonZero {};
struct EpsilonConstant {
    double value = 0.0;
};
/// eps(t) = coefficient / t^exponent.
struct EpsilonPowerLaw {
    double coefficient = 1.0;
    double exponent = 0.0;
};

using EpsilonSchedule = std::variant<EpsilonZero, EpsilonConstant, EpsilonPowerLaw>;

template <typename Scalar>
Scalar epsilon_at(const EpsilonSchedule& eps, const Scalar& t) {
    using std::pow;
    if (const auto* c = std::get_if<EpsilonConstant>(&eps)) return Scalar(c->value);
    if (const auto* pl = std::get_if<EpsilonPowerLaw>(&eps))
        return Scalar(pl->coefficient) / pow(t, Scalar(pl->exponent));
    return Scalar(0);
}

/// Closed form of the integral of eps over [from, to]; both ends must be > 0
/// for a power law with positive exponent.
double epsilon_integral(const EpsilonSchedule& eps, double from, double to);

// ---------------------------------------------------------------------------
// Nonlinearity presets g(u) for forms A1/A2
// ---------------------------------------------------------------------------

struct GZero {};
struct GLinear {
    double k = 0.0;
};
struct GCubic {
    double k = 0.0;
};
struct GSine {
    double k = 0.0;
    double w = 1.0;
};

using Nonlinearity = std::variant<GZero, GLinear, GCubic, GSine>;

template <typename Scalar>
Scalar g_value(const Nonlinearity& g, const Scalar& u) {
    using std::sin;
    return std::visit(
        [&](const auto& preset) -> Scalar {
            using T = std::decay_t<decltype(preset)>;
            if constexpr (std::is_same_v<T, GLinear>) return Scalar(preset.k) * u;
            else if constexpr (std::is_same_v<T, GCubic>) return Scalar(preset.k) * u * u * u;
            else if constexpr (std::is_same_v<T, GSine>) return Scalar(preset.k) * sin(Scalar(preset.w) * u);
            else return Scalar(0);
        },
        g);
}

template <typename Scalar>
Scalar g_slope(const Nonlinearity& g, const Scalar& u) {
    using std::cos;
    return std::visit(
        [&](const auto& preset) -> Scalar {
            using T = std::decay_t<decltype(preset)>;
            if constexpr (std::is_same_v<T, GLinear>) return Scalar(preset.k);
            else if constexpr (std::is_same_v<T, GCubic>) return Scalar(3 * preset.k) * u * u;
            else if constexpr (std::is_same_v<T, GSine>)
                return Scalar(preset.k * preset.w) * cos(Scalar(preset.w) * u);
            else return Scalar(0);
        },
        g);
}

struct SystemSpec {
    SystemForm form = SystemForm::B;
    Params params;
    Nonlinearity nonlinearity = GZero{};
    EpsilonSchedule epsilon = EpsilonZero{};
    /// Start time; forms A1/A2 need t0 > 0.
    double t0 = 0.0;
    /// Enforce the theorem hypotheses (n >= 2, p > q + 1, positive coefficients).
    bool theorem_mode = false;
};

/// Default start time per form: 1 for A1/A2, 0 for B.
double default_t0(SystemForm form);

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct SingularTime : std::domain_error {
    explicit SingularTime(double t);
    double t;
};

struct NonFinite : std::runtime_error {
    explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::invalid_argument {
    explicit ValidationError(std::vector<std::string> violations);
    std::vector<std::string> violations;
};

enum class ValidationMode {
    Standard,
    /// Parameter scans: coefficient signs are not checked.
    Scan,
};

/// Every invariant violated by `spec`, in a stable order. Empty when valid.
std::vector<std::string> violations(const SystemSpec& spec, ValidationMode mode = ValidationMode::Standard);

/// Returns `spec` unchanged or throws ValidationError listing every violation.
const SystemSpec& validate(const SystemSpec& spec, ValidationMode mode = ValidationMode::Standard);

// ---------------------------------------------------------------------------
// State and right-hand side
// ---------------------------------------------------------------------------

struct State {
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;

    Eigen::Vector2d xv() const { return {x, v}; }
};

namespace detail {

template <typename Scalar>
Scalar time_power(const SystemSpec& spec, const Scalar& t) {
    using std::pow;
    if (spec.params.q == 0.0) return Scalar(1);
    if (!(t > Scalar(0))) throw SingularTime(static_cast<double>(t));
    return pow(t, Scalar(spec.params.q));
}

template <typename Scalar>
Scalar int_power(const Scalar& x, int n) {
    Scalar r(1);
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

template <typename Scalar>
void require_finite(const Scalar& value, const char* what) {
    using std::isfinite;
    if (!isfinite(value)) throw NonFinite(what);
}

}  // namespace detail

/// x'' solved from the governing equation of `spec.form`.
template <typename Scalar = double>
Scalar accel(const SystemSpec& spec, const Scalar& t, const Scalar& x, const Scalar& v) {
    using std::sin;
    const Params& k = spec.params;
    Scalar out;
    switch (spec.form) {
    case SystemForm::A1:
    case SystemForm::A2: {
        const Scalar tq = detail::time_power(spec, t);
        const Scalar coupling = Scalar(k.gamma) + Scalar(k.beta) / tq;
        const Scalar restoring = spec.form == SystemForm::A1 ? g_value(spec.nonlinearity, x + coupling * v)
                                                             : g_value(spec.nonlinearity, x) + coupling * v;
        out = -(Scalar(k.alpha) / tq * v + restoring + epsilon_at(spec.epsilon, t) * x +
                Scalar(k.delta) * sin(Scalar(k.omega) * x));
        break;
    }
    case SystemForm::B: {
        const Scalar forcing = Scalar(k.delta) * sin(Scalar(k.omega) * t) * detail::int_power(x, k.n);
        out = -(Scalar(k.alpha) * v + Scalar(k.beta) * x + Scalar(k.gamma) * forcing + epsilon_at(spec.epsilon, t));
        break;
    }
    }
    detail::require_finite(out, "acceleration overflowed");
    return out;
}

inline double accel(const SystemSpec& spec, const State& s) { return accel<double>(spec, s.t, s.x, s.v); }

/// Partial derivatives (d x''/dx, d x''/dv) at a state.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 1> accel_gradient(const SystemSpec& spec, const Scalar& t, const Scalar& x, const Scalar& v) {
    using std::cos;
    using std::sin;
    const Params& k = spec.params;
    Eigen::Matrix<Scalar, 2, 1> grad;
    switch (spec.form) {
    case SystemForm::A1:
    case SystemForm::A2: {
        const Scalar tq = detail::time_power(spec, t);
        const Scalar coupling = Scalar(k.gamma) + Scalar(k.beta) / tq;
        const Scalar common = epsilon_at(spec.epsilon, t) + Scalar(k.delta * k.omega) * cos(Scalar(k.omega) * x);
        if (spec.form == SystemForm::A1) {
            const Scalar slope = g_slope(spec.nonlinearity, x + coupling * v);
            grad << -(slope + common), -(Scalar(k.alpha) / tq + slope * coupling);
        } else {
            grad << -(g_slope(spec.nonlinearity, x) + common), -(Scalar(k.alpha) / tq + coupling);
        }
        break;
    }
    case SystemForm::B: {
        const Scalar dforce = k.n == 0 ? Scalar(0)
                                       : Scalar(k.gamma * k.delta * k.n) * sin(Scalar(k.omega) * t) *
                                             detail::int_power(x, k.n - 1);
        grad << -(Scalar(k.beta) + dforce), -Scalar(k.alpha);
        break;
    }
    }
    detail::require_finite(grad(0), "tangent acceleration overflowed");
    detail::require_finite(grad(1), "tangent acceleration overflowed");
    return grad;
}

/// Directional derivative of accel at (t, x, v) along (dx, dv).
template <typename Scalar = double>
Scalar tangent_accel(const SystemSpec& spec, const Scalar& t, const Scalar& x, const Scalar& v, const Scalar& dx,
                     const Scalar& dv) {
    const auto grad = accel_gradient(spec, t, x, v);
    return grad(0) * dx + grad(1) * dv;
}

inline double tangent_accel(const SystemSpec& spec, const State& s, const Eigen::Vector2d& ds) {
    return tangent_accel<double>(spec, s.t, s.x, s.v, ds(0), ds(1));
}

// ---------------------------------------------------------------------------
// Parameter axes used by scans and sweeps
// ---------------------------------------------------------------------------

/// Names accepted by `set_param`: the Params fields plus "epsilon"
/// (constant value or power-law coefficient).
const std::vector<std::string>& axis_names();

struct InvalidAxis : std::invalid_argument {
    explicit InvalidAxis(const std::string& name) : std::invalid_argument("unknown parameter axis: " + name) {}
};

/// Copy of `spec` with the named parameter set to `value`.
SystemSpec with_param(SystemSpec spec, std::string_view axis, double value);
double get_param(const SystemSpec& spec, std::string_view axis);
void check_axis(std::string_view axis);

}  // namespace tikhochaos

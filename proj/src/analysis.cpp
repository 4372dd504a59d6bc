#include "tikhochaos/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tikhochaos {

namespace {

double coupling_at(const SystemSpec& spec, double t) {
    if (spec.form == SystemForm::B) return spec.params.gamma;
    return spec.params.gamma + spec.params.beta / detail::time_power(spec, t);
}

double paper_v_dot(const SystemSpec& spec, const State& s) {
    const Params& k = spec.params;
    const double eps = epsilon_at(spec.epsilon, s.t);
    if (spec.form == SystemForm::B) {
        const double f = k.delta * std::sin(k.omega * s.t) * detail::int_power(s.x, k.n);
        return -k.alpha * s.v * s.v - k.gamma * f * s.v;
    }
    const double tq = detail::time_power(spec, s.t);
    return -(k.alpha / tq) * s.v * s.v - eps * s.x * s.x - k.delta * std::sin(k.omega * s.x) * s.v;
}

}  // namespace

EnergyTrace energy_trace(const Trajectory& traj) {
    if (!traj.status.ok()) throw std::invalid_argument("energy_trace needs a completed trajectory");
    const SystemSpec& spec = traj.spec;
    const auto n = traj.samples.size();
    EnergyTrace out;
    for (auto* series : {&out.t, &out.V, &out.V_dot_exact, &out.V_dot_paper, &out.V_reg, &out.E}) series->reserve(n);

    const bool has_g = spec.form != SystemForm::B;
    double g_min = std::numeric_limits<double>::infinity();
    for (const State& s : traj.samples) g_min = std::min(g_min, has_g ? g_value(spec.nonlinearity, s.x) : 0.0);

    // Simpson's rule per sample interval, matching RK4 applied to eps(t).
    double eps_integral = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const State& s = traj.samples[i];
        if (i > 0) {
            const double a = traj.samples[i - 1].t;
            const double b = s.t;
            eps_integral += (b - a) / 6 *
                            (epsilon_at(spec.epsilon, a) + 4 * epsilon_at(spec.epsilon, (a + b) / 2) +
                             epsilon_at(spec.epsilon, b));
        }
        const double eps = epsilon_at(spec.epsilon, s.t);
        const double g = has_g ? g_value(spec.nonlinearity, s.x) : 0.0;
        out.t.push_back(s.t);
        out.V.push_back(0.5 * (s.v * s.v + s.x * s.x));
        out.V_dot_exact.push_back(s.v * (accel(spec, s) + s.x));
        out.V_dot_paper.push_back(paper_v_dot(spec, s));
        out.V_reg.push_back(0.5 * s.v * s.v + 0.5 * spec.params.beta * s.x * s.x + eps_integral);
        out.E.push_back(0.5 * (g + coupling_at(spec, s.t) * s.v) - g_min + 0.5 * eps * s.x * s.x + 0.5 * s.v * s.v);
    }
    return out;
}

EigenReport companion_eigen(double alpha_eff, double beta_eff) {
    EigenReport r;
    r.alpha_eff = alpha_eff;
    r.beta_eff = beta_eff;
    r.matrix << 0.0, 1.0, -beta_eff, -alpha_eff;
    const double disc = alpha_eff * alpha_eff - 4 * beta_eff;
    if (disc < 0) {
        const double re = -alpha_eff / 2;
        const double im = std::sqrt(-disc) / 2;
        r.eigenvalues = {std::complex<double>(re, im), std::complex<double>(re, -im)};
    } else {
        // larger-magnitude root first, the other from the product
        const double root = std::sqrt(disc);
        const double big = alpha_eff >= 0 ? -(alpha_eff + root) / 2 : (-alpha_eff + root) / 2;
        const double small = big != 0.0 ? beta_eff / big : 0.0;
        r.eigenvalues = {std::complex<double>(big, 0.0), std::complex<double>(small, 0.0)};
    }
    r.max_real_part = std::max(r.eigenvalues[0].real(), r.eigenvalues[1].real());
    return r;
}

EigenReport linearized_eigen(const SystemSpec& spec, std::optional<double> at_time) {
    if (spec.form == SystemForm::B) return companion_eigen(spec.params.alpha, spec.params.beta);
    const double t = at_time.value_or(spec.t0);
    if (t <= 0) throw SingularTime(t);
    const auto grad = accel_gradient<double>(spec, t, 0.0, 0.0);
    return companion_eigen(-grad(1), -grad(0));
}

std::vector<double> axis_grid(const ScanAxis& axis) {
    if (axis.lo == axis.hi) return {axis.lo};
    if (axis.steps < 2) throw std::invalid_argument("axis '" + axis.name + "' needs at least 2 steps");
    if (!(axis.hi > axis.lo)) throw std::invalid_argument("axis '" + axis.name + "' needs lo < hi");
    std::vector<double> values(static_cast<std::size_t>(axis.steps));
    const double span = axis.hi - axis.lo;
    for (int i = 0; i < axis.steps; ++i) values[i] = axis.lo + span * i / (axis.steps - 1);
    values.back() = axis.hi;
    return values;
}

std::vector<HopfCrossing> hopf_scan(const SystemSpec& tmpl, const ScanAxis& axis, std::optional<double> at_time,
                                    double resolution) {
    check_axis(axis.name);
    const auto values = axis_grid(axis);
    validate(with_param(tmpl, axis.name, values.front()), ValidationMode::Scan);
    validate(with_param(tmpl, axis.name, values.back()), ValidationMode::Scan);

    auto growth = [&](double value) {
        return linearized_eigen(with_param(tmpl, axis.name, value), at_time).max_real_part;
    };
    auto sign = [](double m) { return (m > 0) - (m < 0); };

    std::vector<HopfCrossing> out;
    int last_sign = 0;
    double last_value = values.front();
    for (double value : values) {
        const int s = sign(growth(value));
        if (s == 0) continue;
        if (last_sign != 0 && s != last_sign) {
            double lo = last_value;
            double hi = value;
            double root = 0.0;
            bool exact = false;
            while (hi - lo > resolution) {
                const double mid = lo + (hi - lo) / 2;
                const int sm = sign(growth(mid));
                if (sm == 0) {
                    root = mid;
                    exact = true;
                    break;
                }
                (sm == last_sign ? lo : hi) = mid;
            }
            out.push_back({exact ? root : lo + (hi - lo) / 2, s > 0});
        }
        last_sign = s;
        last_value = value;
    }
    return out;
}

std::string_view to_string(Estimator e) { return e == Estimator::TwoTrajectory ? "two_trajectory" : "variational"; }

Estimator estimator_from_string(std::string_view name) {
    if (name == "two_trajectory" || name == "two-trajectory" || name == "benettin") return Estimator::TwoTrajectory;
    if (name == "variational") return Estimator::Variational;
    throw std::invalid_argument("unknown Lyapunov estimator: " + std::string(name));
}

IntegrationFailure::IntegrationFailure(RunStatus s)
    : std::runtime_error("integration " + std::string(to_string(s.kind)) + " at t = " + std::to_string(s.at)),
      status(s) {}

DegenerateSeparation::DegenerateSeparation(double t)
    : std::runtime_error("separation collapsed to zero at t = " + std::to_string(t)) {}

namespace {

/// Epoch loop shared by both estimators. `renormalize(t, y)` rescales the
/// perturbation part of y in place and returns the log growth factor.
template <typename Rhs, typename Renormalize>
LyapunovEstimate run_epochs(Estimator method, const Rhs& rhs, Vec<4> y, double t0, const IntegratorConfig& cfg,
                            const LyapunovOptions& opts, const Renormalize& renormalize) {
    validate(cfg, t0);
    if (opts.renorm_steps < 1) throw std::invalid_argument("renorm_steps must be >= 1");
    if (!(opts.transient_fraction >= 0 && opts.transient_fraction < 1))
        throw std::invalid_argument("transient_fraction must lie in [0, 1)");

    const double interval = opts.renorm_steps * cfg.dt;
    const double transient_end = t0 + opts.transient_fraction * (cfg.t_end - t0);
    auto bounded = [&](const Vec<4>& z) { return within(z.head<2>(), cfg.blowup_threshold) && z.allFinite(); };
    if (!bounded(y)) throw IntegrationFailure({RunStatus::Kind::Diverged, t0});

    LyapunovEstimate est;
    est.method = method;
    Marcher<4> marcher(cfg);
    double t = t0;
    double log_sum = 0.0;
    double elapsed = 0.0;
    bool accumulating = false;
    for (long long k = 1; t < cfg.t_end; ++k) {
        const double epoch_start = t;
        const double target = std::min(t0 + static_cast<double>(k) * interval, cfg.t_end);
        const RunStatus st = marcher.advance(rhs, t, y, target, bounded, [](double, const Vec<4>&, double, const Vec<4>&) {});
        if (!st.ok()) throw IntegrationFailure(st);
        const double growth = renormalize(t, y);
        if (!accumulating && epoch_start >= transient_end - 1e-9 * interval) {
            accumulating = true;
            est.transient_skipped = epoch_start - t0;
        }
        if (accumulating) {
            log_sum += growth;
            elapsed += t - epoch_start;
            est.convergence.push_back(log_sum / elapsed);
        }
    }
    if (est.convergence.empty()) throw std::invalid_argument("no renormalization epoch after the transient");
    est.lambda = est.convergence.back();
    return est;
}

}  // namespace

LyapunovEstimate lyapunov_two_trajectory(const SystemSpec& spec, const State& initial, const IntegratorConfig& cfg,
                                         const LyapunovOptions& opts) {
    if (!(opts.d0 >= 1e-10 && opts.d0 <= 1e-6)) throw std::invalid_argument("d0 must lie in [1e-10, 1e-6]");
    auto rhs = [&spec](double t, const Vec<4>& y) -> Vec<4> {
        return {y(1), accel<double>(spec, t, y(0), y(1)), y(3), accel<double>(spec, t, y(2), y(3))};
    };
    Vec<4> y(initial.x, initial.v, initial.x + opts.d0, initial.v);
    return run_epochs(Estimator::TwoTrajectory, rhs, y, initial.t, cfg, opts, [&](double t, Vec<4>& z) {
        const Vec<2> diff = z.tail<2>() - z.head<2>();
        const double d = diff.norm();
        if (!(d > 0) || !std::isfinite(d)) throw DegenerateSeparation(t);
        z.tail<2>() = z.head<2>() + diff * (opts.d0 / d);
        return std::log(d / opts.d0);
    });
}

LyapunovEstimate lyapunov_variational(const SystemSpec& spec, const State& initial, const IntegratorConfig& cfg,
                                      const LyapunovOptions& opts) {
    auto rhs = [&spec](double t, const Vec<4>& y) -> Vec<4> {
        const auto grad = accel_gradient<double>(spec, t, y(0), y(1));
        return {y(1), accel<double>(spec, t, y(0), y(1)), y(3), grad(0) * y(2) + grad(1) * y(3)};
    };
    Vec<4> y(initial.x, initial.v, 1.0, 0.0);
    return run_epochs(Estimator::Variational, rhs, y, initial.t, cfg, opts, [](double t, Vec<4>& z) {
        const double norm = z.tail<2>().norm();
        if (!(norm > 0) || !std::isfinite(norm)) throw DegenerateSeparation(t);
        z.tail<2>() /= norm;
        return std::log(norm);
    });
}

LyapunovEstimate lyapunov(Estimator estimator, const SystemSpec& spec, const State& initial,
                          const IntegratorConfig& cfg, const LyapunovOptions& opts) {
    return estimator == Estimator::TwoTrajectory ? lyapunov_two_trajectory(spec, initial, cfg, opts)
                                                 : lyapunov_variational(spec, initial, cfg, opts);
}

}  // namespace tikhochaos

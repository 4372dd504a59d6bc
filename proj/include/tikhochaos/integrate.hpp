// Time stepping: fixed-step RK4 and adaptive Runge-Kutta-Fehlberg 4(5), with
// sampled trajectories and section-crossing events.
#pragma once

#include "tikhochaos/model.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace tikhochaos {

enum class Method { RK4, RKF45 };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

struct IntegratorConfig {
    Method method = Method::RK4;
    double dt = 1e-3;
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    double t_end = 10.0;
    int sample_every = 1;
    double blowup_threshold = 1e8;
};

std::vector<std::string> violations(const IntegratorConfig& cfg, double t0);
void validate(const IntegratorConfig& cfg, double t0);

struct RunStatus {
    enum class Kind { Completed, Diverged, StepFailure };
    Kind kind = Kind::Completed;
    /// Time of the failure; t_end when completed.
    double at = 0.0;

    bool ok() const { return kind == Kind::Completed; }
};

std::string_view to_string(RunStatus::Kind kind);

struct Trajectory {
    SystemSpec spec;
    std::vector<State> samples;
    RunStatus status;
};

/// Integrates from `initial` (initial.t is the start time) to cfg.t_end.
Trajectory integrate(const SystemSpec& spec, const State& initial, const IntegratorConfig& cfg);

// ---------------------------------------------------------------------------
// Sections
// ---------------------------------------------------------------------------

enum class Direction { Rising, Falling, Both };

/// Zero crossings of a scalar function of the state.
struct CrossingEvent {
    std::function<double(const State&)> function;
    Direction direction = Direction::Both;
};

/// Sampling at t = k * period for integer k.
struct ScheduledEvent {
    double period = 1.0;
};

using Event = std::variant<CrossingEvent, ScheduledEvent>;

CrossingEvent velocity_zero(Direction direction);
ScheduledEvent stroboscopic(double omega);

struct EventRun {
    Trajectory trajectory;
    std::vector<State> events;
};

EventRun integrate_with_events(const SystemSpec& spec, const State& initial, const IntegratorConfig& cfg,
                               const Event& event);

// ---------------------------------------------------------------------------
// Stepping engine, shared with the Lyapunov estimators
// ---------------------------------------------------------------------------

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int N, typename Rhs>
Vec<N> rk4_step(const Rhs& f, double t, const Vec<N>& y, double h) {
    const Vec<N> k1 = f(t, y);
    const Vec<N> k2 = f(t + h / 2, (y + h / 2 * k1).eval());
    const Vec<N> k3 = f(t + h / 2, (y + h / 2 * k2).eval());
    const Vec<N> k4 = f(t + h, (y + h * k3).eval());
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

template <int N>
struct EmbeddedStep {
    Vec<N> y;    // fifth-order solution
    Vec<N> err;  // difference to the fourth-order solution
};

/// One Fehlberg 4(5) step; propagates the fifth-order solution.
template <int N, typename Rhs>
EmbeddedStep<N> rkf45_step(const Rhs& f, double t, const Vec<N>& y, double h) {
    const Vec<N> k1 = h * f(t, y);
    const Vec<N> k2 = h * f(t + h / 4, (y + k1 / 4).eval());
    const Vec<N> k3 = h * f(t + 3 * h / 8, (y + 3.0 / 32 * k1 + 9.0 / 32 * k2).eval());
    const Vec<N> k4 =
        h * f(t + 12 * h / 13, (y + 1932.0 / 2197 * k1 - 7200.0 / 2197 * k2 + 7296.0 / 2197 * k3).eval());
    const Vec<N> k5 =
        h * f(t + h, (y + 439.0 / 216 * k1 - 8 * k2 + 3680.0 / 513 * k3 - 845.0 / 4104 * k4).eval());
    const Vec<N> k6 = h * f(t + h / 2, (y - 8.0 / 27 * k1 + 2 * k2 - 3544.0 / 2565 * k3 + 1859.0 / 4104 * k4 -
                                        11.0 / 40 * k5)
                                           .eval());
    const Vec<N> y4 = y + 25.0 / 216 * k1 + 1408.0 / 2565 * k3 + 2197.0 / 4104 * k4 - k5 / 5;
    const Vec<N> y5 = y + 16.0 / 135 * k1 + 6656.0 / 12825 * k3 + 28561.0 / 56430 * k4 - 9.0 / 50 * k5 + 2.0 / 55 * k6;
    return {y5, y5 - y4};
}

/// Advances an N-dimensional system in segments while keeping the adaptive
/// step size between calls. Fixed-step RK4 lands on t_start + k*dt and clips
/// the final step onto the target.
template <int N>
class Marcher {
public:
    explicit Marcher(const IntegratorConfig& cfg) : cfg_(cfg), h_(cfg.dt) {}

    /// Single step of the configured method, used to localize events.
    template <typename Rhs>
    Vec<N> step_exact(const Rhs& f, double t, const Vec<N>& y, double h) const {
        if (h == 0.0) return y;
        if (cfg_.method == Method::RK4) return rk4_step<N>(f, t, y, h);
        return rkf45_step<N>(f, t, y, h).y;
    }

    /// `bounded(y)` false stops with Diverged; `on_step(t0, y0, t1, y1)` runs
    /// after every accepted step.
    template <typename Rhs, typename Bounded, typename OnStep>
    RunStatus advance(const Rhs& f, double& t, Vec<N>& y, double t_target, const Bounded& bounded,
                      OnStep&& on_step) {
        try {
            return cfg_.method == Method::RK4 ? advance_fixed(f, t, y, t_target, bounded, on_step)
                                              : advance_adaptive(f, t, y, t_target, bounded, on_step);
        } catch (const NonFinite&) {
            return {RunStatus::Kind::Diverged, t};
        }
    }

private:
    template <typename Rhs, typename Bounded, typename OnStep>
    RunStatus advance_fixed(const Rhs& f, double& t, Vec<N>& y, double t_target, const Bounded& bounded,
                            OnStep& on_step) {
        const double t_start = t;
        const double span = t_target - t_start;
        if (span <= 0) return {RunStatus::Kind::Completed, t};
        const auto steps = static_cast<long long>(std::ceil(span / cfg_.dt - 1e-9));
        for (long long k = 1; k <= steps; ++k) {
            const double t_next = k == steps ? t_target : t_start + static_cast<double>(k) * cfg_.dt;
            Vec<N> y_next = rk4_step<N>(f, t, y, t_next - t);
            if (!bounded(y_next)) return {RunStatus::Kind::Diverged, t_next};
            on_step(t, y, t_next, y_next);
            t = t_next;
            y = y_next;
        }
        return {RunStatus::Kind::Completed, t};
    }

    template <typename Rhs, typename Bounded, typename OnStep>
    RunStatus advance_adaptive(const Rhs& f, double& t, Vec<N>& y, double t_target, const Bounded& bounded,
                               OnStep& on_step) {
        const double h_min = 1e-12 * cfg_.dt;
        while (t < t_target) {
            const bool last = t + h_ >= t_target;
            const double h = last ? t_target - t : h_;
            const auto trial = rkf45_step<N>(f, t, y, h);
            double err = 0.0;
            for (int i = 0; i < N; ++i) {
                const double scale = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y(i)), std::abs(trial.y(i)));
                err = std::max(err, std::abs(trial.err(i)) / scale);
            }
            if (!std::isfinite(err)) err = 1e10;
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                const double t_next = last ? t_target : t + h;
                if (!bounded(trial.y)) return {RunStatus::Kind::Diverged, t_next};
                on_step(t, y, t_next, trial.y);
                t = t_next;
                y = trial.y;
                if (!last) h_ = std::max(h * factor, h_min);
            } else {
                h_ = h * factor;
                if (h_ < h_min) return {RunStatus::Kind::StepFailure, t};
            }
        }
        return {RunStatus::Kind::Completed, t};
    }

    IntegratorConfig cfg_;
    double h_;
};

/// (x, v) right-hand side of a SystemSpec.
inline auto state_rhs(const SystemSpec& spec) {
    return [&spec](double t, const Vec<2>& y) -> Vec<2> { return {y(1), accel<double>(spec, t, y(0), y(1))}; };
}

inline bool within(const Vec<2>& xv, double threshold) {
    return std::isfinite(xv(0)) && std::isfinite(xv(1)) && std::abs(xv(0)) <= threshold &&
           std::abs(xv(1)) <= threshold;
}

}  // namespace tikhochaos

#include "tikhochaos/integrate.hpp"

#include <numbers>

namespace tikhochaos {

std::string_view to_string(Method method) { return method == Method::RK4 ? "rk4" : "rkf45"; }

Method method_from_string(std::string_view name) {
    if (name == "rk4" || name == "RK4") return Method::RK4;
    if (name == "rkf45" || name == "RKF45") return Method::RKF45;
    throw std::invalid_argument("unknown integration method: " + std::string(name));
}

std::string_view to_string(RunStatus::Kind kind) {
    switch (kind) {
    case RunStatus::Kind::Completed: return "completed";
    case RunStatus::Kind::Diverged: return "diverged";
    case RunStatus::Kind::StepFailure: return "step_failure";
    }
    return "?";
}

std::vector<std::string> violations(const IntegratorConfig& cfg, double t0) {
    std::vector<std::string> out;
    if (!(cfg.dt > 0)) out.push_back("dt must be > 0");
    if (!(cfg.t_end > t0)) out.push_back("t_end must be > t0");
    else if (!(cfg.dt < cfg.t_end - t0)) out.push_back("dt must be smaller than t_end - t0");
    if (cfg.method == Method::RKF45 && !(cfg.abs_tol > 0 && cfg.rel_tol > 0))
        out.push_back("abs_tol and rel_tol must be > 0");
    if (cfg.sample_every < 1) out.push_back("sample_every must be >= 1");
    if (!(cfg.blowup_threshold > 0)) out.push_back("blowup_threshold must be > 0");
    return out;
}

void validate(const IntegratorConfig& cfg, double t0) {
    auto v = violations(cfg, t0);
    if (!v.empty()) throw ValidationError(std::move(v));
}

namespace {

State to_state(double t, const Vec<2>& y) { return {t, y(0), y(1)}; }

struct Recorder {
    Trajectory& out;
    int every;
    long long count = 0;

    void operator()(double, const Vec<2>&, double t1, const Vec<2>& y1) {
        if (++count % every == 0) out.samples.push_back(to_state(t1, y1));
    }

    void finish(double t_end, const Vec<2>& y_end) {
        if (out.samples.back().t < t_end) out.samples.push_back(to_state(t_end, y_end));
    }
};

bool crosses(double before, double after, Direction direction) {
    const bool rising = before < 0 && after >= 0;
    const bool falling = before > 0 && after <= 0;
    switch (direction) {
    case Direction::Rising: return rising;
    case Direction::Falling: return falling;
    case Direction::Both: return rising || falling;
    }
    return false;
}

}  // namespace

Trajectory integrate(const SystemSpec& spec, const State& initial, const IntegratorConfig& cfg) {
    validate(cfg, initial.t);
    Trajectory out{spec, {initial}, {RunStatus::Kind::Completed, cfg.t_end}};
    Vec<2> y = initial.xv();
    if (!within(y, cfg.blowup_threshold)) {
        out.status = {RunStatus::Kind::Diverged, initial.t};
        return out;
    }
    const auto rhs = state_rhs(spec);
    Marcher<2> marcher(cfg);
    Recorder recorder{out, cfg.sample_every};
    double t = initial.t;
    out.status = marcher.advance(
        rhs, t, y, cfg.t_end, [&](const Vec<2>& z) { return within(z, cfg.blowup_threshold); }, recorder);
    if (out.status.ok()) recorder.finish(cfg.t_end, y);
    return out;
}

CrossingEvent velocity_zero(Direction direction) {
    return {[](const State& s) { return s.v; }, direction};
}

ScheduledEvent stroboscopic(double omega) { return {2 * std::numbers::pi / omega}; }

EventRun integrate_with_events(const SystemSpec& spec, const State& initial, const IntegratorConfig& cfg,
                               const Event& event) {
    validate(cfg, initial.t);
    EventRun run{{spec, {initial}, {RunStatus::Kind::Completed, cfg.t_end}}, {}};
    Trajectory& out = run.trajectory;
    Vec<2> y = initial.xv();
    if (!within(y, cfg.blowup_threshold)) {
        out.status = {RunStatus::Kind::Diverged, initial.t};
        return run;
    }

    const auto rhs = state_rhs(spec);
    Marcher<2> marcher(cfg);
    Recorder recorder{out, cfg.sample_every};
    auto state_at = [&](double t0, const Vec<2>& y0, double t) { return to_state(t, marcher.step_exact(rhs, t0, y0, t - t0)); };

    std::function<void(double, const Vec<2>&, double, const Vec<2>&)> detect;
    if (const auto* sched = std::get_if<ScheduledEvent>(&event)) {
        if (!(sched->period > 0)) throw std::invalid_argument("stroboscopic period must be > 0");
        // next sampling index k with k * period >= t0
        auto next = static_cast<long long>(std::ceil(initial.t / sched->period - 1e-12));
        if (static_cast<double>(next) * sched->period <= initial.t) {
            run.events.push_back(initial);
            ++next;
        }
        detect = [&, period = sched->period, next](double t0, const Vec<2>& y0, double t1, const Vec<2>&) mutable {
            for (double te = static_cast<double>(next) * period; te <= t1; te = static_cast<double>(next) * period) {
                if (te > t0) run.events.push_back(state_at(t0, y0, te));
                ++next;
            }
        };
    } else {
        const auto& crossing = std::get<CrossingEvent>(event);
        detect = [&](double t0, const Vec<2>& y0, double t1, const Vec<2>& y1) {
            const double g0 = crossing.function(to_state(t0, y0));
            const double g1 = crossing.function(to_state(t1, y1));
            if (!crosses(g0, g1, crossing.direction)) return;
            // linear interpolation, then one secant step against the
            // bracket end on the opposite side of the root
            double tc = g1 == g0 ? t1 : t0 + (t1 - t0) * g0 / (g0 - g1);
            const double gc = crossing.function(state_at(t0, y0, tc));
            const bool left = (gc > 0) != (g0 > 0);
            const double ta = left ? t0 : t1;
            const double ga = left ? g0 : g1;
            if (gc != ga) tc = std::clamp(tc - gc * (tc - ta) / (gc - ga), t0, t1);
            State hit = state_at(t0, y0, tc);
            if (run.events.empty() || hit.t > run.events.back().t) run.events.push_back(hit);
        };
    }

    double t = initial.t;
    out.status = marcher.advance(
        rhs, t, y, cfg.t_end, [&](const Vec<2>& z) { return within(z, cfg.blowup_threshold); },
        [&](double t0, const Vec<2>& y0, double t1, const Vec<2>& y1) {
            detect(t0, y0, t1, y1);
            recorder(t0, y0, t1, y1);
        });
    if (out.status.ok()) recorder.finish(cfg.t_end, y);
    return run;
}

}  // namespace tikhochaos

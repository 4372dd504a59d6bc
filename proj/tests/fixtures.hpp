// Shared specs and closed-form oracles for the test binaries.
#pragma once

#include "tikhochaos/tikhochaos.hpp"

#include <cmath>

namespace fixtures {

using namespace tikhochaos;

inline SystemSpec linear_b(double alpha, double beta) {
    SystemSpec s;
    s.form = SystemForm::B;
    s.params.alpha = alpha;
    s.params.beta = beta;
    return s;
}

// x'' + a x' + b x = 0 from x(0)=x0, v(0)=0, underdamped.
inline double damped_x(double a, double b, double x0, double t) {
    const double wd = std::sqrt(b - a * a / 4);
    return x0 * std::exp(-a * t / 2) * (std::cos(wd * t) + a / (2 * wd) * std::sin(wd * t));
}

// Bounded chaotic window of form B with a cubic forcing term, found by a
// coarse random search: lambda goes from about -0.17 (gamma <= 2.94) to
// +0.16 (gamma = 3.0) and the orbit escapes past gamma ~ 3.02.
inline SystemSpec cubic_family(double gamma) {
    SystemSpec s;
    s.form = SystemForm::B;
    s.params = {.alpha = 0.34, .beta = 1.3, .gamma = gamma, .delta = 1.0, .omega = 9.3, .q = 0, .p = 0, .n = 3};
    s.epsilon = EpsilonConstant{3.2};
    return s;
}

inline IntegratorConfig long_run(double t_end = 4000.0) {
    IntegratorConfig cfg;
    cfg.dt = 0.005;
    cfg.t_end = t_end;
    cfg.sample_every = 1000;
    return cfg;
}

}  // namespace fixtures

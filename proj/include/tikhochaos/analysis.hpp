// Diagnostics along trajectories: Lyapunov-function traces, linearized
// eigenvalues with Hopf crossings, and the largest Lyapunov exponent.
#pragma once

#include "tikhochaos/integrate.hpp"

#include <Eigen/Core>

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace tikhochaos {

// ---------------------------------------------------------------------------
// Energy-like quantities
// ---------------------------------------------------------------------------

/// Per-sample series:
///   V            = (v^2 + x^2) / 2
///   V_dot_exact  = v * (x'' + x), x'' from the right-hand side
///   V_dot_paper  = -(a/t^q) v^2 - eps x^2 - d sin(w x) v   (A1/A2)
///                = -a v^2 - c f v, f = d sin(w t) x^n      (B)
///   V_reg        = v^2/2 + b x^2/2 + integral of eps from t0
///   E            = (g(x) + coupling(t) v)/2 - min g + eps x^2/2 + v^2/2
struct EnergyTrace {
    std::vector<double> t;
    std::vector<double> V;
    std::vector<double> V_dot_exact;
    std::vector<double> V_dot_paper;
    std::vector<double> V_reg;
    std::vector<double> E;

    std::size_t size() const { return t.size(); }
};

/// Requires a completed trajectory.
EnergyTrace energy_trace(const Trajectory& traj);

// ---------------------------------------------------------------------------
// Linearization about the origin
// ---------------------------------------------------------------------------

struct EigenReport {
    double alpha_eff = 0.0;
    double beta_eff = 0.0;
    Eigen::Matrix2d matrix;
    std::array<std::complex<double>, 2> eigenvalues;
    double max_real_part = 0.0;
};

/// Companion matrix [[0, 1], [-beta_eff, -alpha_eff]] and its eigenvalues.
EigenReport companion_eigen(double alpha_eff, double beta_eff);

/// Form B uses (alpha, beta) directly. Forms A1/A2 read the effective
/// coefficients off the gradient of x'' at the origin, frozen at `at_time`
/// (default t0).
EigenReport linearized_eigen(const SystemSpec& spec, std::optional<double> at_time = std::nullopt);

struct ScanAxis {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    int steps = 2;
};

/// Inclusive, uniformly spaced grid. A degenerate range yields one value.
std::vector<double> axis_grid(const ScanAxis& axis);

struct HopfCrossing {
    double value = 0.0;
    /// True when the max real part goes from negative to positive with the axis.
    bool destabilizing = false;
};

/// Sign changes of max_real_part along the axis, each refined by bisection
/// to `resolution`. Coefficient signs are not validated (scan mode).
std::vector<HopfCrossing> hopf_scan(const SystemSpec& tmpl, const ScanAxis& axis,
                                    std::optional<double> at_time = std::nullopt, double resolution = 1e-6);

// ---------------------------------------------------------------------------
// Largest Lyapunov exponent
// ---------------------------------------------------------------------------

enum class Estimator { TwoTrajectory, Variational };

std::string_view to_string(Estimator e);
Estimator estimator_from_string(std::string_view name);

struct LyapunovOptions {
    /// Initial separation of the companion trajectory (two-trajectory only).
    double d0 = 1e-8;
    /// Renormalization interval in units of cfg.dt.
    int renorm_steps = 100;
    /// Fraction of [t0, t_end] discarded before accumulating.
    double transient_fraction = 0.1;
};

struct LyapunovEstimate {
    double lambda = 0.0;
    Estimator method = Estimator::Variational;
    /// Running estimate after each accumulated renormalization epoch.
    std::vector<double> convergence;
    double transient_skipped = 0.0;
};

/// The reference run left the blowup threshold or the adaptive step collapsed.
struct IntegrationFailure : std::runtime_error {
    explicit IntegrationFailure(RunStatus status);
    RunStatus status;
};

struct DegenerateSeparation : std::runtime_error {
    explicit DegenerateSeparation(double t);
};

/// Benettin procedure: a companion offset by d0 in x, rescaled back to d0
/// along the current difference after every epoch.
LyapunovEstimate lyapunov_two_trajectory(const SystemSpec& spec, const State& initial, const IntegratorConfig& cfg,
                                         const LyapunovOptions& opts = {});

/// Tangent vector evolved with the gradient of x'', renormalized to unit norm.
LyapunovEstimate lyapunov_variational(const SystemSpec& spec, const State& initial, const IntegratorConfig& cfg,
                                      const LyapunovOptions& opts = {});

LyapunovEstimate lyapunov(Estimator estimator, const SystemSpec& spec, const State& initial,
                          const IntegratorConfig& cfg, const LyapunovOptions& opts = {});

}  // namespace tikhochaos

// Parameter-space exploration: Poincare sections, bifurcation diagrams,
// Lyapunov-exponent maps and bisection of the stability/chaos boundary.
#pragma once

#include "tikhochaos/analysis.hpp"

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace tikhochaos {

/// Chaos is reported above +threshold, stability below -threshold.
inline constexpr double kRegimeThreshold = 0.01;
/// Minimum |lambda| at bisection endpoints.
inline constexpr double kNoiseFloor = 0.02;
/// Single-linkage radius for counting distinct section clusters.
inline constexpr double kClusterRadius = 1e-2;

enum class Regime { Stable, Chaotic, Indeterminate, Diverged };

std::string_view to_string(Regime r);
Regime classify(double lambda);

// ---------------------------------------------------------------------------
// Poincare sections
// ---------------------------------------------------------------------------

enum class SectionKind { Stroboscopic, VelocityZeroCrossing };

struct SectionSpec {
    SectionKind kind = SectionKind::Stroboscopic;
    /// Crossing direction of v through zero; ignored for stroboscopic sections.
    Direction direction = Direction::Falling;
};

std::string_view to_string(SectionKind k);
SectionKind section_kind_from_string(std::string_view name);

struct SectionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PoincareSection {
    SystemSpec spec;
    SectionSpec section;
    /// Forcing period 2*pi/omega for stroboscopic sections.
    double period = 0.0;
    /// Post-transient hits in event-time order.
    std::vector<State> hits;
    RunStatus status;

    /// (x, v) for stroboscopic sections, (t, x) for crossings.
    std::vector<Eigen::Vector2d> points() const;
    /// Coordinates used for clustering: (x, v) in both cases.
    std::vector<Eigen::Vector2d> section_coordinates() const;
};

PoincareSection poincare(const SystemSpec& spec, const State& initial, const IntegratorConfig& cfg,
                         const SectionSpec& section, double transient_fraction);

/// Number of single-linkage clusters at `radius`.
std::size_t count_clusters(std::span<const Eigen::Vector2d> points, double radius = kClusterRadius);

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepOptions {
    /// Worker threads; 0 uses worker_count().
    int threads = 0;
    /// Execution order of cells (a permutation); empty for natural order.
    std::vector<std::size_t> order;
};

struct BifurcationCell {
    double value = 0.0;
    std::vector<double> x;
    RunStatus status;
};

struct BifurcationDiagram {
    std::string parameter;
    std::vector<BifurcationCell> cells;
};

BifurcationDiagram bifurcation_sweep(const SystemSpec& tmpl, const ScanAxis& axis, const State& initial,
                                     const IntegratorConfig& cfg, const SectionSpec& section,
                                     double transient_fraction, const SweepOptions& sweep = {});

struct LambdaMap {
    ScanAxis axis1;
    ScanAxis axis2;
    std::vector<double> values1;
    std::vector<double> values2;
    /// rows follow axis1, columns axis2; diverged cells hold +inf.
    Eigen::MatrixXd lambda;
    std::vector<Regime> regimes;  // row-major

    Regime regime(Eigen::Index i, Eigen::Index j) const { return regimes[i * values2.size() + j]; }
};

LambdaMap lambda_map(const SystemSpec& tmpl, const ScanAxis& axis1, const ScanAxis& axis2, const State& initial,
                     const IntegratorConfig& cfg, Estimator estimator, const LyapunovOptions& opts = {},
                     const SweepOptions& sweep = {});

// ---------------------------------------------------------------------------
// Critical boundary
// ---------------------------------------------------------------------------

struct Probe {
    double value = 0.0;
    /// +inf for a diverged probe.
    double lambda = 0.0;
};

struct CriticalSet {
    std::string axis;
    Estimator estimator = Estimator::Variational;
    double boundary = 0.0;
    Probe lo;
    Probe hi;
    double tolerance = 0.0;
    /// Every evaluation in the order performed, endpoints first.
    std::vector<Probe> probes;

    /// Opposite signs at the stored bracket and width within tolerance.
    bool bracket_holds(double requested_tol) const;
};

struct NoBracket : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Indeterminate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bisection on sign(lambda) between lo and hi. Divergent probes count as
/// positive. Coefficient signs are not validated (scan mode).
CriticalSet critical_bisect(const SystemSpec& tmpl, const std::string& axis, double lo, double hi, double tol,
                            const State& initial, const IntegratorConfig& cfg, Estimator estimator,
                            const LyapunovOptions& opts = {});

}  // namespace tikhochaos

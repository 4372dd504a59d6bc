#include "tikhochaos/chaoscan.hpp"

#include "tikhochaos/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

namespace tikhochaos {

std::string_view to_string(Regime r) {
    switch (r) {
    case Regime::Stable: return "stable";
    case Regime::Chaotic: return "chaotic";
    case Regime::Indeterminate: return "indeterminate";
    case Regime::Diverged: return "diverged";
    }
    return "?";
}

Regime classify(double lambda) {
    if (std::isinf(lambda) && lambda > 0) return Regime::Diverged;
    if (lambda > kRegimeThreshold) return Regime::Chaotic;
    if (lambda < -kRegimeThreshold) return Regime::Stable;
    return Regime::Indeterminate;
}

std::string_view to_string(SectionKind k) {
    return k == SectionKind::Stroboscopic ? "stroboscopic" : "velocity_zero";
}

SectionKind section_kind_from_string(std::string_view name) {
    if (name == "stroboscopic" || name == "strobe") return SectionKind::Stroboscopic;
    if (name == "velocity_zero" || name == "vzero") return SectionKind::VelocityZeroCrossing;
    throw std::invalid_argument("unknown section kind: " + std::string(name));
}

std::vector<Eigen::Vector2d> PoincareSection::points() const {
    std::vector<Eigen::Vector2d> out;
    out.reserve(hits.size());
    for (const State& s : hits)
        out.emplace_back(section.kind == SectionKind::Stroboscopic ? Eigen::Vector2d(s.x, s.v)
                                                                   : Eigen::Vector2d(s.t, s.x));
    return out;
}

std::vector<Eigen::Vector2d> PoincareSection::section_coordinates() const {
    std::vector<Eigen::Vector2d> out;
    out.reserve(hits.size());
    for (const State& s : hits) out.emplace_back(s.x, s.v);
    return out;
}

PoincareSection poincare(const SystemSpec& spec, const State& initial, const IntegratorConfig& cfg,
                         const SectionSpec& section, double transient_fraction) {
    if (!(transient_fraction >= 0 && transient_fraction < 1))
        throw std::invalid_argument("transient_fraction must lie in [0, 1)");
    PoincareSection out{spec, section, 0.0, {}, {}};
    Event event;
    if (section.kind == SectionKind::Stroboscopic) {
        if (spec.form != SystemForm::B || spec.params.delta == 0.0)
            throw SectionMismatch("stroboscopic sections need form B with delta != 0");
        const auto strobe = stroboscopic(spec.params.omega);
        out.period = strobe.period;
        event = strobe;
    } else {
        event = velocity_zero(section.direction);
    }

    IntegratorConfig quiet = cfg;
    quiet.sample_every = std::numeric_limits<int>::max();
    EventRun run = integrate_with_events(spec, initial, quiet, event);
    out.status = run.trajectory.status;
    const double cutoff = initial.t + transient_fraction * (cfg.t_end - initial.t);
    for (const State& s : run.events)
        if (s.t >= cutoff) out.hits.push_back(s);
    return out;
}

std::size_t count_clusters(std::span<const Eigen::Vector2d> points, double radius) {
    const std::size_t n = points.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };

    // bucket by grid cells of side `radius`; neighbors lie in the 3x3 block
    auto key = [](long long a, long long b) { return (static_cast<unsigned long long>(a) << 32) ^ static_cast<unsigned long long>(b & 0xffffffff); };
    std::unordered_map<unsigned long long, std::vector<std::size_t>> buckets;
    std::vector<std::pair<long long, long long>> cell(n);
    for (std::size_t i = 0; i < n; ++i) {
        cell[i] = {static_cast<long long>(std::floor(points[i].x() / radius)),
                   static_cast<long long>(std::floor(points[i].y() / radius))};
        buckets[key(cell[i].first, cell[i].second)].push_back(i);
    }
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < n; ++i) {
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                const auto it = buckets.find(key(cell[i].first + dx, cell[i].second + dy));
                if (it == buckets.end()) continue;
                for (std::size_t j : it->second) {
                    if (j <= i || (points[i] - points[j]).squaredNorm() > r2) continue;
                    parent[find(i)] = find(j);
                }
            }
        }
    }
    std::size_t clusters = 0;
    for (std::size_t i = 0; i < n; ++i) clusters += find(i) == i;
    return clusters;
}

BifurcationDiagram bifurcation_sweep(const SystemSpec& tmpl, const ScanAxis& axis, const State& initial,
                                     const IntegratorConfig& cfg, const SectionSpec& section,
                                     double transient_fraction, const SweepOptions& sweep) {
    check_axis(axis.name);
    const auto values = axis_grid(axis);
    BifurcationDiagram out{axis.name, std::vector<BifurcationCell>(values.size())};
    parallel_for(
        values.size(),
        [&](std::size_t i) {
            const PoincareSection ps =
                poincare(with_param(tmpl, axis.name, values[i]), initial, cfg, section, transient_fraction);
            BifurcationCell& c = out.cells[i];
            c.value = values[i];
            c.status = ps.status;
            if (ps.status.ok())
                for (const State& s : ps.hits) c.x.push_back(s.x);
        },
        sweep.order, sweep.threads);
    return out;
}

LambdaMap lambda_map(const SystemSpec& tmpl, const ScanAxis& axis1, const ScanAxis& axis2, const State& initial,
                     const IntegratorConfig& cfg, Estimator estimator, const LyapunovOptions& opts,
                     const SweepOptions& sweep) {
    check_axis(axis1.name);
    check_axis(axis2.name);
    if (axis1.name == axis2.name) throw std::invalid_argument("lambda map needs two distinct axes");
    LambdaMap out{axis1, axis2, axis_grid(axis1), axis_grid(axis2), {}, {}};
    const auto rows = static_cast<Eigen::Index>(out.values1.size());
    const auto cols = static_cast<Eigen::Index>(out.values2.size());
    out.lambda.resize(rows, cols);
    out.regimes.resize(static_cast<std::size_t>(rows * cols));
    parallel_for(
        out.regimes.size(),
        [&](std::size_t cell) {
            const auto i = static_cast<Eigen::Index>(cell) / cols;
            const auto j = static_cast<Eigen::Index>(cell) % cols;
            const SystemSpec spec = with_param(with_param(tmpl, axis1.name, out.values1[i]), axis2.name, out.values2[j]);
            double lambda = std::numeric_limits<double>::infinity();
            try {
                lambda = lyapunov(estimator, spec, initial, cfg, opts).lambda;
            } catch (const IntegrationFailure&) {
            }
            out.lambda(i, j) = lambda;
            out.regimes[cell] = classify(lambda);
        },
        sweep.order, sweep.threads);
    return out;
}

bool CriticalSet::bracket_holds(double requested_tol) const {
    return (lo.lambda > 0) != (hi.lambda > 0) && std::abs(hi.value - lo.value) <= requested_tol;
}

CriticalSet critical_bisect(const SystemSpec& tmpl, const std::string& axis, double lo, double hi, double tol,
                            const State& initial, const IntegratorConfig& cfg, Estimator estimator,
                            const LyapunovOptions& opts) {
    check_axis(axis);
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be > 0");
    if (!(hi > lo)) throw std::invalid_argument("critical_bisect needs lo < hi");
    validate(with_param(tmpl, axis, lo), ValidationMode::Scan);
    validate(with_param(tmpl, axis, hi), ValidationMode::Scan);

    CriticalSet out;
    out.axis = axis;
    out.estimator = estimator;
    auto probe = [&](double value) {
        double lambda = std::numeric_limits<double>::infinity();
        try {
            lambda = lyapunov(estimator, with_param(tmpl, axis, value), initial, cfg, opts).lambda;
        } catch (const IntegrationFailure&) {
        }
        out.probes.push_back({value, lambda});
        return out.probes.back();
    };

    Probe a = probe(lo);
    Probe b = probe(hi);
    for (const Probe& end : {a, b})
        if (std::abs(end.lambda) <= kNoiseFloor)
            throw Indeterminate("|lambda| = " + std::to_string(std::abs(end.lambda)) + " at " + axis + " = " +
                                std::to_string(end.value) + " is within the noise floor");
    if ((a.lambda > 0) == (b.lambda > 0)) throw NoBracket("lambda has the same sign at both ends of " + axis);

    while (b.value - a.value > tol) {
        const Probe mid = probe(a.value + (b.value - a.value) / 2);
        ((mid.lambda > 0) == (a.lambda > 0) ? a : b) = mid;
    }
    out.lo = a;
    out.hi = b;
    out.boundary = a.value + (b.value - a.value) / 2;
    out.tolerance = b.value - a.value;
    return out;
}

}  // namespace tikhochaos

#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>

using namespace tikhochaos;
using fixtures::linear_b;

namespace {

constexpr double kPi = std::numbers::pi;

IntegratorConfig grid(double dt, double t_end) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    return cfg;
}

SystemSpec forced_linear(double alpha, double omega) {
    SystemSpec s = linear_b(alpha, 1);
    s.params.gamma = 1;
    s.params.delta = 1;
    s.params.omega = omega;
    s.params.n = 1;
    return s;
}

std::size_t clusters_of(const PoincareSection& ps) {
    const auto pts = ps.section_coordinates();
    return count_clusters(pts);
}

std::string diagram_bytes(const BifurcationDiagram& d) {
    std::ostringstream os;
    write_bifurcation_csv(os, d, json::object());
    return os.str();
}

}  // namespace

TEST_CASE("regime classification") {
    CHECK(classify(0.2) == Regime::Chaotic);
    CHECK(classify(-0.2) == Regime::Stable);
    CHECK(classify(0.005) == Regime::Indeterminate);
    CHECK(classify(std::numeric_limits<double>::infinity()) == Regime::Diverged);
}

TEST_CASE("single-linkage cluster counting") {
    std::vector<Eigen::Vector2d> pts;
    CHECK(count_clusters(pts) == 0);
    // a chain with 0.009 spacing is one cluster; 0.011 spacing is not
    for (int i = 0; i < 50; ++i) pts.emplace_back(0.009 * i, 0);
    CHECK(count_clusters(pts) == 1);
    for (int i = 0; i < 10; ++i) pts.emplace_back(5 + 0.011 * i, -3);
    CHECK(count_clusters(pts) == 11);
    pts.emplace_back(-1e-3, 0);
    CHECK(count_clusters(pts) == 11);

    // brute-force oracle on random clouds
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Eigen::Vector2d> cloud(150);
        for (auto& p : cloud) p = {u(rng), u(rng)};
        std::vector<int> label(cloud.size());
        std::iota(label.begin(), label.end(), 0);
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t i = 0; i < cloud.size(); ++i)
                for (std::size_t j = 0; j < cloud.size(); ++j)
                    if ((cloud[i] - cloud[j]).norm() <= 0.02 && label[j] < label[i]) {
                        label[i] = label[j];
                        changed = true;
                    }
        }
        std::sort(label.begin(), label.end());
        const auto distinct = static_cast<std::size_t>(std::unique(label.begin(), label.end()) - label.begin());
        CHECK(count_clusters(cloud, 0.02) == distinct);
    }
}

TEST_CASE("stroboscopic section of a damped sink") {
    const PoincareSection ps = poincare(forced_linear(0.5, 1.3), State{0, 1, 0}, grid(1e-2, 400),
                                        {SectionKind::Stroboscopic}, 0.5);
    REQUIRE(ps.status.ok());
    REQUIRE(!ps.hits.empty());
    // gamma*delta*sin(wt)*x with n=1 is a parametric term; the origin stays a sink
    for (const auto& p : ps.points()) CHECK(p.norm() < 1e-3);
    CHECK(clusters_of(ps) == 1);
}

TEST_CASE("undamped oscillator strobed at an incommensurate period fills a circle") {
    SystemSpec s = linear_b(0, 1);
    s.params.delta = 1;
    s.params.omega = std::numbers::sqrt2;  // gamma = 0 keeps the dynamics unforced
    const PoincareSection ps = poincare(s, State{0, 1, 0}, grid(1e-3, 500), {SectionKind::Stroboscopic}, 0.1);
    REQUIRE(ps.status.ok());
    for (const auto& p : ps.points()) CHECK(0.5 * p.squaredNorm() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(clusters_of(ps) >= 50);
}

TEST_CASE("stroboscopic hit count") {
    for (double omega : {0.7, 1.0, 2.5, 9.3}) {
        for (double transient : {0.0, 0.1, 0.35}) {
            const double t_end = 123.4;
            const PoincareSection ps =
                poincare(forced_linear(0.5, omega), State{0, 1, 0}, grid(1e-2, t_end), {SectionKind::Stroboscopic}, transient);
            const double expected = std::floor((1 - transient) * t_end * omega / (2 * kPi));
            CHECK(std::abs(static_cast<double>(ps.hits.size()) - expected) <= 1);
            CHECK(ps.period == doctest::Approx(2 * kPi / omega));
        }
    }
}

TEST_CASE("section kinds and forms") {
    SystemSpec a;
    a.form = SystemForm::A2;
    a.t0 = 1;
    a.params.alpha = 0.3;
    a.params.delta = 1;
    a.nonlinearity = GLinear{1};
    CHECK_THROWS_AS(poincare(a, State{1, 1, 0}, grid(1e-2, 10), {SectionKind::Stroboscopic}, 0), SectionMismatch);
    CHECK_THROWS_AS(poincare(linear_b(0.5, 1), State{0, 1, 0}, grid(1e-2, 10), {SectionKind::Stroboscopic}, 0),
                    SectionMismatch);

    const PoincareSection ps =
        poincare(a, State{1, 1, 0}, grid(1e-2, 40), {SectionKind::VelocityZeroCrossing, Direction::Falling}, 0);
    REQUIRE(ps.hits.size() >= 3);
    for (std::size_t i = 0; i < ps.hits.size(); ++i) {
        CHECK(std::abs(ps.hits[i].v) < 1e-6);
        CHECK(ps.points()[i].x() == ps.hits[i].t);
    }
}

TEST_CASE("a stable cell of the cubic family collapses to one cluster") {
    const PoincareSection ps = poincare(fixtures::cubic_family(2.8), State{0, 0, 0}, fixtures::long_run(1000),
                                        {SectionKind::Stroboscopic}, 0.1);
    REQUIRE(ps.status.ok());
    CHECK(clusters_of(ps) <= 3);
}

TEST_CASE("contraction toward a sink matches the exponent") {
    // damped linear sink with lambda = -alpha/2, strobed every 2 pi / omega
    const double alpha = 0.3, omega = 2.0;
    SystemSpec s = linear_b(alpha, 1);
    s.params.delta = 1;
    s.params.omega = omega;
    const PoincareSection ps = poincare(s, State{0, 1, 0}, grid(1e-3, 150), {SectionKind::Stroboscopic}, 0.1);
    const double lambda = lyapunov_variational(s, State{0, 1, 0}, grid(1e-3, 150)).lambda;
    REQUIRE(lambda < -0.05);
    const auto pts = ps.points();
    const std::size_t window = 5;
    auto diameter = [&](std::size_t start) {
        double d = 0;
        for (std::size_t i = start; i < start + window; ++i)
            for (std::size_t j = start; j < start + window; ++j) d = std::max(d, (pts[i] - pts[j]).norm());
        return d;
    };
    const double predicted = std::exp(lambda * static_cast<double>(window) * ps.period);
    REQUIRE(pts.size() >= 3 * window);
    for (std::size_t w = 0; w + 2 * window <= pts.size(); w += window) {
        const double ratio = diameter(w + window) / diameter(w);
        CHECK(ratio < 1);
        CHECK(std::abs(ratio / predicted - 1) <= 0.5);
    }
}

TEST_CASE("degenerate bifurcation axis equals a single section") {
    const SystemSpec s = forced_linear(0.2, 1.7);
    const IntegratorConfig cfg = grid(1e-2, 100);
    const BifurcationDiagram d =
        bifurcation_sweep(s, ScanAxis{"delta", 1, 1, 2}, State{0, 1, 0}, cfg, {SectionKind::Stroboscopic}, 0.2);
    REQUIRE(d.cells.size() == 1);
    const PoincareSection ps = poincare(s, State{0, 1, 0}, cfg, {SectionKind::Stroboscopic}, 0.2);
    REQUIRE(d.cells[0].x.size() == ps.hits.size());
    for (std::size_t i = 0; i < ps.hits.size(); ++i) CHECK(d.cells[0].x[i] == ps.hits[i].x);
}

TEST_CASE("damped linear sweep collapses to fixed points") {
    SystemSpec s = linear_b(0.5, 1);
    s.params.delta = 1;
    s.params.omega = 1;
    const BifurcationDiagram d = bifurcation_sweep(s, ScanAxis{"alpha", 0.1, 1, 10}, State{0, 1, 0}, grid(1e-2, 600),
                                                   {SectionKind::Stroboscopic}, 0.5);
    REQUIRE(d.cells.size() == 10);
    for (const auto& c : d.cells) {
        std::vector<Eigen::Vector2d> pts;
        for (double x : c.x) pts.emplace_back(x, 0);
        CHECK(count_clusters(pts) == 1);
    }
}

TEST_CASE("sweeps do not depend on execution order or thread count") {
    const SystemSpec s = fixtures::cubic_family(2.9);
    const ScanAxis axis{"gamma", 2.9, 3.1, 9};
    const IntegratorConfig cfg = fixtures::long_run(300);
    const SectionSpec section{SectionKind::Stroboscopic};
    const auto base = diagram_bytes(bifurcation_sweep(s, axis, State{0, 0, 0}, cfg, section, 0.1, {1, {}}));
    std::vector<std::size_t> order(9);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937 rng(9);
    for (int threads : {2, 4, 8}) {
        std::shuffle(order.begin(), order.end(), rng);
        CHECK(diagram_bytes(bifurcation_sweep(s, axis, State{0, 0, 0}, cfg, section, 0.1, {threads, order})) == base);
    }
    std::reverse(order.begin(), order.end());
    const LambdaMap m1 = lambda_map(s, axis, ScanAxis{"delta", 0.9, 1, 2}, State{0, 0, 0}, cfg, Estimator::Variational,
                                    {}, {1, {}});
    std::vector<std::size_t> cells(18);
    std::iota(cells.rbegin(), cells.rend(), std::size_t{0});
    const LambdaMap m2 = lambda_map(s, axis, ScanAxis{"delta", 0.9, 1, 2}, State{0, 0, 0}, cfg, Estimator::Variational,
                                    {}, {3, cells});
    CHECK(m1.lambda == m2.lambda);
    CHECK(m1.regimes == m2.regimes);
}

TEST_CASE("sweep order must be a permutation") {
    const SystemSpec s = forced_linear(0.2, 1.7);
    CHECK_THROWS_AS(bifurcation_sweep(s, ScanAxis{"delta", 0, 1, 3}, State{0, 1, 0}, grid(1e-2, 10),
                                      {SectionKind::Stroboscopic}, 0.2, {1, {0, 0, 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(bifurcation_sweep(s, ScanAxis{"zeta", 0, 1, 3}, State{0, 1, 0}, grid(1e-2, 10),
                                      {SectionKind::Stroboscopic}, 0.2),
                    InvalidAxis);
}

TEST_CASE("diverged cells are marked, not fatal") {
    const BifurcationDiagram d =
        bifurcation_sweep(fixtures::cubic_family(3.0), ScanAxis{"gamma", 3.0, 4.0, 2}, State{0, 0, 0},
                          fixtures::long_run(1000), {SectionKind::Stroboscopic}, 0.1);
    CHECK(d.cells[0].status.ok());
    CHECK(d.cells[1].status.kind == RunStatus::Kind::Diverged);
    CHECK(d.cells[1].x.empty());
}

TEST_CASE("lambda map of the damped linear family") {
    const LambdaMap m = lambda_map(linear_b(0.5, 1), ScanAxis{"alpha", 0.2, 1, 5}, ScanAxis{"beta", 0.5, 2, 4},
                                   State{0, 1, 0}, grid(1e-2, 200), Estimator::Variational);
    REQUIRE(m.lambda.rows() == 5);
    REQUIRE(m.lambda.cols() == 4);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) {
            CHECK(std::abs(m.lambda(i, j) + m.values1[i] / 2) <= 0.03);
            CHECK(m.regime(i, j) == Regime::Stable);
        }
}

TEST_CASE("1x1 lambda map equals a single estimate") {
    const IntegratorConfig cfg = grid(1e-2, 100);
    const LambdaMap m = lambda_map(linear_b(0.5, 1), ScanAxis{"alpha", 0.4, 0.4, 2}, ScanAxis{"beta", 1.5, 1.5, 2},
                                   State{0, 1, 0}, cfg, Estimator::TwoTrajectory);
    REQUIRE(m.lambda.size() == 1);
    CHECK(m.lambda(0, 0) == lyapunov_two_trajectory(linear_b(0.4, 1.5), State{0, 1, 0}, cfg).lambda);
}

TEST_CASE("transposed lambda map") {
    const IntegratorConfig cfg = grid(1e-2, 100);
    const ScanAxis a{"alpha", 0.2, 0.8, 3}, b{"beta", 0.5, 2, 4};
    const LambdaMap m = lambda_map(linear_b(0.5, 1), a, b, State{0, 1, 0}, cfg, Estimator::Variational);
    const LambdaMap t = lambda_map(linear_b(0.5, 1), b, a, State{0, 1, 0}, cfg, Estimator::Variational);
    CHECK(Eigen::MatrixXd(m.lambda.transpose()) == t.lambda);
    CHECK_THROWS_AS(lambda_map(linear_b(0.5, 1), a, a, State{0, 1, 0}, cfg, Estimator::Variational),
                    std::invalid_argument);
}

TEST_CASE("diverged map cells carry +inf") {
    const LambdaMap m = lambda_map(fixtures::cubic_family(3.0), ScanAxis{"gamma", 2.9, 4, 2}, ScanAxis{"delta", 1, 1, 2},
                                   State{0, 0, 0}, fixtures::long_run(1000), Estimator::Variational);
    CHECK(std::isfinite(m.lambda(0, 0)));
    CHECK(m.lambda(1, 0) == std::numeric_limits<double>::infinity());
    CHECK(m.regime(1, 0) == Regime::Diverged);
}

TEST_CASE("critical damping boundary of the linear family") {
    const double tol = 1e-3;
    for (Estimator e : {Estimator::Variational, Estimator::TwoTrajectory}) {
        const CriticalSet c =
            critical_bisect(linear_b(0, 1), "alpha", -0.5, 0.5, tol, State{0, 1, 0}, grid(1e-2, 200), e);
        CHECK(std::abs(c.boundary) <= tol);
        CHECK(c.bracket_holds(tol));
        CHECK(c.probes.size() >= 2);
        CHECK(c.probes[0].value == -0.5);
        CHECK(c.probes[1].value == 0.5);
        // every stored probe keeps its sign consistent with lambda = -alpha/2
        for (const Probe& p : c.probes)
            if (std::abs(p.value) > 0.05) CHECK((p.lambda > 0) == (p.value < 0));
    }
}

TEST_CASE("critical_bisect errors") {
    const IntegratorConfig cfg = grid(1e-2, 200);
    CHECK_THROWS_AS(critical_bisect(linear_b(0, 1), "alpha", 0.2, 0.8, 1e-2, State{0, 1, 0}, cfg, Estimator::Variational),
                    NoBracket);
    CHECK_THROWS_AS(
        critical_bisect(linear_b(0, 1), "alpha", 0.0, 0.8, 1e-2, State{0, 1, 0}, cfg, Estimator::Variational),
        Indeterminate);
    CHECK_THROWS_AS(critical_bisect(linear_b(0, 1), "zeta", 0, 1, 1e-2, State{0, 1, 0}, cfg, Estimator::Variational),
                    InvalidAxis);
}

TEST_CASE("stored brackets re-check without re-running") {
    CriticalSet c = critical_bisect(linear_b(0, 1), "alpha", -0.4, 0.6, 1e-2, State{0, 1, 0}, grid(1e-2, 100),
                                    Estimator::Variational);
    CHECK(c.bracket_holds(1e-2));
    CHECK(c.tolerance == c.hi.value - c.lo.value);
    CHECK(c.boundary > c.lo.value);
    CHECK(c.boundary < c.hi.value);
    c.hi.lambda = c.lo.lambda;
    CHECK_FALSE(c.bracket_holds(1e-2));
}

TEST_CASE("critical boundary of the cubic family and the section transition") {
    const IntegratorConfig cfg = fixtures::long_run(4000);
    const double tol = 1e-2;
    const CriticalSet v = critical_bisect(fixtures::cubic_family(0), "gamma", 2.8, 3.0, tol, State{0, 0, 0}, cfg,
                                          Estimator::Variational);
    const CriticalSet t = critical_bisect(fixtures::cubic_family(0), "gamma", 2.8, 3.0, tol, State{0, 0, 0}, cfg,
                                          Estimator::TwoTrajectory);
    CHECK(v.bracket_holds(tol));
    CHECK(t.bracket_holds(tol));
    CHECK(std::abs(v.boundary - t.boundary) <= std::max(2 * tol, 0.02 * v.boundary));

    // cluster count jumps from O(1) to many within three cells of the boundary
    const BifurcationDiagram d = bifurcation_sweep(fixtures::cubic_family(0), ScanAxis{"gamma", 2.9, 3.0, 11},
                                                   State{0, 0, 0}, cfg, {SectionKind::Stroboscopic}, 0.1);
    std::vector<std::size_t> counts;
    for (const auto& c : d.cells) {
        PoincareSection ps = poincare(fixtures::cubic_family(c.value), State{0, 0, 0}, cfg, {SectionKind::Stroboscopic}, 0.1);
        counts.push_back(clusters_of(ps));
    }
    const auto below = std::find_if(d.cells.begin(), d.cells.end(), [&](const auto& c) { return c.value >= v.boundary; });
    const auto k = static_cast<std::size_t>(below - d.cells.begin());
    REQUIRE(k > 0);
    REQUIRE(k < d.cells.size());
    CHECK(counts[k - 1] <= 3);
    bool many = false;
    for (std::size_t j = k; j < std::min(k + 3, counts.size()); ++j) many = many || counts[j] > 20;
    CHECK(many);
}

#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include <gasket/errors.hpp>
#include <gasket/feynman_kac.hpp>
#include <gasket/harmonic.hpp>
#include <gasket/pde.hpp>

#include "oracles/brute_force.hpp"

using namespace gasket;

namespace {

std::vector<int> digits(const CellWord& w)
{
    std::vector<int> d;
    for (int i = 0; i < w.length(); ++i) {
        d.push_back(w[i] - 1);
    }
    return d;
}

ProblemSpec quiet_spec(TerminalSpec terminal, double horizon)
{
    ProblemSpec s;
    s.terminal = terminal;
    s.horizon = horizon;
    return s;
}

}  // namespace

TEST_CASE("lumped vertex masses")
{
    for (int m = 0; m <= 3; ++m) {
        const auto g = build_level_graph(m);
        const auto exact = assemble_masses_exact(g);
        std::vector<Rational> mu(g.vertex_count(), Rational(0));
        std::vector<Rational> nu(g.vertex_count(), Rational(0));
        for (const auto& c : g.cells()) {
            const Rational third_mu = rational_pow(make_rational(1, 3), static_cast<unsigned>(m + 1));
            const Rational third_nu = oracle::kusuoka_mass(digits(c.word)) / 3;
            for (int v : c.corners) {
                mu[static_cast<std::size_t>(v)] += third_mu;
                nu[static_cast<std::size_t>(v)] += third_nu;
            }
        }
        CHECK(exact.mu == mu);
        CHECK(exact.nu == nu);
        const auto approx = assemble_masses(g);
        for (std::size_t v = 0; v < g.vertex_count(); ++v) {
            CHECK(approx.mu[v] == doctest::Approx(mu[v].get_d()).epsilon(1e-14));
            CHECK(approx.nu[v] == doctest::Approx(nu[v].get_d()).epsilon(1e-12));
        }
    }
    const auto m0 = assemble_masses_exact(build_level_graph(0));
    CHECK(m0.nu[0] == make_rational(1, 3));
    const auto m2 = assemble_masses_exact(build_level_graph(2));
    CHECK(m2.nu[0] == make_rational(41, 675));
}

TEST_CASE("constants and harmonic functions are stationary")
{
    const auto g = build_level_graph(3);
    auto spec = quiet_spec(TerminalSpec::constant(0.8), 0.2);
    spec.boundary.kind = BoundarySpec::Kind::constant;
    spec.boundary.value = 0.8;
    const auto c = solve_weak_pde(make_pde_problem(spec, g), g);
    for (double v : c.u_at(0)) {
        CHECK(v == doctest::Approx(0.8).epsilon(1e-12));
    }
    CHECK(c.terminal_mismatch == 0.0);

    const Vec3<double> b{1.0, -0.5, 0.25};
    spec = quiet_spec(TerminalSpec::harmonic(b), 0.2);
    spec.boundary.kind = BoundarySpec::Kind::affine;
    spec.boundary.values = b;
    const auto h = solve_weak_pde(make_pde_problem(spec, g), g);
    const auto ref = harmonic_extend_to_level<double>(b, g);
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        CHECK(h.u_at(0)[v] == doctest::Approx(ref[v]).epsilon(1e-11));
    }
}

TEST_CASE("one implicit step solves the lumped Galerkin system")
{
    const auto g = build_level_graph(2);
    const auto spec = quiet_spec(TerminalSpec::bump(), 0.05);
    const auto p = make_pde_problem(spec, g);
    const auto sol = solve_weak_pde(p, g);
    const std::size_t K = sol.step_count;
    const auto& next = sol.u_at(K);
    const auto& cur = sol.u_at(K - 1);
    const double scale = 0.5 * std::pow(5.0 / 3.0, 2);
    for (int x = 3; x < static_cast<int>(g.vertex_count()); ++x) {
        double stiffness = 0.0;
        for (int y : g.neighbors(x)) {
            stiffness += scale * (cur[static_cast<std::size_t>(x)] - cur[static_cast<std::size_t>(y)]);
        }
        const double mass = 2.0 / 27.0;  // interior vertex of V_2: two cells of mu-mass 1/9
        const double r = mass / sol.h * (cur[static_cast<std::size_t>(x)] - next[static_cast<std::size_t>(x)]) + stiffness;
        CHECK(std::abs(r) < 1e-12);
    }
    for (double r : sol.residual) {
        CHECK(r < 1e-12);
    }
}

TEST_CASE("heat flow with zero boundary decays in sup norm")
{
    const auto g = build_level_graph(3);
    const auto sol = solve_weak_pde(make_pde_problem(quiet_spec(TerminalSpec::bump(0.4, 2.0), 0.3), g), g);
    double previous = 2.0 + 1e-12;
    for (std::size_t k = sol.step_count + 1; k-- > 0;) {
        double sup = 0.0;
        for (double v : sol.u_at(k)) {
            CHECK(v >= -1e-12);
            sup = std::max(sup, std::abs(v));
        }
        CHECK(sup <= previous + 1e-12);
        previous = sup;
    }
    CHECK(previous < 0.9);
}

TEST_CASE("step guard and stored layers")
{
    const auto g = build_level_graph(1);
    auto spec = quiet_spec(TerminalSpec::constant(1.0), 0.2);
    spec.g = ScalarLaw::linear(20.0);
    CHECK_THROWS_AS(solve_weak_pde(make_pde_problem(spec, g), g), UsageError);
    spec.g = ScalarLaw::linear(1.0);
    PdeOptions opt;
    opt.keep_steps = {0};
    opt.gradients = true;
    const auto sol = solve_weak_pde(make_pde_problem(spec, g), g, opt);
    CHECK(sol.steps == std::vector<std::size_t>{0});
    CHECK(sol.gradient.size() == 1);
    CHECK(sol.gradient.front().size() == g.cell_count());
    CHECK_THROWS_AS(sol.u_at(1), UsageError);
    CHECK(sol.terminal_mismatch == doctest::Approx(1.0));
}

TEST_CASE("weak PDE and killed BSDE approach each other")
{
    ProblemSpec spec;
    spec.g = ScalarLaw::sine(0.5);
    spec.f = ScalarLaw::sat_exp(0.5, 1.0);
    spec.z_slope = 0.3;
    spec.terminal = TerminalSpec::bump();
    spec.horizon = 0.4;
    const auto probes = probe_grid(1, {0.0, 0.2});
    CHECK(probes.size() == 6);
    const auto r = feynman_kac_check(spec, {2, 3, 4}, probes);
    REQUIRE(r.levels.size() == 3);
    CHECK(r.strictly_decreasing);
    CHECK(r.levels.back().sup_error < 0.01);
    for (const auto& l : r.levels) {
        CHECK(l.error.size() == probes.size());
    }
    const std::vector<FkProbe> off_grid{{0.123, corner_point(1)}};
    CHECK_THROWS_AS(feynman_kac_check(spec, {2}, off_grid), UsageError);
}

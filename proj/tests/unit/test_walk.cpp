#include <doctest.h>

#include <cmath>
#include <numeric>

#include <gasket/errors.hpp>
#include <gasket/harmonic.hpp>
#include <gasket/walk.hpp>

#include "oracles/chains.hpp"

using namespace gasket;

TEST_CASE("step kernel moments")
{
    for (int m = 0; m <= 5; ++m) {
        const auto g = build_level_graph(m);
        const auto k = build_step_kernel(g);
        CHECK(k.dt == doctest::Approx(std::pow(5.0, -m) / 3.0));
        CHECK(k.vertex_count() == g.vertex_count());
        for (int x = 0; x < static_cast<int>(g.vertex_count()); ++x) {
            const double p = k.probability(x);
            double mean = 0.0;
            double second = 0.0;
            for (double w : k.dW_of(x)) {
                mean += p * w;
                second += p * w * w;
            }
            CHECK(std::abs(mean) < 1e-12);
            CHECK(std::abs(second - k.dQV[static_cast<std::size_t>(x)]) < 1e-12 * std::max(1.0, second));
            CHECK(k.residual_fraction[static_cast<std::size_t>(x)] >= 0.0);
            CHECK(k.residual_fraction[static_cast<std::size_t>(x)] < 1.0);
            const auto& e = k.direction[static_cast<std::size_t>(x)];
            CHECK(e[0] * e[0] + e[1] * e[1] + e[2] * e[2] == doctest::Approx(1.0));
            CHECK(e[0] <= 1e-15);
        }
    }
}

TEST_CASE("quadratic variation increments from harmonic tables")
{
    for (int m = 1; m <= 4; ++m) {
        const auto g = build_level_graph(m);
        const auto k = build_step_kernel(g);
        std::array<std::vector<Rational>, 3> h;
        for (int i = 0; i < 3; ++i) {
            BoundaryTriple<Rational> e{Rational(0), Rational(0), Rational(0)};
            e[static_cast<std::size_t>(i)] = 1;
            h[static_cast<std::size_t>(i)] = harmonic_extend_to_level(e, g);
        }
        const auto mu = StartSpec::hausdorff(g);
        double averaged = 0.0;
        for (int x = 0; x < static_cast<int>(g.vertex_count()); ++x) {
            Rational s(0);
            const auto nb = g.neighbors(x);
            for (int y : nb) {
                for (const auto& hi : h) {
                    const Rational d = hi[static_cast<std::size_t>(y)] - hi[static_cast<std::size_t>(x)];
                    s += d * d;
                }
            }
            const Rational expected = s / Rational(6 * static_cast<long>(nb.size()));
            CHECK(k.dQV[static_cast<std::size_t>(x)] == doctest::Approx(expected.get_d()).epsilon(1e-13));
            const double before = x == 0 ? 0.0 : mu.cumulative[static_cast<std::size_t>(x) - 1];
            averaged += (mu.cumulative[static_cast<std::size_t>(x)] - before) * k.dQV[static_cast<std::size_t>(x)];
        }
        // Under the lumped Hausdorff law <W> grows by exactly dt per step on average.
        CHECK(averaged == doctest::Approx(k.dt).epsilon(1e-12));
    }
}

TEST_CASE("mean exit time from V_1 points")
{
    for (int m = 1; m <= 5; ++m) {
        const auto g = build_level_graph(m);
        const auto steps = oracle::mean_hitting_steps(g);
        const int mid = g.find_vertex(midpoint(corner_point(1), corner_point(2)));
        CHECK(steps[static_cast<std::size_t>(mid)] == doctest::Approx(2.0 * std::pow(5.0, m - 1)).epsilon(1e-9));
    }
    const auto g = build_level_graph(3);
    const auto k = build_step_kernel(g);
    const auto steps = oracle::mean_hitting_steps(g);
    for (int v : {3, 10, 20}) {
        WalkConfig cfg{3, StartSpec::at(v), 1e9, 17, 20000, true, 2};
        const auto s = exit_time_stats(cfg, k);
        CHECK(s.hit_fraction == 1.0);
        CHECK(s.warning.empty());
        CHECK(std::abs(s.mean_time - steps[static_cast<std::size_t>(v)] * k.dt) < 4.0 * s.standard_error);
    }
    WalkConfig free{3, StartSpec::at(3), 1.0, 1, 10, false, 1};
    CHECK_THROWS_AS(exit_time_stats(free, k), UsageError);
}

TEST_CASE("paths are reproducible and independent of the worker count")
{
    const auto g = build_level_graph(3);
    const auto k = build_step_kernel(g);
    WalkConfig cfg{3, StartSpec::hausdorff(g), 0.2, 99, 64, false, 1};
    const auto a = simulate_paths(cfg, k);
    cfg.workers = 5;
    const auto b = simulate_paths(cfg, k);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].vertices == b[i].vertices);
        CHECK(a[i].cumQV == b[i].cumQV);
    }
    const auto p = a.front();
    CHECK(p.steps == cfg.steps());
    CHECK(p.vertices.size() == p.steps + 1);
    CHECK(p.cumQV.size() == p.steps + 1);
    CHECK(p.cumQV.front() == 0.0);
    for (std::size_t s = 0; s < p.steps; ++s) {
        CHECK(p.cumQV[s + 1] == doctest::Approx(p.cumQV[s] + p.dQV[s]));
    }
    cfg.seed = 100;
    CHECK(simulate_paths(cfg, k).front().vertices != p.vertices);
}

TEST_CASE("quadratic variation sampling")
{
    const auto g = build_level_graph(3);
    const auto k = build_step_kernel(g);
    WalkConfig cfg{3, StartSpec::hausdorff(g), 1.0, 4, 4000, false, 2};
    const std::vector<double> times{0.0, 0.25, 1.0};
    const auto qv = quadratic_variation_at(cfg, k, times);
    REQUIRE(qv.size() == 4000);
    double mean = 0.0;
    for (const auto& row : qv) {
        CHECK(row[0] == 0.0);
        CHECK(row[1] <= row[2]);
        mean += row[2] / 4000.0;
    }
    CHECK(mean == doctest::Approx(1.0).epsilon(0.03));
    const std::vector<double> bad{0.5, 0.25};
    CHECK_THROWS_AS(quadratic_variation_at(cfg, k, bad), UsageError);
}

TEST_CASE("start laws")
{
    const auto g = build_level_graph(2);
    CHECK(StartSpec::parse("vertex:5", g).vertex == 5);
    CHECK(StartSpec::parse("7", g).vertex == 7);
    CHECK(StartSpec::parse("mu", g).cumulative.back() == doctest::Approx(1.0));
    CHECK_THROWS_AS(StartSpec::parse("vertex:99", g), UsageError);
    CHECK_THROWS_AS(StartSpec::parse("banana", g), UsageError);
    CHECK_THROWS_AS(StartSpec::parse("word:123", g), UsageError);

    const auto cell = StartSpec::parse("word:12", g);
    const auto corners = g.cell(CellWord("12")).corners;
    double previous = 0.0;
    for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v) {
        const double w = cell.cumulative[static_cast<std::size_t>(v)] - previous;
        previous = cell.cumulative[static_cast<std::size_t>(v)];
        const bool inside = std::find(corners.begin(), corners.end(), v) != corners.end();
        CHECK((w > 0.0) == inside);
        if (inside) {
            CHECK(w == doctest::Approx(1.0 / 3.0));
        }
    }
    const std::vector<double> neg{1.0, -1.0};
    CHECK_THROWS_AS(StartSpec::from_weights(neg), UsageError);
}

TEST_CASE("occupation histogram relaxes to the Hausdorff law")
{
    const auto g = build_level_graph(3);
    const auto k = build_step_kernel(g);
    WalkConfig cfg{3, StartSpec::at(0), 1.0, 8, 30000, false, 2};
    const auto h = occupation_histogram(cfg, k, g, 1.0, 1);
    REQUIRE(h.size() == 3);
    CHECK(std::accumulate(h.begin(), h.end(), 0.0) == doctest::Approx(1.0));
    const std::vector<double> uniform(3, 1.0 / 3.0);
    CHECK(total_variation(h, uniform) < 0.02);
    const auto early = occupation_histogram(cfg, k, g, 0.001, 1);
    CHECK(total_variation(early, uniform) > 0.3);
    CHECK_THROWS_AS(occupation_histogram(cfg, k, g, 1.0, 4), UsageError);
}

TEST_CASE("exponential mean in the log domain")
{
    const std::vector<double> big{1000.0, 1000.0, 1000.0, 1000.0};
    const auto e = exponential_mean(big, 1);
    CHECK(e.log_mean == doctest::Approx(1000.0));
    CHECK_FALSE(e.unstable);

    std::vector<double> skewed(1000, 0.0);
    skewed[17] = 50.0;
    const auto s = exponential_mean(skewed, 1);
    CHECK(s.top_share > 0.99);
    CHECK(s.unstable);

    std::vector<double> zeros(50, 0.0);
    const auto z = exponential_mean(zeros, 3);
    CHECK(z.mean == doctest::Approx(1.0));
    CHECK(z.standard_error == doctest::Approx(0.0));
    CHECK_THROWS_AS(exponential_mean(std::vector<double>{}, 1), UsageError);
}

TEST_CASE("exponential moment of the quadratic variation")
{
    const auto g = build_level_graph(3);
    const auto k = build_step_kernel(g);
    WalkConfig cfg{3, StartSpec::hausdorff(g), 1.0, 21, 20000, false, 2};
    const auto zero = expint_estimate(cfg, k, 0.0, 1.0);
    CHECK(zero.mean == doctest::Approx(1.0));
    const auto e = expint_estimate(cfg, k, 0.5, 1.0);
    // Jensen against E<W>_1 = 1.
    CHECK(e.mean > std::exp(0.5) * 0.98);
    CHECK(e.ci_low <= e.mean);
    CHECK(e.mean <= e.ci_high);
}

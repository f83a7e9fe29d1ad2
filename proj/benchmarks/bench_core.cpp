#include <benchmark/benchmark.h>

#include <gasket/bsde.hpp>
#include <gasket/harmonic.hpp>
#include <gasket/pde.hpp>
#include <gasket/walk.hpp>

using namespace gasket;

namespace {

ProblemSpec nonlinear(bool killed)
{
    ProblemSpec s;
    s.g = ScalarLaw::linear(-1.0);
    s.f = ScalarLaw::sine(0.5);
    s.z_slope = 0.25;
    s.terminal = TerminalSpec::bump();
    s.horizon = 0.1;
    s.killed = killed;
    return s;
}

}  // namespace

static void BM_BuildGraph(benchmark::State& state)
{
    const int m = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_level_graph(m));
    }
}
BENCHMARK(BM_BuildGraph)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_ExactHarmonicExtension(benchmark::State& state)
{
    const auto g = build_level_graph(static_cast<int>(state.range(0)));
    const BoundaryTriple<Rational> u{Rational(1), make_rational(-1, 3), make_rational(2, 7)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(harmonic_extend_to_level(u, g));
    }
}
BENCHMARK(BM_ExactHarmonicExtension)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);

static void BM_StepKernel(benchmark::State& state)
{
    const auto g = build_level_graph(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_step_kernel(g));
    }
}
BENCHMARK(BM_StepKernel)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_WalkSteps(benchmark::State& state)
{
    const auto g = build_level_graph(5);
    const auto k = build_step_kernel(g);
    WalkConfig cfg{5, StartSpec::hausdorff(g), 1.0, 1, static_cast<std::size_t>(state.range(0)), false, 1};
    const std::vector<double> times{1.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(quadratic_variation_at(cfg, k, times));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(cfg.steps()));
}
BENCHMARK(BM_WalkSteps)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_DynamicProgramming(benchmark::State& state)
{
    const auto g = build_level_graph(static_cast<int>(state.range(0)));
    const auto k = build_step_kernel(g);
    const auto p = make_bsde_problem(nonlinear(false), g);
    DpOptions opt;
    opt.keep_steps = {0};
    opt.spot_check = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_dp(p, k, opt));
    }
}
BENCHMARK(BM_DynamicProgramming)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

static void BM_WeakPde(benchmark::State& state)
{
    const auto g = build_level_graph(static_cast<int>(state.range(0)));
    const auto p = make_pde_problem(nonlinear(true), g);
    PdeOptions opt;
    opt.keep_steps = {0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_weak_pde(p, g, opt));
    }
}
BENCHMARK(BM_WeakPde)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

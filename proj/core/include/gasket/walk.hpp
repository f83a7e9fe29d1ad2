#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gasket/graph.hpp"
#include "gasket/matrix3.hpp"
#include "gasket/rng.hpp"

namespace gasket {

/// Diffusion time of one walk step on V_m: 5^-m / 3. With the equal-thirds mass lumping this
/// makes the walk generator coincide with the Galerkin operator of E^(m).
double diffusion_time_step(int level);

/// Transition data of the simple random walk on V_m together with the increments of the
/// Brownian martingale W and of its quadratic variation <W>.
///
/// For each vertex x: uniform steps to the neighbours, dQV(x) = (1/6) sum_i E[(dh_i)^2 | x]
/// (so that the Revuz measure of <W> is the Kusuoka measure), and per-edge dW obtained by
/// projecting the centred harmonic increment triple onto the principal direction e(x) of its
/// conditional covariance, rescaled so that E[dW | x] = 0 and E[dW^2 | x] = dQV(x).
/// e(x) is oriented with e(x)_1 <= 0 (ties: e(x)_2 > 0).
struct StepKernel {
    int level = 0;
    double dt = 0.0;
    std::vector<std::size_t> offsets;  ///< CSR row starts, size n+1
    std::vector<int> targets;
    std::vector<double> dW;
    std::vector<Vec3<double>> dh;  ///< increments of (h1, h2, h3) along each edge
    std::vector<double> dQV;
    std::vector<Vec3<double>> direction;
    /// Share of the conditional covariance of dh orthogonal to e(x); the rank-one model error.
    std::vector<double> residual_fraction;
    std::vector<char> boundary;

    std::size_t vertex_count() const { return dQV.size(); }
    std::size_t degree(int v) const { return offsets[v + 1] - offsets[v]; }
    double probability(int v) const { return 1.0 / static_cast<double>(degree(v)); }
    std::span<const int> targets_of(int v) const { return {targets.data() + offsets[v], degree(v)}; }
    std::span<const double> dW_of(int v) const { return {dW.data() + offsets[v], degree(v)}; }
};

StepKernel build_step_kernel(const LevelGraph& g);

/// Initial law of the walk: a single vertex or a law over V_m.
struct StartSpec {
    int vertex = 0;
    std::vector<double> cumulative;  ///< normalised CDF over vertex ids; empty means "start at vertex"

    static StartSpec at(int v) { return StartSpec{v, {}}; }
    static StartSpec from_weights(std::span<const double> weights);
    /// Lumped Hausdorff measure (the stationary law of the reflected walk).
    static StartSpec hausdorff(const LevelGraph& g);
    /// Lumped Hausdorff measure restricted to the cell F_w(S), |w| <= level.
    static StartSpec in_cell(const CellWord& w, const LevelGraph& g);
    /// Parses "vertex:ID", "word:W", "mu" or a bare vertex id.
    static StartSpec parse(const std::string& text, const LevelGraph& g);
};

struct WalkConfig {
    int level = 0;
    StartSpec start;
    double horizon = 1.0;
    std::uint64_t seed = 0;
    std::size_t path_count = 1;
    bool killed = false;  ///< absorb on V_0 (after leaving, for V_0 starts)
    int workers = 1;

    double dt() const { return diffusion_time_step(level); }
    std::size_t steps() const { return steps_for(horizon); }
    std::size_t steps_for(double t) const
    {
        return static_cast<std::size_t>(std::ceil(t / dt() - 1e-9));
    }
};

struct PathSample {
    std::vector<int> vertices;   ///< X_0 .. X_steps
    std::vector<double> dW;      ///< increment over step k
    std::vector<double> dQV;
    std::vector<double> cumQV;   ///< <W> at X_0 .. X_steps
    std::optional<std::size_t> hit_step;
    std::size_t steps = 0;
};

/// Draws the start vertex for path `index` (consumes one draw when the start is a law).
int draw_start(const StartSpec& start, PathRng& rng);

/// Walks one path, calling visit(k, x, y, dW, dQV) for each step from X_k = x to X_{k+1} = y.
/// Stops after max_steps, when visit returns false, or (killed) on hitting V_0.
/// Returns the number of steps taken and the hitting step if any.
template <typename Visit>
std::pair<std::size_t, std::optional<std::size_t>> walk_path(const StepKernel& kernel, const WalkConfig& cfg,
                                                              std::uint64_t index, std::size_t max_steps,
                                                              Visit&& visit)
{
    PathRng rng(cfg.seed, index);
    int x = draw_start(cfg.start, rng);
    for (std::size_t k = 0; k < max_steps; ++k) {
        const std::size_t begin = kernel.offsets[static_cast<std::size_t>(x)];
        const std::size_t deg = kernel.offsets[static_cast<std::size_t>(x) + 1] - begin;
        const std::size_t e = begin + rng.below(static_cast<std::uint32_t>(deg));
        const int y = kernel.targets[e];
        if (!visit(k, x, y, kernel.dW[e], kernel.dQV[static_cast<std::size_t>(x)])) {
            return {k + 1, std::nullopt};
        }
        x = y;
        if (cfg.killed && kernel.boundary[static_cast<std::size_t>(y)]) {
            return {k + 1, k + 1};
        }
    }
    return {max_steps, std::nullopt};
}

PathSample simulate_path(const WalkConfig& cfg, const StepKernel& kernel, std::uint64_t index);
std::vector<PathSample> simulate_paths(const WalkConfig& cfg, const StepKernel& kernel);

/// <W> at each requested time (stopped at sigma_V0 in killed mode), one row per path.
std::vector<std::vector<double>> quadratic_variation_at(const WalkConfig& cfg, const StepKernel& kernel,
                                                        std::span<const double> times);

struct MeanEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct ExitTimeStats {
    double mean_time = 0.0;  ///< in diffusion time
    double variance_time = 0.0;
    double standard_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double hit_fraction = 0.0;
    std::size_t paths = 0;
    std::string warning;  ///< non-empty when fewer than 99% of paths hit V_0
};

/// Mean and variance of sigma_V0 = inf{t > 0 : X_t in V_0}. Requires cfg.killed.
ExitTimeStats exit_time_stats(const WalkConfig& cfg, const StepKernel& kernel);

/// Empirical law of X_t over the level-k cells. A vertex shared by two cells gives each half.
std::vector<double> occupation_histogram(const WalkConfig& cfg, const StepKernel& kernel, const LevelGraph& g,
                                         double t, int cell_level);

double total_variation(std::span<const double> p, std::span<const double> q);

struct ExpIntEstimate {
    double mean = 0.0;
    double log_mean = 0.0;
    double standard_error = 0.0;
    double ci_low = 0.0;   ///< bootstrap percentile interval
    double ci_high = 0.0;
    double top_share = 0.0;  ///< share of the sum carried by the largest 1% of samples
    bool unstable = false;
};

/// Monte-Carlo estimate of E[exp(beta <W>_t)] (t ^ sigma_V0 in killed mode), log-sum-exp safe.
ExpIntEstimate expint_estimate(const WalkConfig& cfg, const StepKernel& kernel, double beta, double t);

/// Mean estimate with a percentile bootstrap interval for exp(log_values), computed in a
/// shifted log domain. Used by every Monte-Carlo exponential-moment estimator.
ExpIntEstimate exponential_mean(std::span<const double> log_values, std::uint64_t seed);

}  // namespace gasket

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gasket/problem.hpp"
#include "gasket/walk.hpp"

namespace gasket {

/// BSDE data on the level-m chain: dY = -g dt - f d<W> + Z dW with terminal value Psi at the
/// exit of [0, T) (or of [0, T) x (S \ V_0) in killed mode).
struct BsdeProblem {
    std::function<double(double t, int x, double y)> g;
    std::function<double(double t, int x, double y, double z)> f;
    double K0 = 0.0;  ///< |g(y) - g(y')| and |f(y, z) - f(y', z)| are at most (K0 / 2) |y - y'|
    double K1 = 0.0;  ///< |f(y, z) - f(y, z')| is at most K1 |z - z'|
    std::optional<double> kappa0;
    std::optional<double> kappa1;
    std::vector<double> terminal;  ///< psi over V_m
    std::function<double(double t, int i)> boundary;  ///< phi on V_0, used in killed mode
    double horizon = 1.0;
    bool killed = false;
    std::optional<LinearCoefficients> linear;
};

BsdeProblem make_bsde_problem(const ProblemSpec& spec, const LevelGraph& g);

enum class Scheme { explicit_euler, picard_in_step };
std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

struct DpOptions {
    Scheme scheme = Scheme::explicit_euler;
    std::optional<double> dt;  ///< defaults to the kernel's diffusion step
    std::vector<std::size_t> keep_steps;  ///< layers to store; empty stores all
    int workers = 1;
    bool spot_check = true;  ///< sample the declared Lipschitz bounds
};

struct BsdeSolution {
    int level = 0;
    double dt = 0.0;
    std::size_t step_count = 0;
    Scheme scheme = Scheme::explicit_euler;
    std::size_t iterations = 0;  ///< largest inner iteration count (picard-in-step)
    std::vector<std::size_t> steps;  ///< stored layers, increasing
    std::vector<std::vector<double>> Y;
    std::vector<std::vector<double>> Z;  ///< Z at the terminal layer is 0
    std::vector<std::string> warnings;

    const std::vector<double>& y_at(std::size_t step) const;
    const std::vector<double>& z_at(std::size_t step) const;
};

/// Backward dynamic programming with exact conditional expectations over the neighbours.
BsdeSolution solve_dp(const BsdeProblem& p, const StepKernel& kernel, const DpOptions& opt = {});

/// Number of steps and step size used for horizon T.
std::size_t step_count_for(double horizon, double dt);

struct BetaWeights {
    double beta0 = 1.0;
    double beta1 = 1.0;
};

/// K_beta = sqrt(K0^2 / beta0 + K1^2 / beta1).
double contraction_constant(double K0, double K1, BetaWeights w);

/// Empirical V^beta norm: square root of the path average of
/// sup_k y_k^2 e_k + sum_k y_k^2 e_k dt + sum_k (y_k^2 + z_k^2) e_k dQV_k,
/// e_k = exp(2 beta0 t_k + 2 beta1 <W>_k). Paths stop at their hitting step when one is recorded.
double vbeta_norm(const std::vector<PathSample>& paths, double dt,
                  const std::function<double(std::size_t step, int x)>& y,
                  const std::function<double(std::size_t step, int x)>& z, BetaWeights w);

struct PicardOptions {
    enum class Init { zero, terminal };  ///< (0, 0) or (driverless solution, 0)
    std::size_t iterations = 10;
    Init init = Init::zero;
    BetaWeights beta;
    std::size_t paths = 200;
    std::uint64_t seed = 1;
    int workers = 1;
    std::optional<double> dt;
    bool keep_iterates = false;
};

struct PicardResult {
    std::vector<double> distances;  ///< ||(Y^{n+1} - Y^n, Z^{n+1} - Z^n)|| for n = 0, 1, ...
    std::vector<double> ratios;     ///< distances[n + 1] / distances[n]
    BsdeSolution solution;          ///< last iterate
    std::vector<BsdeSolution> iterates;
};

/// Picard scheme of the existence proof: each iterate solves the linear BSDE with the drivers
/// frozen at the previous iterate. Its fixed point is the picard-in-step DP solution.
PicardResult picard_iterate(const BsdeProblem& p, const StepKernel& kernel, const LevelGraph& g,
                            const PicardOptions& opt);

enum class PhiForm { discrete, continuum };

struct LinearClosedForm {
    std::vector<int> starts;
    std::vector<double> y0;
    std::vector<double> z0;
};

/// Y_0(x) = E_x[Phi_tau Psi(tau, X_tau)] for g = a y, f = b y + c z, evaluated exactly by forward
/// propagation of the weighted law on the chain. Phi is the discrete stochastic exponential
/// Phi_{k+1} = Phi_k (1 + a dt + b dQV_k + c dW_k).
LinearClosedForm linear_closed_form_exact(const BsdeProblem& p, const StepKernel& kernel,
                                          std::vector<int> starts = {}, std::optional<double> dt = {});

struct McEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double top_share = 0.0;
    bool unstable = false;
};

McEstimate linear_closed_form_mc(const BsdeProblem& p, const StepKernel& kernel, int start, std::size_t paths,
                                 std::uint64_t seed, int workers = 1, PhiForm form = PhiForm::discrete,
                                 std::optional<double> dt = {});

struct MonotonicityReport {
    std::size_t samples = 0;
    double worst_margin_g = 0.0;  ///< min over samples of (-kappa0 d^2 - d (g(y) - g(y'))) / d^2
    double worst_margin_f = 0.0;
    double beta_margin0 = 0.0;  ///< beta0 - kappa0
    double beta_margin1 = 0.0;  ///< beta1 - kappa1 + K1^2 / 2
    bool passed = true;
    std::string detail;
};

/// Samples the one-sided monotonicity conditions with the declared kappas.
/// Throws DeclaredConstantError on violation unless probe_only is set.
MonotonicityReport monotonicity_check(const BsdeProblem& p, BetaWeights w, std::size_t samples, std::uint64_t seed,
                                      bool probe_only = false);

}  // namespace gasket

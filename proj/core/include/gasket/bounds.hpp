#pragma once

#include <cstdint>
#include <vector>

#include "gasket/graph.hpp"
#include "gasket/walk.hpp"

namespace gasket {

struct SpectralConstants {
    double d_s = 0.0;      ///< 2 log 3 / log 5
    double gamma_s = 0.0;  ///< 1 - d_s / 2
};

SpectralConstants spectral_constants();

/// E_{a,b}(z) = sum_p z^p / Gamma(a p + b), summed in long double with compensation.
/// Throws DomainError for a <= 0, b <= 0, z^(1/a) > 700, or hopeless cancellation at z < 0.
double mittag_leffler(double a, double b, double z);

struct BetaChainResult {
    double lhs = 0.0;  ///< simplex integral by nested quadrature
    double rhs = 0.0;  ///< Gamma(gamma)^p / Gamma(p gamma + 1)
    double gap = 0.0;  ///< |lhs - rhs| / rhs
};

/// Integral over 0 < t_1 < ... < t_p < 1 of prod (t_i - t_{i-1})^(gamma - 1), t_0 = 0, by nested
/// tanh-sinh quadrature with `refinements` halvings of the step.
BetaChainResult beta_chain_identity(int p, double gamma, int refinements = 8);

/// Samples of <W>_t for one start vertex on the reflected walk.
struct QvEnsemble {
    int start = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> samples;  ///< [path][time]
};

QvEnsemble sample_quadratic_variation(const StepKernel& kernel, int start, const std::vector<double>& times,
                                      std::size_t paths, std::uint64_t seed, int workers = 1);

struct MomentEntry {
    int start = 0;
    int p = 0;
    double t = 0.0;
    double moment = 0.0;  ///< E[<W>_t^p] / p!
    double standard_error = 0.0;
    double required_C = 0.0;  ///< smallest C with moment <= (C t^gamma_s)^p / Gamma(p gamma_s + 1)
    double bound = 0.0;       ///< right-hand side with the fitted C
    bool holds = false;       ///< moment - 3 SE <= bound
};

struct MomentBoundReport {
    double C = 0.0;
    std::vector<MomentEntry> entries;
    bool holds = false;
};

/// Fits the smallest single C for the moment bound over all starts, powers and times.
MomentBoundReport moment_bound_check(const std::vector<QvEnsemble>& ensembles, const std::vector<int>& powers);

struct MlEntry {
    double beta = 0.0;
    double t = 0.0;
    int worst_start = 0;
    ExpIntEstimate estimate;  ///< of max over starts of E_x exp(beta <W>_t)
    double bound = 0.0;       ///< E_{gamma_s,1}(C beta max(t, t^gamma_s))
    bool holds = false;       ///< estimate - 3 SE <= bound
};

struct MlBoundReport {
    double C = 0.0;
    std::vector<MlEntry> entries;
    bool holds = false;
};

MlBoundReport mittag_leffler_bound_check(const std::vector<QvEnsemble>& ensembles, const std::vector<double>& betas,
                                         double C, std::uint64_t seed);

struct ExpIntStability {
    double horizon = 0.0;
    ExpIntEstimate at_horizon;
    ExpIntEstimate at_double;
    double z_score = 0.0;      ///< difference over its combined standard error
    double tail_mass = 0.0;    ///< fraction of paths not absorbed by the doubled horizon
    bool stable = false;
};

/// E exp(beta <W>_{sigma_V0}) estimated with the walk capped at H and at 2H (same seed).
/// Stable when neither estimate is flagged and they agree within 3 combined SE.
ExpIntStability expint_horizon_doubling(const WalkConfig& cfg, const StepKernel& kernel, double beta, double horizon);

}  // namespace gasket

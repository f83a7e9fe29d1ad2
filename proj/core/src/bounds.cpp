#include "gasket/bounds.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gasket/errors.hpp"
#include "gasket/parallel.hpp"

namespace gasket {

SpectralConstants spectral_constants()
{
    SpectralConstants s;
    s.d_s = 2.0 * std::log(3.0) / std::log(5.0);
    s.gamma_s = 1.0 - s.d_s / 2.0;
    return s;
}

double mittag_leffler(double a, double b, double z)
{
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("mittag_leffler needs a > 0 and b > 0");
    }
    if (z == 0.0) {
        return 1.0 / std::tgamma(b);
    }
    const long double az = std::abs(static_cast<long double>(z));
    if (std::pow(az, 1.0L / a) > 700.0L) {
        throw DomainError("mittag_leffler argument beyond the overflow guard |z|^(1/a) <= 700");
    }
    const long double log_az = std::log(az);
    long double sum = 0.0L;
    long double comp = 0.0L;
    long double largest = 0.0L;
    // Terms decay once a p + b outgrows |z|^(1/a); stop after that on a small relative term.
    const long double peak = std::pow(az, 1.0L / a) / a;
    for (long p = 0; p < 100000; ++p) {
        const long double pl = static_cast<long double>(p);
        const long double mag = std::exp(pl * log_az - std::lgamma(static_cast<long double>(a) * pl + b));
        const long double term = (z < 0.0 && (p % 2 == 1)) ? -mag : mag;
        largest = std::max(largest, mag);
        const long double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
        if (pl > peak + 2.0L && mag <= 1e-17L * std::abs(sum + comp)) {
            break;
        }
    }
    const long double result = sum + comp;
    if (z < 0.0 && largest * 1e-17L > 1e-12L * std::abs(result)) {
        throw DomainError("mittag_leffler series cancels too strongly at this negative argument");
    }
    return static_cast<double>(result);
}

namespace {

/// I_k(s) = integral over the k-simplex scaled to [0, s].
double simplex_integral(int k, double s, double gamma, boost::math::quadrature::tanh_sinh<double>& q)
{
    if (k == 0) {
        return 1.0;
    }
    if (!(s > 0.0)) {
        return 0.0;
    }
    // x is the first increment. tanh_sinh passes xc = -x on the left half and s - x on the
    // right half, so both distances to the ends are available without cancellation.
    auto integrand = [&](double x, double xc) {
        const double left = xc < 0.0 ? -xc : s - xc;
        const double right = xc < 0.0 ? s - x : xc;
        if (left <= 0.0) {
            return 0.0;
        }
        return std::pow(left, gamma - 1.0) * simplex_integral(k - 1, right, gamma, q);
    };
    double err = 0.0;
    const double v = q.integrate(integrand, 0.0, s, 1e-13, &err);
    if (!std::isfinite(v)) {
        throw IntegrationError("simplex quadrature diverged; increase refinements");
    }
    return v;
}

}  // namespace

BetaChainResult beta_chain_identity(int p, double gamma, int refinements)
{
    if (p < 1 || p > 4) {
        throw UsageError("beta chain identity supports 1 <= p <= 4");
    }
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw DomainError("beta chain identity needs 0 < gamma < 1");
    }
    if (refinements < 1) {
        throw UsageError("refinements must be positive");
    }
    boost::math::quadrature::tanh_sinh<double> q(static_cast<std::size_t>(refinements));
    BetaChainResult r;
    r.lhs = simplex_integral(p, 1.0, gamma, q);
    r.rhs = std::exp(p * std::lgamma(gamma) - std::lgamma(p * gamma + 1.0));
    r.gap = std::abs(r.lhs - r.rhs) / r.rhs;
    return r;
}

QvEnsemble sample_quadratic_variation(const StepKernel& kernel, int start, const std::vector<double>& times,
                                      std::size_t paths, std::uint64_t seed, int workers)
{
    WalkConfig cfg;
    cfg.level = kernel.level;
    cfg.start = StartSpec::at(start);
    cfg.seed = seed;
    cfg.path_count = paths;
    cfg.workers = workers;
    QvEnsemble e;
    e.start = start;
    e.times = times;
    e.samples = quadratic_variation_at(cfg, kernel, times);
    return e;
}

MomentBoundReport moment_bound_check(const std::vector<QvEnsemble>& ensembles, const std::vector<int>& powers)
{
    if (ensembles.empty()) {
        throw UsageError("no ensembles");
    }
    const double g = spectral_constants().gamma_s;
    MomentBoundReport r;
    for (const auto& e : ensembles) {
        const double n = static_cast<double>(e.samples.size());
        for (int p : powers) {
            if (p < 1) {
                throw UsageError("moment powers start at 1");
            }
            const double fact = std::tgamma(p + 1.0);
            for (std::size_t j = 0; j < e.times.size(); ++j) {
                const double t = e.times[j];
                if (!(t > 0.0)) {
                    throw UsageError("moment times must be positive");
                }
                double sum = 0.0;
                double sq = 0.0;
                for (const auto& row : e.samples) {
                    const double v = std::pow(row[j], p) / fact;
                    sum += v;
                    sq += v * v;
                }
                MomentEntry m;
                m.start = e.start;
                m.p = p;
                m.t = t;
                m.moment = sum / n;
                m.standard_error = std::sqrt(std::max(0.0, sq / n - m.moment * m.moment) / (n - 1.0));
                m.required_C = std::pow(m.moment * std::tgamma(p * g + 1.0), 1.0 / p) / std::pow(t, g);
                r.C = std::max(r.C, m.required_C);
                r.entries.push_back(m);
            }
        }
    }
    r.holds = true;
    for (auto& m : r.entries) {
        m.bound = std::pow(r.C * std::pow(m.t, g), m.p) / std::tgamma(m.p * g + 1.0);
        m.holds = m.moment - 3.0 * m.standard_error <= m.bound;
        r.holds = r.holds && m.holds;
    }
    return r;
}

MlBoundReport mittag_leffler_bound_check(const std::vector<QvEnsemble>& ensembles, const std::vector<double>& betas,
                                         double C, std::uint64_t seed)
{
    if (ensembles.empty()) {
        throw UsageError("no ensembles");
    }
    const double g = spectral_constants().gamma_s;
    MlBoundReport r;
    r.C = C;
    r.holds = true;
    for (double beta : betas) {
        for (std::size_t j = 0; j < ensembles.front().times.size(); ++j) {
            MlEntry m;
            m.beta = beta;
            m.t = ensembles.front().times[j];
            bool first = true;
            for (const auto& e : ensembles) {
                std::vector<double> logs(e.samples.size());
                for (std::size_t i = 0; i < logs.size(); ++i) {
                    logs[i] = beta * e.samples[i][j];
                }
                const ExpIntEstimate est = exponential_mean(logs, seed);
                if (first || est.mean > m.estimate.mean) {
                    m.estimate = est;
                    m.worst_start = e.start;
                    first = false;
                }
            }
            m.bound = mittag_leffler(g, 1.0, C * beta * std::max(m.t, std::pow(m.t, g)));
            m.holds = m.estimate.mean - 3.0 * m.estimate.standard_error <= m.bound;
            r.holds = r.holds && m.holds;
            r.entries.push_back(m);
        }
    }
    return r;
}

ExpIntStability expint_horizon_doubling(const WalkConfig& cfg, const StepKernel& kernel, double beta, double horizon)
{
    if (!(horizon > 0.0)) {
        throw UsageError("horizon must be positive");
    }
    WalkConfig c = cfg;
    c.killed = true;
    ExpIntStability s;
    s.horizon = horizon;
    s.at_horizon = expint_estimate(c, kernel, beta, horizon);
    s.at_double = expint_estimate(c, kernel, beta, 2.0 * horizon);
    const double se = std::hypot(s.at_horizon.standard_error, s.at_double.standard_error);
    const double diff = std::abs(s.at_double.mean - s.at_horizon.mean);
    s.z_score = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    c.horizon = 2.0 * horizon;
    const ExitTimeStats st = exit_time_stats(c, kernel);
    s.tail_mass = 1.0 - st.hit_fraction;
    s.stable = !s.at_horizon.unstable && !s.at_double.unstable && s.z_score <= 3.0;
    return s;
}

}  // namespace gasket

#include "gasket/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "gasket/errors.hpp"
#include "gasket/parallel.hpp"

namespace gasket {

BsdeProblem make_bsde_problem(const ProblemSpec& spec, const LevelGraph& g)
{
    BsdeProblem p;
    p.g = [law = spec.g](double, int, double y) { return law(y); };
    p.f = [law = spec.f, c = spec.z_slope](double, int, double y, double z) { return law(y) + c * z; };
    p.K0 = spec.declared_K0();
    p.K1 = spec.declared_K1();
    p.kappa0 = spec.kappa0;
    p.kappa1 = spec.kappa1;
    p.terminal = spec.terminal.table(g);
    p.boundary = [b = spec.boundary](double t, int i) { return b(t, i); };
    p.horizon = spec.horizon;
    p.killed = spec.killed;
    p.linear = spec.linear_coefficients();
    return p;
}

std::string to_string(Scheme s)
{
    return s == Scheme::explicit_euler ? "explicit" : "picard-in-step";
}

Scheme parse_scheme(const std::string& name)
{
    if (name == "explicit") {
        return Scheme::explicit_euler;
    }
    if (name == "picard-in-step") {
        return Scheme::picard_in_step;
    }
    throw UsageError("unknown scheme '" + name + "' (expected explicit or picard-in-step)");
}

const std::vector<double>& BsdeSolution::y_at(std::size_t step) const
{
    const auto it = std::lower_bound(steps.begin(), steps.end(), step);
    if (it == steps.end() || *it != step) {
        throw UsageError("layer " + std::to_string(step) + " was not stored");
    }
    return Y[static_cast<std::size_t>(it - steps.begin())];
}

const std::vector<double>& BsdeSolution::z_at(std::size_t step) const
{
    const auto it = std::lower_bound(steps.begin(), steps.end(), step);
    if (it == steps.end() || *it != step) {
        throw UsageError("layer " + std::to_string(step) + " was not stored");
    }
    return Z[static_cast<std::size_t>(it - steps.begin())];
}

std::size_t step_count_for(double horizon, double dt)
{
    if (!(horizon > 0.0) || !(dt > 0.0)) {
        throw UsageError("horizon and step must be positive");
    }
    return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

namespace {

void check_problem(const BsdeProblem& p, const StepKernel& kernel)
{
    if (!p.g || !p.f) {
        throw UsageError("problem drivers are not set");
    }
    if (p.terminal.size() != kernel.vertex_count()) {
        throw UsageError("terminal table has " + std::to_string(p.terminal.size()) + " entries, the level-" +
                         std::to_string(kernel.level) + " kernel has " + std::to_string(kernel.vertex_count()) +
                         " vertices");
    }
    if (p.killed && !p.boundary) {
        throw UsageError("killed problems need boundary data");
    }
}

void spot_check(const BsdeProblem& p, const StepKernel& kernel, double horizon, std::vector<std::string>& warnings)
{
    PathRng rng(0x5107C4EC, 0);
    const double tol = 1e-9;
    double worst_y = 0.0;
    double worst_z = 0.0;
    for (int s = 0; s < 256; ++s) {
        const double t = horizon * rng.uniform();
        const int x = static_cast<int>(rng.below(static_cast<std::uint32_t>(kernel.vertex_count())));
        const double y = 20.0 * rng.uniform() - 10.0;
        const double yb = 20.0 * rng.uniform() - 10.0;
        const double z = 20.0 * rng.uniform() - 10.0;
        const double zb = 20.0 * rng.uniform() - 10.0;
        const double dy = std::abs(y - yb);
        const double dz = std::abs(z - zb);
        if (dy > 0.0) {
            worst_y = std::max(worst_y, std::abs(p.g(t, x, y) - p.g(t, x, yb)) / dy);
            worst_y = std::max(worst_y, std::abs(p.f(t, x, y, z) - p.f(t, x, yb, z)) / dy);
        }
        if (dz > 0.0) {
            worst_z = std::max(worst_z, std::abs(p.f(t, x, y, z) - p.f(t, x, y, zb)) / dz);
        }
    }
    if (worst_y > p.K0 / 2.0 * (1.0 + tol) + tol) {
        std::ostringstream s;
        s << "sampled y-slope " << worst_y << " exceeds K0/2 = " << p.K0 / 2.0;
        warnings.push_back(s.str());
    }
    if (worst_z > p.K1 * (1.0 + tol) + tol) {
        std::ostringstream s;
        s << "sampled z-slope " << worst_z << " exceeds K1 = " << p.K1;
        warnings.push_back(s.str());
    }
}

struct Layer {
    std::vector<double> y;
    std::vector<double> z;
};

/// One backward step. `driver_y`/`driver_z` supply the frozen driver arguments when set
/// (Picard iteration); otherwise the scheme decides.
struct StepContext {
    const BsdeProblem& p;
    const StepKernel& kernel;
    double dt;
    Scheme scheme;
    int workers;
};

std::size_t backward_step(const StepContext& c, double t, const std::vector<double>& next, Layer& out,
                          const std::vector<double>* frozen_y, const std::vector<double>* frozen_z)
{
    const std::size_t n = c.kernel.vertex_count();
    out.y.resize(n);
    out.z.resize(n);
    std::vector<std::size_t> inner(n, 0);
    auto body = [&](std::size_t v) {
        const int x = static_cast<int>(v);
        if (c.p.killed && c.kernel.boundary[v]) {
            out.y[v] = c.p.boundary(t, x);
            out.z[v] = 0.0;
            return;
        }
        const auto targets = c.kernel.targets_of(x);
        const auto dw = c.kernel.dW_of(x);
        const double prob = c.kernel.probability(x);
        double ey = 0.0;
        double ez = 0.0;
        for (std::size_t j = 0; j < targets.size(); ++j) {
            const double yn = next[static_cast<std::size_t>(targets[j])];
            ey += prob * yn;
            ez += prob * yn * dw[j];
        }
        const double dqv = c.kernel.dQV[v];
        const double z = ez / dqv;
        out.z[v] = z;
        if (frozen_y) {
            const double yf = (*frozen_y)[v];
            const double zf = (*frozen_z)[v];
            out.y[v] = ey + c.p.g(t, x, yf) * c.dt + c.p.f(t, x, yf, zf) * dqv;
            return;
        }
        if (c.scheme == Scheme::explicit_euler) {
            out.y[v] = ey + c.p.g(t, x, ey) * c.dt + c.p.f(t, x, ey, z) * dqv;
            return;
        }
        double y = ey;
        for (std::size_t it = 1; it <= 50; ++it) {
            const double yn = ey + c.p.g(t, x, y) * c.dt + c.p.f(t, x, y, z) * dqv;
            const double change = std::abs(yn - y);
            y = yn;
            if (change <= 1e-12 * std::max(1.0, std::abs(y))) {
                inner[v] = it;
                out.y[v] = y;
                return;
            }
        }
        std::ostringstream s;
        s << "picard-in-step did not converge at t = " << t << ", vertex " << x << " (50 iterations, last y = " << y
          << "); reduce the step or the driver constants";
        throw SchemeError(s.str());
    };
    if (c.workers > 1 && n >= 2048) {
        parallel_for(n, c.workers, body);
    } else {
        for (std::size_t v = 0; v < n; ++v) {
            body(v);
        }
    }
    return *std::max_element(inner.begin(), inner.end());
}

/// Shared backward sweep. When `frozen` is set it holds the full previous iterate.
BsdeSolution sweep(const BsdeProblem& p, const StepKernel& kernel, const DpOptions& opt, const BsdeSolution* frozen)
{
    check_problem(p, kernel);
    BsdeSolution sol;
    sol.level = kernel.level;
    sol.dt = opt.dt.value_or(kernel.dt);
    sol.scheme = opt.scheme;
    sol.step_count = step_count_for(p.horizon, sol.dt);
    if (std::abs(static_cast<double>(sol.step_count) * sol.dt - p.horizon) > 1e-9 * p.horizon) {
        sol.warnings.push_back("horizon is not a multiple of the step; the grid ends at " +
                               std::to_string(static_cast<double>(sol.step_count) * sol.dt));
    }
    if (!(sol.dt * p.K0 < 1.0)) {
        std::ostringstream s;
        s << "step " << sol.dt << " violates dt * K0 < 1 for K0 = " << p.K0;
        throw SchemeError(s.str());
    }
    if (opt.spot_check) {
        spot_check(p, kernel, p.horizon, sol.warnings);
    }
    const std::size_t K = sol.step_count;
    std::vector<char> keep(K + 1, opt.keep_steps.empty() ? 1 : 0);
    for (std::size_t s : opt.keep_steps) {
        if (s > K) {
            throw UsageError("requested layer " + std::to_string(s) + " beyond the last step " + std::to_string(K));
        }
        keep[s] = 1;
    }
    const std::size_t stored = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), 1));
    const std::size_t n = kernel.vertex_count();
    constexpr std::size_t kMaxStored = std::size_t{1} << 28;
    if (stored * n * 2 > kMaxStored) {
        throw CapacityError("storing " + std::to_string(stored) + " layers of " + std::to_string(n) +
                            " vertices exceeds the memory guard; pass explicit layers");
    }
    sol.steps.reserve(stored);
    sol.Y.reserve(stored);
    sol.Z.reserve(stored);

    StepContext ctx{p, kernel, sol.dt, opt.scheme, opt.workers};
    Layer current;
    current.y = p.terminal;
    current.z.assign(n, 0.0);
    std::vector<std::pair<std::size_t, Layer>> kept;
    if (keep[K]) {
        kept.emplace_back(K, current);
    }
    Layer previous;
    for (std::size_t k = K; k-- > 0;) {
        std::swap(previous, current);
        const double t = static_cast<double>(k) * sol.dt;
        const std::vector<double>* fy = frozen ? &frozen->Y[k] : nullptr;
        const std::vector<double>* fz = frozen ? &frozen->Z[k] : nullptr;
        sol.iterations = std::max(sol.iterations, backward_step(ctx, t, previous.y, current, fy, fz));
        if (keep[k]) {
            kept.emplace_back(k, current);
        }
    }
    std::reverse(kept.begin(), kept.end());
    for (auto& [s, layer] : kept) {
        sol.steps.push_back(s);
        sol.Y.push_back(std::move(layer.y));
        sol.Z.push_back(std::move(layer.z));
    }
    return sol;
}

}  // namespace

BsdeSolution solve_dp(const BsdeProblem& p, const StepKernel& kernel, const DpOptions& opt)
{
    return sweep(p, kernel, opt, nullptr);
}

double contraction_constant(double K0, double K1, BetaWeights w)
{
    if (w.beta0 < 1.0 || w.beta1 < 1.0) {
        throw UsageError("beta weights must be at least 1");
    }
    return std::sqrt(K0 * K0 / w.beta0 + K1 * K1 / w.beta1);
}

double vbeta_norm(const std::vector<PathSample>& paths, double dt,
                  const std::function<double(std::size_t, int)>& y, const std::function<double(std::size_t, int)>& z,
                  BetaWeights w)
{
    if (paths.empty()) {
        throw UsageError("no paths");
    }
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    auto log_add = [](double a, double b) {
        if (a == neg_inf) {
            return b;
        }
        if (b == neg_inf) {
            return a;
        }
        const double m = std::max(a, b);
        return m + std::log(std::exp(a - m) + std::exp(b - m));
    };
    // log of each path's squared norm, then a log-domain average.
    std::vector<double> logs;
    logs.reserve(paths.size());
    for (const auto& path : paths) {
        double sup = neg_inf;
        double integral = neg_inf;
        const std::size_t end = std::min(path.steps, path.hit_step.value_or(path.steps));
        for (std::size_t k = 0; k <= end; ++k) {
            const int x = path.vertices[k];
            const double weight = 2.0 * w.beta0 * static_cast<double>(k) * dt + 2.0 * w.beta1 * path.cumQV[k];
            const double yk = y(k, x);
            const double ly = yk != 0.0 ? 2.0 * std::log(std::abs(yk)) + weight : neg_inf;
            sup = std::max(sup, ly);
            if (k == end) {
                break;
            }
            const double zk = z(k, x);
            const double dq = path.dQV[k];
            integral = log_add(integral, ly + std::log(dt));
            const double yz = yk * yk + zk * zk;
            if (yz > 0.0) {
                integral = log_add(integral, std::log(yz) + weight + std::log(dq));
            }
        }
        logs.push_back(log_add(sup, integral));
    }
    double total = neg_inf;
    for (double l : logs) {
        total = log_add(total, l);
    }
    if (total == neg_inf) {
        return 0.0;
    }
    return std::exp(0.5 * (total - std::log(static_cast<double>(paths.size()))));
}

PicardResult picard_iterate(const BsdeProblem& p, const StepKernel& kernel, const LevelGraph& g,
                            const PicardOptions& opt)
{
    DpOptions dp;
    dp.scheme = Scheme::picard_in_step;
    dp.dt = opt.dt;
    dp.workers = opt.workers;

    BsdeSolution current;
    if (opt.init == PicardOptions::Init::zero) {
        current = sweep(p, kernel, dp, nullptr);
        for (auto& row : current.Y) {
            std::fill(row.begin(), row.end(), 0.0);
        }
    } else {
        BsdeProblem free = p;
        free.g = [](double, int, double) { return 0.0; };
        free.f = [](double, int, double, double) { return 0.0; };
        DpOptions quiet = dp;
        quiet.spot_check = false;
        current = sweep(free, kernel, quiet, nullptr);
    }
    for (auto& row : current.Z) {
        std::fill(row.begin(), row.end(), 0.0);
    }

    WalkConfig wc;
    wc.level = kernel.level;
    wc.start = StartSpec::hausdorff(g);
    wc.horizon = static_cast<double>(current.step_count) * kernel.dt;
    wc.seed = opt.seed;
    wc.path_count = opt.paths;
    wc.killed = p.killed;
    wc.workers = opt.workers;
    const auto paths = simulate_paths(wc, kernel);

    PicardResult result;
    DpOptions inner = dp;
    inner.spot_check = false;
    for (std::size_t n = 0; n < opt.iterations; ++n) {
        BsdeSolution next = sweep(p, kernel, inner, &current);
        const auto dy = [&](std::size_t k, int x) {
            return next.Y[k][static_cast<std::size_t>(x)] - current.Y[k][static_cast<std::size_t>(x)];
        };
        const auto dz = [&](std::size_t k, int x) {
            return next.Z[k][static_cast<std::size_t>(x)] - current.Z[k][static_cast<std::size_t>(x)];
        };
        result.distances.push_back(vbeta_norm(paths, next.dt, dy, dz, opt.beta));
        if (opt.keep_iterates) {
            result.iterates.push_back(current);
        }
        current = std::move(next);
    }
    for (std::size_t n = 1; n < result.distances.size(); ++n) {
        const double prev = result.distances[n - 1];
        result.ratios.push_back(prev > 0.0 ? result.distances[n] / prev : 0.0);
    }
    if (opt.keep_iterates) {
        result.iterates.push_back(current);
    }
    result.solution = std::move(current);
    return result;
}

namespace {

LinearCoefficients require_linear(const BsdeProblem& p)
{
    if (!p.linear) {
        throw UsageError("the closed form needs drivers g = a y and f = b y + c z");
    }
    return *p.linear;
}

/// E_x[Phi_tau Psi] from step `from` to the terminal step, by forward propagation.
double propagate(const BsdeProblem& p, const StepKernel& kernel, LinearCoefficients lc, double dt, std::size_t K,
                 std::size_t from, int start)
{
    const std::size_t n = kernel.vertex_count();
    if (p.killed && kernel.boundary[static_cast<std::size_t>(start)] && from < K) {
        return p.boundary(static_cast<double>(from) * dt, start);
    }
    std::vector<double> rho(n, 0.0);
    std::vector<double> next(n, 0.0);
    rho[static_cast<std::size_t>(start)] = 1.0;
    double absorbed = 0.0;
    for (std::size_t k = from; k < K; ++k) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v) {
            const double mass = rho[v];
            if (mass == 0.0) {
                continue;
            }
            const int x = static_cast<int>(v);
            const auto targets = kernel.targets_of(x);
            const auto dw = kernel.dW_of(x);
            const double prob = kernel.probability(x);
            const double base = 1.0 + lc.a * dt + lc.b * kernel.dQV[v];
            for (std::size_t j = 0; j < targets.size(); ++j) {
                next[static_cast<std::size_t>(targets[j])] += mass * prob * (base + lc.c * dw[j]);
            }
        }
        std::swap(rho, next);
        if (p.killed && k + 1 < K) {
            for (int i = 0; i < 3; ++i) {
                absorbed += rho[static_cast<std::size_t>(i)] * p.boundary(static_cast<double>(k + 1) * dt, i);
                rho[static_cast<std::size_t>(i)] = 0.0;
            }
        }
    }
    double value = absorbed;
    for (std::size_t v = 0; v < n; ++v) {
        value += rho[v] * p.terminal[v];
    }
    return value;
}

}  // namespace

LinearClosedForm linear_closed_form_exact(const BsdeProblem& p, const StepKernel& kernel, std::vector<int> starts,
                                          std::optional<double> dt_override)
{
    check_problem(p, kernel);
    const LinearCoefficients lc = require_linear(p);
    const double dt = dt_override.value_or(kernel.dt);
    const std::size_t K = step_count_for(p.horizon, dt);
    if (starts.empty()) {
        starts.resize(kernel.vertex_count());
        std::iota(starts.begin(), starts.end(), 0);
    }
    LinearClosedForm out;
    out.starts = starts;
    // Layer-1 values at every vertex give Z_0 as the covariation ratio.
    std::vector<double> y1(kernel.vertex_count());
    if (K >= 1) {
        for (std::size_t v = 0; v < y1.size(); ++v) {
            y1[v] = propagate(p, kernel, lc, dt, K, 1, static_cast<int>(v));
        }
    }
    for (int x : starts) {
        if (x < 0 || static_cast<std::size_t>(x) >= kernel.vertex_count()) {
            throw UsageError("start vertex " + std::to_string(x) + " out of range");
        }
        out.y0.push_back(propagate(p, kernel, lc, dt, K, 0, x));
        double z = 0.0;
        if (K >= 1 && !(p.killed && kernel.boundary[static_cast<std::size_t>(x)])) {
            const auto targets = kernel.targets_of(x);
            const auto dw = kernel.dW_of(x);
            for (std::size_t j = 0; j < targets.size(); ++j) {
                z += kernel.probability(x) * y1[static_cast<std::size_t>(targets[j])] * dw[j];
            }
            z /= kernel.dQV[static_cast<std::size_t>(x)];
        }
        out.z0.push_back(z);
    }
    return out;
}

McEstimate linear_closed_form_mc(const BsdeProblem& p, const StepKernel& kernel, int start, std::size_t paths,
                                 std::uint64_t seed, int workers, PhiForm form, std::optional<double> dt_override)
{
    check_problem(p, kernel);
    const LinearCoefficients lc = require_linear(p);
    if (paths < 2) {
        throw UsageError("need at least two paths");
    }
    const double dt = dt_override.value_or(kernel.dt);
    const std::size_t K = step_count_for(p.horizon, dt);
    WalkConfig wc;
    wc.level = kernel.level;
    wc.start = StartSpec::at(start);
    wc.seed = seed;
    wc.killed = p.killed;
    std::vector<double> values(paths, 0.0);
    parallel_for(paths, workers, [&](std::size_t i) {
        if (p.killed && kernel.boundary[static_cast<std::size_t>(start)]) {
            values[i] = p.boundary(0.0, start);
            return;
        }
        double phi = 1.0;
        double w = 0.0;
        double qv = 0.0;
        int last = start;
        const auto [steps, hit] = walk_path(kernel, wc, i, K, [&](std::size_t, int, int y, double dw, double dq) {
            if (form == PhiForm::discrete) {
                phi *= 1.0 + lc.a * dt + lc.b * dq + lc.c * dw;
            } else {
                w += dw;
                qv += dq;
            }
            last = y;
            return true;
        });
        if (form == PhiForm::continuum) {
            phi = std::exp(lc.a * dt * static_cast<double>(steps) + (lc.b - 0.5 * lc.c * lc.c) * qv + lc.c * w);
        }
        const bool stopped = hit && *hit < K;
        const double psi = stopped ? p.boundary(static_cast<double>(*hit) * dt, last)
                                   : p.terminal[static_cast<std::size_t>(last)];
        values[i] = phi * psi;
    });
    McEstimate est;
    const double n = static_cast<double>(paths);
    est.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) {
        var += (v - est.mean) * (v - est.mean);
    }
    var /= n - 1.0;
    est.standard_error = std::sqrt(var / n);
    est.ci_low = est.mean - 1.96 * est.standard_error;
    est.ci_high = est.mean + 1.96 * est.standard_error;
    std::vector<double> mags(values.size());
    std::transform(values.begin(), values.end(), mags.begin(), [](double v) { return std::abs(v); });
    const double total = std::accumulate(mags.begin(), mags.end(), 0.0);
    const std::size_t top = std::max<std::size_t>(1, paths / 100);
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(top - 1), mags.end(), std::greater<>());
    est.top_share = total > 0.0 ? std::accumulate(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(top), 0.0) / total
                                : 0.0;
    est.unstable = est.top_share > 0.5;
    return est;
}

MonotonicityReport monotonicity_check(const BsdeProblem& p, BetaWeights w, std::size_t samples, std::uint64_t seed,
                                      bool probe_only)
{
    if (!p.kappa0 && !p.kappa1) {
        throw UsageError("monotonicity check needs declared kappa0 and/or kappa1");
    }
    MonotonicityReport r;
    r.samples = samples;
    r.worst_margin_g = std::numeric_limits<double>::infinity();
    r.worst_margin_f = std::numeric_limits<double>::infinity();
    const std::size_t n = p.terminal.empty() ? 1 : p.terminal.size();
    PathRng rng(seed, 0x4D0707);
    for (std::size_t s = 0; s < samples; ++s) {
        const double t = p.horizon * rng.uniform();
        const int x = static_cast<int>(rng.below(static_cast<std::uint32_t>(n)));
        const double y = 20.0 * rng.uniform() - 10.0;
        const double yb = 20.0 * rng.uniform() - 10.0;
        const double z = 20.0 * rng.uniform() - 10.0;
        const double d = y - yb;
        if (d == 0.0) {
            continue;
        }
        if (p.kappa0) {
            const double m = (-*p.kappa0 * d * d - d * (p.g(t, x, y) - p.g(t, x, yb))) / (d * d);
            r.worst_margin_g = std::min(r.worst_margin_g, m);
        }
        if (p.kappa1) {
            const double m = (-*p.kappa1 * d * d - d * (p.f(t, x, y, z) - p.f(t, x, yb, z))) / (d * d);
            r.worst_margin_f = std::min(r.worst_margin_f, m);
        }
    }
    constexpr double tol = 1e-9;
    std::ostringstream detail;
    if (p.kappa0) {
        r.beta_margin0 = w.beta0 - *p.kappa0;
        if (r.worst_margin_g < -tol) {
            r.passed = false;
            detail << "g violates the kappa0 = " << *p.kappa0 << " condition (worst margin " << r.worst_margin_g
                   << "). ";
        }
        if (!(r.beta_margin0 > 0.0)) {
            r.passed = false;
            detail << "beta0 - kappa0 = " << r.beta_margin0 << " is not positive. ";
        }
    }
    if (p.kappa1) {
        r.beta_margin1 = w.beta1 - *p.kappa1 + p.K1 * p.K1 / 2.0;
        if (r.worst_margin_f < -tol) {
            r.passed = false;
            detail << "f violates the kappa1 = " << *p.kappa1 << " condition (worst margin " << r.worst_margin_f
                   << "). ";
        }
        if (!(r.beta_margin1 > 0.0)) {
            r.passed = false;
            detail << "beta1 - kappa1 + K1^2/2 = " << r.beta_margin1 << " is not positive. ";
        }
    }
    r.detail = detail.str();
    if (!r.passed && !probe_only) {
        throw DeclaredConstantError(r.detail);
    }
    return r;
}

}  // namespace gasket

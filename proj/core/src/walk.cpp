#include "gasket/walk.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "gasket/errors.hpp"
#include "gasket/harmonic.hpp"
#include "gasket/parallel.hpp"

namespace gasket {

double diffusion_time_step(int level)
{
    if (level < 0) {
        throw UsageError("level must be non-negative");
    }
    return std::pow(5.0, -level) / 3.0;
}

namespace {

std::array<std::vector<double>, 3> coordinate_tables(const LevelGraph& g)
{
    std::array<std::vector<double>, 3> h;
    for (int i = 0; i < 3; ++i) {
        if (g.level() <= 8) {
            BoundaryTriple<Rational> e{Rational(0), Rational(0), Rational(0)};
            e[static_cast<std::size_t>(i)] = 1;
            const auto exact = harmonic_extend_to_level<Rational>(e, g);
            h[static_cast<std::size_t>(i)].reserve(exact.size());
            for (const auto& q : exact) {
                h[static_cast<std::size_t>(i)].push_back(q.get_d());
            }
        } else {
            BoundaryTriple<double> e{0.0, 0.0, 0.0};
            e[static_cast<std::size_t>(i)] = 1.0;
            h[static_cast<std::size_t>(i)] = harmonic_extend_to_level<double>(e, g);
        }
    }
    return h;
}

Eigen::Vector3d oriented(Eigen::Vector3d e)
{
    constexpr double tie = 1e-12;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(e[i]) > tie) {
            const bool flip = i == 0 ? e[0] > 0.0 : e[i] < 0.0;
            return flip ? Eigen::Vector3d(-e) : e;
        }
    }
    return e;
}

}  // namespace

StepKernel build_step_kernel(const LevelGraph& g)
{
    const auto h = coordinate_tables(g);
    const std::size_t n = g.vertex_count();
    StepKernel k;
    k.level = g.level();
    k.dt = diffusion_time_step(g.level());
    k.offsets.assign(n + 1, 0);
    k.dQV.assign(n, 0.0);
    k.direction.assign(n, Vec3<double>{0.0, 0.0, 0.0});
    k.residual_fraction.assign(n, 0.0);
    k.boundary.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        k.offsets[v + 1] = k.offsets[v] + g.neighbors(static_cast<int>(v)).size();
    }
    k.targets.resize(k.offsets[n]);
    k.dW.resize(k.offsets[n]);
    k.dh.resize(k.offsets[n]);

    for (std::size_t v = 0; v < n; ++v) {
        k.boundary[v] = g.is_boundary(static_cast<int>(v)) ? 1 : 0;
        const auto nb = g.neighbors(static_cast<int>(v));
        const double p = 1.0 / static_cast<double>(nb.size());
        Eigen::Vector3d mean = Eigen::Vector3d::Zero();
        double second = 0.0;
        for (std::size_t j = 0; j < nb.size(); ++j) {
            const std::size_t e = k.offsets[v] + j;
            const auto y = static_cast<std::size_t>(nb[j]);
            k.targets[e] = nb[j];
            for (std::size_t i = 0; i < 3; ++i) {
                k.dh[e][i] = h[i][y] - h[i][v];
                mean[static_cast<Eigen::Index>(i)] += p * k.dh[e][i];
                second += p * k.dh[e][i] * k.dh[e][i];
            }
        }
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (std::size_t j = 0; j < nb.size(); ++j) {
            const auto& d = k.dh[k.offsets[v] + j];
            const Eigen::Vector3d c = Eigen::Vector3d(d[0], d[1], d[2]) - mean;
            cov += p * c * c.transpose();
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
        const Eigen::Vector3d dir = oriented(eig.eigenvectors().col(2));
        const double lambda = dir.dot(cov * dir);
        k.dQV[v] = second / 6.0;
        const double trace = cov.trace();
        k.residual_fraction[v] = trace > 0.0 ? std::max(0.0, (trace - lambda) / trace) : 0.0;
        k.direction[v] = {dir[0], dir[1], dir[2]};
        const double kappa = lambda > 0.0 ? std::sqrt(k.dQV[v] / lambda) : 0.0;
        for (std::size_t j = 0; j < nb.size(); ++j) {
            const std::size_t e = k.offsets[v] + j;
            const auto& d = k.dh[e];
            k.dW[e] = kappa * (Eigen::Vector3d(d[0], d[1], d[2]) - mean).dot(dir);
        }
    }
    return k;
}

StartSpec StartSpec::from_weights(std::span<const double> weights)
{
    StartSpec s;
    s.cumulative.resize(weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0)) {
            throw UsageError("start weights must be non-negative");
        }
        total += weights[i];
        s.cumulative[i] = total;
    }
    if (!(total > 0.0)) {
        throw UsageError("start weights sum to zero");
    }
    for (auto& c : s.cumulative) {
        c /= total;
    }
    s.cumulative.back() = 1.0;
    return s;
}

StartSpec StartSpec::hausdorff(const LevelGraph& g)
{
    std::vector<double> w(g.vertex_count(), 0.0);
    for (const auto& cell : g.cells()) {
        for (int c : cell.corners) {
            w[static_cast<std::size_t>(c)] += 1.0;
        }
    }
    return from_weights(w);
}

StartSpec StartSpec::in_cell(const CellWord& word, const LevelGraph& g)
{
    if (word.length() > g.level()) {
        throw UsageError("start word " + word.str() + " is longer than the level " + std::to_string(g.level()));
    }
    std::vector<double> w(g.vertex_count(), 0.0);
    for (const auto& cell : g.cells()) {
        if (cell.word.str().compare(0, word.str().size(), word.str()) == 0) {
            for (int c : cell.corners) {
                w[static_cast<std::size_t>(c)] += 1.0;
            }
        }
    }
    return from_weights(w);
}

StartSpec StartSpec::parse(const std::string& text, const LevelGraph& g)
{
    auto vertex_id = [&](const std::string& s) {
        std::size_t used = 0;
        int v = -1;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || v < 0 || static_cast<std::size_t>(v) >= g.vertex_count()) {
            throw UsageError("invalid start vertex '" + s + "'");
        }
        return v;
    };
    if (text == "mu") {
        return hausdorff(g);
    }
    if (text.rfind("vertex:", 0) == 0) {
        return at(vertex_id(text.substr(7)));
    }
    if (text.rfind("word:", 0) == 0) {
        return in_cell(CellWord(text.substr(5)), g);
    }
    return at(vertex_id(text));
}

int draw_start(const StartSpec& start, PathRng& rng)
{
    if (start.cumulative.empty()) {
        return start.vertex;
    }
    const double u = rng.uniform();
    const auto it = std::upper_bound(start.cumulative.begin(), start.cumulative.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - start.cumulative.begin(),
                                                     static_cast<std::ptrdiff_t>(start.cumulative.size()) - 1));
}

PathSample simulate_path(const WalkConfig& cfg, const StepKernel& kernel, std::uint64_t index)
{
    PathSample s;
    const std::size_t n = cfg.steps();
    s.vertices.reserve(n + 1);
    s.dW.reserve(n);
    s.dQV.reserve(n);
    s.cumQV.reserve(n + 1);
    s.cumQV.push_back(0.0);
    int last = -1;
    const auto [steps, hit] = walk_path(kernel, cfg, index, n, [&](std::size_t, int x, int y, double dw, double dq) {
        s.vertices.push_back(x);
        s.dW.push_back(dw);
        s.dQV.push_back(dq);
        s.cumQV.push_back(s.cumQV.back() + dq);
        last = y;
        return true;
    });
    if (last < 0) {
        PathRng rng(cfg.seed, index);
        last = draw_start(cfg.start, rng);
    }
    s.vertices.push_back(last);
    s.steps = steps;
    s.hit_step = hit;
    return s;
}

std::vector<PathSample> simulate_paths(const WalkConfig& cfg, const StepKernel& kernel)
{
    std::vector<PathSample> out(cfg.path_count);
    parallel_for(cfg.path_count, cfg.workers, [&](std::size_t i) { out[i] = simulate_path(cfg, kernel, i); });
    return out;
}

std::vector<std::vector<double>> quadratic_variation_at(const WalkConfig& cfg, const StepKernel& kernel,
                                                        std::span<const double> times)
{
    std::vector<std::size_t> marks;
    for (double t : times) {
        if (t < 0.0) {
            throw UsageError("times must be non-negative");
        }
        marks.push_back(cfg.steps_for(t));
    }
    if (!std::is_sorted(marks.begin(), marks.end())) {
        throw UsageError("times must be increasing");
    }
    const std::size_t last = marks.empty() ? 0 : marks.back();
    std::vector<std::vector<double>> out(cfg.path_count, std::vector<double>(marks.size(), 0.0));
    parallel_for(cfg.path_count, cfg.workers, [&](std::size_t p) {
        auto& row = out[p];
        std::size_t j = 0;
        double qv = 0.0;
        while (j < marks.size() && marks[j] == 0) {
            row[j++] = 0.0;
        }
        walk_path(kernel, cfg, p, last, [&](std::size_t k, int, int, double, double dq) {
            qv += dq;
            while (j < marks.size() && marks[j] == k + 1) {
                row[j++] = qv;
            }
            return true;
        });
        // Killed paths keep their stopped value.
        for (; j < marks.size(); ++j) {
            row[j] = qv;
        }
    });
    return out;
}

ExitTimeStats exit_time_stats(const WalkConfig& cfg, const StepKernel& kernel)
{
    if (!cfg.killed) {
        throw UsageError("exit time statistics need a killed walk");
    }
    std::vector<double> times(cfg.path_count, -1.0);
    parallel_for(cfg.path_count, cfg.workers, [&](std::size_t p) {
        const auto [steps, hit] = walk_path(kernel, cfg, p, cfg.steps(), [](auto...) { return true; });
        (void)steps;
        if (hit) {
            times[p] = static_cast<double>(*hit) * kernel.dt;
        }
    });
    ExitTimeStats st;
    st.paths = cfg.path_count;
    double sum = 0.0;
    double sq = 0.0;
    std::size_t hits = 0;
    for (double t : times) {
        if (t >= 0.0) {
            ++hits;
            sum += t;
            sq += t * t;
        }
    }
    st.hit_fraction = cfg.path_count ? static_cast<double>(hits) / static_cast<double>(cfg.path_count) : 0.0;
    if (hits > 0) {
        st.mean_time = sum / static_cast<double>(hits);
        st.variance_time = hits > 1 ? std::max(0.0, (sq - sum * st.mean_time) / static_cast<double>(hits - 1)) : 0.0;
        st.standard_error = std::sqrt(st.variance_time / static_cast<double>(hits));
        st.ci_low = st.mean_time - 1.96 * st.standard_error;
        st.ci_high = st.mean_time + 1.96 * st.standard_error;
    }
    if (st.hit_fraction < 0.99) {
        st.warning = "only " + std::to_string(hits) + " of " + std::to_string(cfg.path_count) +
                     " paths hit V_0 before the horizon; statistics are conditional on hitting";
    }
    return st;
}

std::vector<double> occupation_histogram(const WalkConfig& cfg, const StepKernel& kernel, const LevelGraph& g,
                                         double t, int cell_level)
{
    if (cell_level < 0 || cell_level > g.level()) {
        throw UsageError("histogram level must lie in [0, " + std::to_string(g.level()) + "]");
    }
    // Level-k cells containing each vertex.
    std::vector<std::vector<std::size_t>> owners(g.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        std::set<std::size_t> s;
        for (int c : g.cells_of_vertex(static_cast<int>(v))) {
            const auto& w = g.cells()[static_cast<std::size_t>(c)].word.str();
            s.insert(CellWord(w.substr(0, static_cast<std::size_t>(cell_level))).index());
        }
        owners[v].assign(s.begin(), s.end());
    }
    WalkConfig free = cfg;
    free.killed = false;
    const std::size_t n = free.steps_for(t);
    std::vector<int> finals(cfg.path_count, 0);
    parallel_for(cfg.path_count, cfg.workers, [&](std::size_t p) {
        int last = -1;
        walk_path(kernel, free, p, n, [&](std::size_t, int, int y, double, double) {
            last = y;
            return true;
        });
        if (last < 0) {
            PathRng rng(free.seed, p);
            last = draw_start(free.start, rng);
        }
        finals[p] = last;
    });
    std::vector<double> hist(static_cast<std::size_t>(std::pow(3, cell_level) + 0.5), 0.0);
    const double unit = cfg.path_count ? 1.0 / static_cast<double>(cfg.path_count) : 0.0;
    for (int v : finals) {
        const auto& o = owners[static_cast<std::size_t>(v)];
        for (std::size_t c : o) {
            hist[c] += unit / static_cast<double>(o.size());
        }
    }
    return hist;
}

double total_variation(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size()) {
        throw UsageError("total variation of tables of different sizes");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += std::abs(p[i] - q[i]);
    }
    return 0.5 * s;
}

ExpIntEstimate exponential_mean(std::span<const double> log_values, std::uint64_t seed)
{
    ExpIntEstimate est;
    const std::size_t n = log_values.size();
    if (n == 0) {
        throw UsageError("no samples");
    }
    const double shift = *std::max_element(log_values.begin(), log_values.end());
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = std::exp(log_values[i] - shift);
    }
    const double avg = std::accumulate(scaled.begin(), scaled.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double s : scaled) {
        var += (s - avg) * (s - avg);
    }
    var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
    const double scale = std::exp(shift);
    est.log_mean = shift + std::log(avg);
    est.mean = std::exp(est.log_mean);
    est.standard_error = scale * std::sqrt(var / static_cast<double>(n));

    constexpr int resamples = 200;
    std::vector<double> boot(resamples);
    for (int b = 0; b < resamples; ++b) {
        PathRng rng(seed, 0xB0075700ULL + static_cast<std::uint64_t>(b));
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += scaled[rng.below(static_cast<std::uint32_t>(n))];
        }
        boot[static_cast<std::size_t>(b)] = s / static_cast<double>(n);
    }
    std::sort(boot.begin(), boot.end());
    est.ci_low = scale * boot[static_cast<std::size_t>(0.025 * resamples)];
    est.ci_high = scale * boot[static_cast<std::size_t>(0.975 * resamples) - 1];

    std::vector<double> sorted = scaled;
    const std::size_t top = std::max<std::size_t>(1, n / 100);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(top - 1), sorted.end(),
                     std::greater<>());
    const double top_sum = std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(top), 0.0);
    est.top_share = top_sum / (avg * static_cast<double>(n));
    est.unstable = est.top_share > 0.5 || (est.ci_high - est.ci_low) > est.mean;
    return est;
}

ExpIntEstimate expint_estimate(const WalkConfig& cfg, const StepKernel& kernel, double beta, double t)
{
    const double times[1] = {t};
    const auto qv = quadratic_variation_at(cfg, kernel, times);
    std::vector<double> logs(qv.size());
    for (std::size_t i = 0; i < qv.size(); ++i) {
        logs[i] = beta * qv[i][0];
    }
    return exponential_mean(logs, cfg.seed);
}

}  // namespace gasket

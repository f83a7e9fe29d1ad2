#include "gasket/feynman_kac.hpp"

#include <algorithm>
#include <cmath>

#include "gasket/errors.hpp"

namespace gasket {

std::vector<FkProbe> probe_grid(int probe_level, const std::vector<double>& times)
{
    const LevelGraph g = build_level_graph(probe_level);
    std::vector<FkProbe> out;
    for (double t : times) {
        for (const auto& v : g.vertices()) {
            if (!v.is_boundary) {
                out.push_back({t, v.coords});
            }
        }
    }
    return out;
}

FkReport feynman_kac_check(const ProblemSpec& spec, const std::vector<int>& levels, const std::vector<FkProbe>& probes,
                           int workers)
{
    if (levels.empty() || probes.empty()) {
        throw UsageError("feynman-kac check needs levels and probes");
    }
    ProblemSpec killed = spec;
    killed.killed = true;
    FkReport report;
    report.probes = probes;
    for (int m : levels) {
        const LevelGraph g = build_level_graph(m);
        const StepKernel kernel = build_step_kernel(g);
        FkLevelResult r;
        r.level = m;
        std::vector<std::size_t> steps;
        std::vector<int> vertices;
        for (const auto& pr : probes) {
            const double exact = pr.t / kernel.dt;
            const double rounded = std::round(exact);
            if (std::abs(exact - rounded) > 1e-6 || pr.t < 0.0 || pr.t > spec.horizon) {
                throw UsageError("probe time " + std::to_string(pr.t) + " is not a level-" + std::to_string(m) +
                                 " grid time in [0, T]");
            }
            const int v = g.find_vertex(pr.point);
            if (v < 0) {
                throw UsageError("probe point is not a level-" + std::to_string(m) + " vertex");
            }
            steps.push_back(static_cast<std::size_t>(rounded));
            vertices.push_back(v);
        }
        std::vector<std::size_t> keep = steps;
        std::sort(keep.begin(), keep.end());
        keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

        PdeOptions po;
        po.keep_steps = keep;
        const WeakPdeSolution u = solve_weak_pde(make_pde_problem(killed, g), g, po);

        DpOptions dp;
        dp.keep_steps = keep;
        dp.workers = workers;
        const BsdeSolution y = solve_dp(make_bsde_problem(killed, g), kernel, dp);
        r.warnings = y.warnings;

        for (std::size_t i = 0; i < probes.size(); ++i) {
            const double a = u.u_at(steps[i])[static_cast<std::size_t>(vertices[i])];
            const double b = y.y_at(steps[i])[static_cast<std::size_t>(vertices[i])];
            r.pde.push_back(a);
            r.bsde.push_back(b);
            r.error.push_back(std::abs(a - b));
            r.sup_error = std::max(r.sup_error, std::abs(a - b));
        }
        report.levels.push_back(std::move(r));
    }
    report.strictly_decreasing = true;
    for (std::size_t i = 1; i < report.levels.size(); ++i) {
        if (!(report.levels[i].sup_error < report.levels[i - 1].sup_error)) {
            report.strictly_decreasing = false;
        }
    }
    return report;
}

}  // namespace gasket

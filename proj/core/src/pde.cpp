#include "gasket/pde.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gasket/errors.hpp"
#include "gasket/harmonic.hpp"
#include "gasket/measures.hpp"
#include "gasket/walk.hpp"

namespace gasket {

VertexMasses assemble_masses(const LevelGraph& g)
{
    VertexMasses m;
    m.mu.assign(g.vertex_count(), 0.0);
    m.nu.assign(g.vertex_count(), 0.0);
    const auto frames = build_gradient_frames(g);
    const double cell_mu = std::pow(3.0, -g.level()) / 3.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        for (int v : g.cells()[c].corners) {
            m.mu[static_cast<std::size_t>(v)] += cell_mu;
            m.nu[static_cast<std::size_t>(v)] += frames[c].kusuoka_mass / 3.0;
        }
    }
    return m;
}

ExactVertexMasses assemble_masses_exact(const LevelGraph& g)
{
    const CellMeasure mu = hausdorff_measure_table(g.level());
    const CellMeasure nu = kusuoka_measure_table(g.level());
    ExactVertexMasses m;
    m.mu.assign(g.vertex_count(), Rational(0));
    m.nu.assign(g.vertex_count(), Rational(0));
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        for (int v : g.cells()[c].corners) {
            m.mu[static_cast<std::size_t>(v)] += mu.masses[c] / 3;
            m.nu[static_cast<std::size_t>(v)] += nu.masses[c] / 3;
        }
    }
    return m;
}

WeakPdeProblem make_pde_problem(const ProblemSpec& spec, const LevelGraph& g)
{
    WeakPdeProblem p;
    p.g = [law = spec.g](double, int, double u) { return law(u); };
    p.f = [law = spec.f, c = spec.z_slope](double, int, double u, double z) { return law(u) + c * z; };
    p.lip_g = spec.g.lipschitz();
    p.lip_f = spec.f.lipschitz();
    p.boundary = [b = spec.boundary](double t, int i) { return b(t, i); };
    p.terminal = spec.terminal.table(g);
    p.horizon = spec.horizon;
    return p;
}

const std::vector<double>& WeakPdeSolution::u_at(std::size_t step) const
{
    const auto it = std::lower_bound(steps.begin(), steps.end(), step);
    if (it == steps.end() || *it != step) {
        throw UsageError("layer " + std::to_string(step) + " was not stored");
    }
    return u[static_cast<std::size_t>(it - steps.begin())];
}

WeakPdeSolution solve_weak_pde(const WeakPdeProblem& p, const LevelGraph& g, const PdeOptions& opt)
{
    const std::size_t n = g.vertex_count();
    if (!p.g || !p.f || !p.boundary) {
        throw UsageError("problem functions are not set");
    }
    if (p.terminal.size() != n) {
        throw UsageError("terminal table does not match the level-" + std::to_string(g.level()) + " graph");
    }
    WeakPdeSolution sol;
    sol.level = g.level();
    sol.h = p.h.value_or(diffusion_time_step(g.level()));
    if (!(sol.h > 0.0)) {
        throw UsageError("time step must be positive");
    }
    if (!(sol.h * p.lip_g < 1.0) || !(sol.h * p.lip_f < 1.0)) {
        std::ostringstream s;
        s << "time step " << sol.h << " violates h * Lip < 1 (Lip g = " << p.lip_g << ", Lip f = " << p.lip_f << ")";
        throw UsageError(s.str());
    }
    sol.step_count = static_cast<std::size_t>(std::ceil(p.horizon / sol.h - 1e-9));
    const std::size_t K = sol.step_count;
    for (int i = 0; i < 3; ++i) {
        sol.terminal_mismatch =
            std::max(sol.terminal_mismatch, std::abs(p.boundary(p.horizon, i) - p.terminal[static_cast<std::size_t>(i)]));
    }

    const VertexMasses masses = assemble_masses(g);
    const auto frames = build_gradient_frames(g);

    // Interior unknowns are vertices 3..n-1.
    const std::size_t ni = n - 3;
    const double scale = 0.5 * std::pow(5.0 / 3.0, g.level());
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<std::array<double, 3>> boundary_coupling(ni, {0.0, 0.0, 0.0});
    std::vector<double> diag(ni, 0.0);
    for (const auto& [a, b] : g.edges()) {
        for (const auto& [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
            if (x < 3) {
                continue;
            }
            const std::size_t r = static_cast<std::size_t>(x) - 3;
            diag[r] += scale;
            if (y < 3) {
                boundary_coupling[r][static_cast<std::size_t>(y)] -= scale;
            } else {
                trip.emplace_back(static_cast<int>(r), y - 3, -scale);
            }
        }
    }
    for (std::size_t r = 0; r < ni; ++r) {
        trip.emplace_back(static_cast<int>(r), static_cast<int>(r), diag[r] + masses.mu[r + 3] / sol.h);
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(ni), static_cast<Eigen::Index>(ni));
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    if (ni > 0) {
        solver.compute(A);
        if (solver.info() != Eigen::Success) {
            throw AssemblyError("factorisation of the level-" + std::to_string(g.level()) + " operator failed");
        }
    }

    std::vector<char> keep(K + 1, opt.keep_steps.empty() ? 1 : 0);
    for (std::size_t s : opt.keep_steps) {
        if (s > K) {
            throw UsageError("requested layer " + std::to_string(s) + " beyond the last step " + std::to_string(K));
        }
        keep[s] = 1;
    }
    auto gradients_of = [&](const std::vector<double>& u) {
        std::vector<double> grad(g.cell_count());
        for (std::size_t c = 0; c < g.cell_count(); ++c) {
            const auto& k = g.cells()[c].corners;
            grad[c] = discrete_gradient(Vec3<double>{u[static_cast<std::size_t>(k[0])], u[static_cast<std::size_t>(k[1])],
                                                     u[static_cast<std::size_t>(k[2])]},
                                        frames[c], g.level());
        }
        return grad;
    };
    std::vector<std::pair<std::size_t, std::vector<double>>> kept;
    std::vector<std::vector<double>> kept_grad;
    auto store = [&](std::size_t k, const std::vector<double>& u) {
        kept.emplace_back(k, u);
        if (opt.gradients) {
            kept_grad.push_back(gradients_of(u));
        }
    };

    std::vector<double> u = p.terminal;
    for (int i = 0; i < 3; ++i) {
        u[static_cast<std::size_t>(i)] = p.boundary(p.horizon, i);
    }
    if (keep[K]) {
        store(K, u);
    }
    sol.residual.assign(K, 0.0);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(ni));
    Eigen::VectorXd x(static_cast<Eigen::Index>(ni));
    std::vector<double> load(n);
    for (std::size_t k = K; k-- > 0;) {
        const double t_next = static_cast<double>(k + 1) * sol.h;
        const double t = static_cast<double>(k) * sol.h;
        std::fill(load.begin(), load.end(), 0.0);
        for (std::size_t c = 0; c < g.cell_count(); ++c) {
            const auto& corners = g.cells()[c].corners;
            const Vec3<double> cv{u[static_cast<std::size_t>(corners[0])], u[static_cast<std::size_t>(corners[1])],
                                  u[static_cast<std::size_t>(corners[2])]};
            const double z = std::sqrt(2.0) * discrete_gradient(cv, frames[c], g.level());
            for (std::size_t j = 0; j < 3; ++j) {
                const int v = corners[j];
                load[static_cast<std::size_t>(v)] += frames[c].kusuoka_mass / 3.0 * p.f(t_next, v, cv[j], z);
            }
        }
        Vec3<double> phi{p.boundary(t, 0), p.boundary(t, 1), p.boundary(t, 2)};
        for (std::size_t r = 0; r < ni; ++r) {
            const std::size_t v = r + 3;
            const double mu = masses.mu[v];
            double b = mu / sol.h * u[v] + p.g(t_next, static_cast<int>(v), u[v]) * mu + load[v];
            for (std::size_t i = 0; i < 3; ++i) {
                b -= boundary_coupling[r][i] * phi[i];
            }
            rhs[static_cast<Eigen::Index>(r)] = b;
        }
        if (ni > 0) {
            x = solver.solve(rhs);
            if (solver.info() != Eigen::Success) {
                throw AssemblyError("linear solve failed at step " + std::to_string(k));
            }
            sol.residual[k] = (A * x - rhs).lpNorm<Eigen::Infinity>();
        }
        for (std::size_t r = 0; r < ni; ++r) {
            u[r + 3] = x[static_cast<Eigen::Index>(r)];
        }
        for (std::size_t i = 0; i < 3; ++i) {
            u[i] = phi[i];
        }
        if (keep[k]) {
            store(k, u);
        }
    }
    std::reverse(kept.begin(), kept.end());
    std::reverse(kept_grad.begin(), kept_grad.end());
    for (auto& [s, layer] : kept) {
        sol.steps.push_back(s);
        sol.u.push_back(std::move(layer));
    }
    sol.gradient = std::move(kept_grad);
    return sol;
}

}  // namespace gasket

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gasket/graph.hpp"
#include "gasket/problem.hpp"
#include "gasket/rational.hpp"

namespace gasket {

/// Lumped vertex masses: every cell gives a third of its mass to each corner.
struct VertexMasses {
    std::vector<double> mu;
    std::vector<double> nu;
};

VertexMasses assemble_masses(const LevelGraph& g);

struct ExactVertexMasses {
    std::vector<Rational> mu;
    std::vector<Rational> nu;
};

/// Exact variant, limited to the levels of the exact measure tables.
ExactVertexMasses assemble_masses_exact(const LevelGraph& g);

/// Terminal-boundary problem -du/dt = Lu + g(u) mu + f(u, grad u) nu on S \ V_0,
/// u = phi on V_0, u(T) = psi, posed weakly against test functions vanishing on V_0.
struct WeakPdeProblem {
    std::function<double(double t, int x, double u)> g;
    std::function<double(double t, int x, double u, double grad)> f;
    double lip_g = 0.0;
    double lip_f = 0.0;
    std::function<double(double t, int i)> boundary;
    std::vector<double> terminal;
    double horizon = 1.0;
    std::optional<double> h;  ///< defaults to the walk's diffusion step at this level
};

WeakPdeProblem make_pde_problem(const ProblemSpec& spec, const LevelGraph& g);

struct PdeOptions {
    std::vector<std::size_t> keep_steps;  ///< empty stores every layer
    bool gradients = false;               ///< store per-cell gradients for kept layers
};

struct WeakPdeSolution {
    int level = 0;
    double h = 0.0;
    std::size_t step_count = 0;
    std::vector<std::size_t> steps;
    std::vector<std::vector<double>> u;
    std::vector<std::vector<double>> gradient;  ///< per cell, indexed like g.cells()
    std::vector<double> residual;  ///< max-norm residual of the linear solve at each step k < K
    double terminal_mismatch = 0.0;  ///< max_i |phi(T, p_i) - psi(p_i)|

    const std::vector<double>& u_at(std::size_t step) const;
};

/// IMEX backward stepping: (M/h + K) u^k = (M/h) u^{k+1} + g(u^{k+1}) M + F_nu(u^{k+1}) on the
/// interior, u^k = phi(t_k) on V_0. M is the lumped mu mass, K the matrix of E^(m), and
/// F_nu(x) = sum over cells w at x of nu(w)/3 * f(u_x, sqrt(2) * grad_w u): the martingale
/// integrand of u(X) is sqrt(2) times the energy-density gradient.
WeakPdeSolution solve_weak_pde(const WeakPdeProblem& p, const LevelGraph& g, const PdeOptions& opt = {});

}  // namespace gasket

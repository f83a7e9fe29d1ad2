#pragma once

// Dense linear-algebra oracles for the random walk on V_m, built from the graph's adjacency
// only (no step kernel).

#include <Eigen/Dense>

#include <vector>

#include <gasket/graph.hpp>

namespace oracle {

/// Transition matrix of the simple random walk.
inline Eigen::MatrixXd transition_matrix(const gasket::LevelGraph& g)
{
    const auto n = static_cast<Eigen::Index>(g.vertex_count());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
        const auto nb = g.neighbors(static_cast<int>(x));
        for (int y : nb) {
            P(x, y) += 1.0 / static_cast<double>(nb.size());
        }
    }
    return P;
}

/// Expected number of steps to reach V_0 from each vertex off V_0 (absorbing chain solve).
inline std::vector<double> mean_hitting_steps(const gasket::LevelGraph& g)
{
    const Eigen::MatrixXd P = transition_matrix(g);
    const Eigen::Index n = P.rows();
    const Eigen::Index k = n - 3;
    const Eigen::MatrixXd Q = P.bottomRightCorner(k, k);
    const Eigen::VectorXd t = (Eigen::MatrixXd::Identity(k, k) - Q).fullPivLu().solve(Eigen::VectorXd::Ones(k));
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < k; ++i) {
        out[static_cast<std::size_t>(i + 3)] = t[i];
    }
    return out;
}

/// E_x[psi(X_K)] for the free walk, by matrix powers.
inline Eigen::VectorXd heat_extension(const gasket::LevelGraph& g, const std::vector<double>& psi, std::size_t K)
{
    const Eigen::MatrixXd P = transition_matrix(g);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(psi.data(), static_cast<Eigen::Index>(psi.size()));
    for (std::size_t k = 0; k < K; ++k) {
        v = P * v;
    }
    return v;
}

}  // namespace oracle

#pragma once

#include <string>
#include <vector>

#include "gasket/bsde.hpp"
#include "gasket/pde.hpp"

namespace gasket {

struct FkProbe {
    double t = 0.0;
    GasketPoint point;
};

struct FkLevelResult {
    int level = 0;
    std::vector<double> pde;
    std::vector<double> bsde;
    std::vector<double> error;  ///< |u(t, x) - E_x Y_0^(t)| per probe
    double sup_error = 0.0;
    std::vector<std::string> warnings;
};

struct FkReport {
    std::vector<FkProbe> probes;
    std::vector<FkLevelResult> levels;
    bool strictly_decreasing = false;
};

/// Probes at every vertex of V_probe \ V_0 and every requested time.
std::vector<FkProbe> probe_grid(int probe_level, const std::vector<double>& times);

/// Solves the problem with both the weak PDE and the killed chain BSDE (duration
/// (T - t) ^ sigma_V0) on each level and compares u(t, x) with E_x Y_0^(t), which the
/// deterministic DP gives exactly as its layer at time t. Probe times must lie on the grid.
FkReport feynman_kac_check(const ProblemSpec& spec, const std::vector<int>& levels, const std::vector<FkProbe>& probes,
                           int workers = 1);

}  // namespace gasket

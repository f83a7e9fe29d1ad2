#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gasket/graph.hpp"
#include "gasket/matrix3.hpp"
#include "gasket/rational.hpp"

namespace gasket {

/// Values of a function at (p1, p2, p3), or at the three corners of a cell.
template <typename T>
using BoundaryTriple = Vec3<T>;

/// P, the harmonic restriction matrices A_i and Y_i = P A_i P.
template <typename T>
struct HarmonicMatrices {
    Mat3<T> P;
    std::array<Mat3<T>, 3> A;
    std::array<Mat3<T>, 3> Y;
};

const HarmonicMatrices<Rational>& exact_harmonic_matrices();
const HarmonicMatrices<double>& float_harmonic_matrices();

template <typename T>
const HarmonicMatrices<T>& harmonic_matrices()
{
    if constexpr (std::is_same_v<T, Rational>) {
        return exact_harmonic_matrices();
    } else {
        return float_harmonic_matrices();
    }
}

/// A_w = A_{w_m} ... A_{w_1} (reversed with respect to F_w = F_{w_1} o ... o F_{w_m}).
template <typename T>
Mat3<T> restriction_matrix(const CellWord& w)
{
    const auto& hm = harmonic_matrices<T>();
    Mat3<T> m = Mat3<T>::identity();
    for (int i = 0; i < w.length(); ++i) {
        m = hm.A[static_cast<std::size_t>(w[i] - 1)] * m;
    }
    return m;
}

/// Y_w = Y_{w_m} ... Y_{w_1}; the empty word gives P (the identity on the range of P).
template <typename T>
Mat3<T> kusuoka_matrix(const CellWord& w)
{
    const auto& hm = harmonic_matrices<T>();
    Mat3<T> m = hm.P;
    for (int i = 0; i < w.length(); ++i) {
        m = hm.Y[static_cast<std::size_t>(w[i] - 1)] * m;
    }
    return m;
}

/// Corner values of Hu on the cell w: (Hu) o F_w = A_w u.
template <typename T>
BoundaryTriple<T> harmonic_restrict(const BoundaryTriple<T>& u, const CellWord& w)
{
    const auto& hm = harmonic_matrices<T>();
    BoundaryTriple<T> v = u;
    for (int i = 0; i < w.length(); ++i) {
        v = hm.A[static_cast<std::size_t>(w[i] - 1)] * v;
    }
    return v;
}

/// Table of Hu on V_m, indexed by vertex id. Throws std::logic_error if two cells disagree
/// on a shared corner (cannot happen in exact mode).
template <typename T>
std::vector<T> harmonic_extend_to_level(const BoundaryTriple<T>& u, const LevelGraph& g);

/// E^(m)(u, v) = (1/2)(5/3)^m sum over unordered edges of du dv.
template <typename T>
T graph_energy(const LevelGraph& g, const std::vector<T>& u, const std::vector<T>& v);

/// (3/2) u^t P u, the energy of the harmonic extension.
template <typename T>
T harmonic_energy(const BoundaryTriple<T>& u)
{
    const auto& P = harmonic_matrices<T>().P;
    return T(3) / T(2) * dot(u, P * u);
}

/// (3/2)(5/3)^m c^t P c for a level-m cell with corner values c.
template <typename T>
T cell_energy_from_corners(const BoundaryTriple<T>& corners, int level)
{
    T scale = T(1);
    for (int i = 0; i < level; ++i) {
        scale *= T(5) / T(3);
    }
    return scale * harmonic_energy(corners);
}

/// nu_<Hu>(F_w(S)) = (3/2)(5/3)^m (A_w u)^t P (A_w u).
template <typename T>
T cell_energy_measure(const BoundaryTriple<T>& u, const CellWord& w)
{
    return cell_energy_from_corners(harmonic_restrict(u, w), w.length());
}

/// Per-cell data for signed gradients: Kusuoka mass and the oriented principal direction of
/// Y_w Y_w^t in corner-value space.
struct GradientFrame {
    double kusuoka_mass = 0.0;
    Vec3<double> direction{};
};

/// Frames for every cell of g (indexed like g.cells()).
std::vector<GradientFrame> build_gradient_frames(const LevelGraph& g);

/// Frame of a single cell, computed from the exact Y_w.
GradientFrame gradient_frame(const CellWord& w);

/// Signed per-cell gradient sign(s) * sqrt(nu_<u>(cell) / nu(cell)), with u replaced by its
/// harmonic interpolant on the cell; h1 has negative gradient on every cell.
double discrete_gradient(const std::vector<double>& u_table, const CellWord& w, const LevelGraph& g);
double discrete_gradient(const Vec3<double>& corner_values, const GradientFrame& frame, int level);

/// Largest |E^(m)(Hu) - (3/2) u^t P u| over random rational boundary triples (exact).
Rational energy_identity_defect(int level, int samples, std::uint64_t seed);

/// For i = 1..3, vertex x of `coarse` maps to the id of F_i(x) in `fine` (one level finer).
std::array<std::vector<int>, 3> pullback_maps(const LevelGraph& coarse, const LevelGraph& fine);

/// Largest |E^(m+1)(u, v) - (5/3) sum_i E^(m)(u o F_i, v o F_i)| over random rational tables
/// on V_{m+1} (exact).
Rational self_similarity_defect(int level, int samples, std::uint64_t seed);

/// Random rational with numerator in [-20, 20] and denominator in [1, 12].
Rational random_rational(std::mt19937_64& rng);

struct OscillationSample {
    BoundaryTriple<double> boundary{};
    double oscillation = 0.0;
    double energy = 0.0;
    double ratio = 0.0;
};

struct OscillationProbe {
    int level = 0;
    double lower_bound = 0.0;  ///< max ratio osc / sqrt(E) seen
    std::vector<OscillationSample> samples;
};

/// Empirical lower bound for the oscillation constant C_* over random rational boundary data.
/// Constant triples are skipped.
OscillationProbe oscillation_constant_probe(int sample_count, int level, std::uint64_t seed);

}  // namespace gasket

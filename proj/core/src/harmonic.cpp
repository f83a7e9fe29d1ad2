#include "gasket/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "gasket/errors.hpp"
#include "gasket/measures.hpp"

namespace gasket {

namespace {

HarmonicMatrices<Rational> make_exact()
{
    HarmonicMatrices<Rational> hm;
    const long p[3][3] = {{2, -1, -1}, {-1, 2, -1}, {-1, -1, 2}};
    const long a[3][3][3] = {
        {{5, 0, 0}, {2, 2, 1}, {2, 1, 2}},
        {{2, 2, 1}, {0, 5, 0}, {1, 2, 2}},
        {{2, 1, 2}, {1, 2, 2}, {0, 0, 5}},
    };
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            hm.P(i, j) = make_rational(p[i][j], 3);
            for (std::size_t k = 0; k < 3; ++k) {
                hm.A[k](i, j) = make_rational(a[k][i][j], 5);
            }
        }
    }
    for (std::size_t k = 0; k < 3; ++k) {
        hm.Y[k] = hm.P * hm.A[k] * hm.P;
    }
    return hm;
}

HarmonicMatrices<double> make_float()
{
    const auto& e = exact_harmonic_matrices();
    HarmonicMatrices<double> hm;
    hm.P = e.P.cast<double>();
    for (std::size_t k = 0; k < 3; ++k) {
        hm.A[k] = e.A[k].cast<double>();
        hm.Y[k] = e.Y[k].cast<double>();
    }
    return hm;
}

bool same_value(const Rational& a, const Rational& b) { return a == b; }
bool same_value(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); }

template <typename T>
void extend_cells(const HarmonicMatrices<T>& hm, const LevelGraph& g, std::size_t index, int depth,
                  const BoundaryTriple<T>& values, std::vector<T>& table, std::vector<char>& seen)
{
    if (depth == g.level()) {
        const auto& corners = g.cells()[index].corners;
        for (std::size_t j = 0; j < 3; ++j) {
            const auto v = static_cast<std::size_t>(corners[j]);
            if (seen[v]) {
                if (!same_value(table[v], values[j])) {
                    throw std::logic_error("harmonic extension is inconsistent at a shared vertex");
                }
            } else {
                table[v] = values[j];
                seen[v] = 1;
            }
        }
        return;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        extend_cells(hm, g, index * 3 + i, depth + 1, hm.A[i] * values, table, seen);
    }
}

Vec3<double> principal_direction(const Mat3<double>& y)
{
    Eigen::Matrix3d Y;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Y(i, j) = y(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
    }
    const Eigen::Matrix3d S = Y * Y.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(S);
    const auto& lambda = es.eigenvalues();  // ascending
    const Eigen::Vector3d r1 = Y.col(0);
    const Eigen::Vector3d r2 = Y.col(1);
    Eigen::Vector3d f = es.eigenvectors().col(2);
    if (lambda(2) - lambda(1) <= 1e-12 * std::abs(lambda(2))) {
        // Degenerate top eigenspace: align with h1's own direction.
        f = r1.normalized();
    }
    const double along1 = f.dot(r1);
    if (std::abs(along1) > 1e-13 * r1.norm()) {
        if (along1 > 0) {
            f = -f;
        }
    } else if (f.dot(r2) < 0) {
        f = -f;
    }
    return {f(0), f(1), f(2)};
}

double kusuoka_mass_double(const Mat3<double>& y, int level)
{
    return 0.5 * std::pow(5.0 / 3.0, level) * (y.transposed() * y).trace();
}

void frame_cells(const HarmonicMatrices<double>& hm, const LevelGraph& g, std::size_t index, int depth,
                 const Mat3<double>& y, std::vector<GradientFrame>& out)
{
    if (depth == g.level()) {
        out[index] = GradientFrame{kusuoka_mass_double(y, depth), principal_direction(y)};
        return;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        frame_cells(hm, g, index * 3 + i, depth + 1, hm.Y[i] * y, out);
    }
}

}  // namespace

const HarmonicMatrices<Rational>& exact_harmonic_matrices()
{
    static const HarmonicMatrices<Rational> hm = make_exact();
    return hm;
}

const HarmonicMatrices<double>& float_harmonic_matrices()
{
    static const HarmonicMatrices<double> hm = make_float();
    return hm;
}

template <typename T>
std::vector<T> harmonic_extend_to_level(const BoundaryTriple<T>& u, const LevelGraph& g)
{
    std::vector<T> table(g.vertex_count());
    std::vector<char> seen(g.vertex_count(), 0);
    extend_cells(harmonic_matrices<T>(), g, 0, 0, u, table, seen);
    return table;
}

template <typename T>
T graph_energy(const LevelGraph& g, const std::vector<T>& u, const std::vector<T>& v)
{
    if (u.size() != g.vertex_count() || v.size() != g.vertex_count()) {
        throw UsageError("graph_energy: tables must hold a value for every vertex of V_" +
                         std::to_string(g.level()));
    }
    T sum = T(0);
    for (const auto& [a, b] : g.edges()) {
        const auto i = static_cast<std::size_t>(a);
        const auto j = static_cast<std::size_t>(b);
        sum += (u[i] - u[j]) * (v[i] - v[j]);
    }
    T scale = T(1) / T(2);
    for (int i = 0; i < g.level(); ++i) {
        scale *= T(5) / T(3);
    }
    return scale * sum;
}

template std::vector<Rational> harmonic_extend_to_level(const BoundaryTriple<Rational>&, const LevelGraph&);
template std::vector<double> harmonic_extend_to_level(const BoundaryTriple<double>&, const LevelGraph&);
template Rational graph_energy(const LevelGraph&, const std::vector<Rational>&, const std::vector<Rational>&);
template double graph_energy(const LevelGraph&, const std::vector<double>&, const std::vector<double>&);

std::vector<GradientFrame> build_gradient_frames(const LevelGraph& g)
{
    std::vector<GradientFrame> frames(g.cell_count());
    const auto& hm = float_harmonic_matrices();
    frame_cells(hm, g, 0, 0, hm.P, frames);
    return frames;
}

GradientFrame gradient_frame(const CellWord& w)
{
    const Mat3<Rational> y = kusuoka_matrix<Rational>(w);
    return GradientFrame{to_double(kusuoka_mass(w)), principal_direction(y.cast<double>())};
}

double discrete_gradient(const Vec3<double>& corner_values, const GradientFrame& frame, int level)
{
    if (!(frame.kusuoka_mass > 0.0)) {
        throw DomainError("discrete_gradient: cell has zero Kusuoka mass");
    }
    const double energy = cell_energy_from_corners(corner_values, level);
    const auto& P = float_harmonic_matrices().P;
    const double side = dot(frame.direction, P * corner_values);
    const double magnitude = std::sqrt(std::max(energy, 0.0) / frame.kusuoka_mass);
    return side < 0.0 ? -magnitude : magnitude;
}

double discrete_gradient(const std::vector<double>& u_table, const CellWord& w, const LevelGraph& g)
{
    if (u_table.size() != g.vertex_count()) {
        throw UsageError("discrete_gradient: table size does not match the graph");
    }
    const auto& corners = g.cell(w).corners;
    const Vec3<double> c{u_table[static_cast<std::size_t>(corners[0])],
                         u_table[static_cast<std::size_t>(corners[1])],
                         u_table[static_cast<std::size_t>(corners[2])]};
    return discrete_gradient(c, gradient_frame(w), g.level());
}

Rational random_rational(std::mt19937_64& rng)
{
    std::uniform_int_distribution<long> num(-20, 20);
    std::uniform_int_distribution<long> den(1, 12);
    return make_rational(num(rng), den(rng));
}

Rational energy_identity_defect(int level, int samples, std::uint64_t seed)
{
    const LevelGraph g = build_level_graph(level);
    std::mt19937_64 rng(seed);
    Rational worst(0);
    for (int s = 0; s < samples; ++s) {
        const BoundaryTriple<Rational> u{random_rational(rng), random_rational(rng), random_rational(rng)};
        const auto table = harmonic_extend_to_level(u, g);
        const Rational defect = abs(graph_energy(g, table, table) - harmonic_energy(u));
        worst = std::max(worst, defect);
    }
    return worst;
}

std::array<std::vector<int>, 3> pullback_maps(const LevelGraph& coarse, const LevelGraph& fine)
{
    if (fine.level() != coarse.level() + 1) {
        throw UsageError("pullback maps need consecutive levels");
    }
    std::map<GasketPoint, int> index;
    for (const auto& v : fine.vertices()) {
        index.emplace(v.coords, v.id);
    }
    std::array<std::vector<int>, 3> maps;
    for (int i = 0; i < 3; ++i) {
        auto& m = maps[static_cast<std::size_t>(i)];
        m.reserve(coarse.vertex_count());
        for (const auto& v : coarse.vertices()) {
            m.push_back(index.at(contract(i + 1, v.coords)));
        }
    }
    return maps;
}

Rational self_similarity_defect(int level, int samples, std::uint64_t seed)
{
    const LevelGraph coarse = build_level_graph(level);
    const LevelGraph fine = build_level_graph(level + 1);
    const auto maps = pullback_maps(coarse, fine);
    std::mt19937_64 rng(seed);
    Rational worst(0);
    for (int s = 0; s < samples; ++s) {
        std::vector<Rational> u(fine.vertex_count());
        std::vector<Rational> v(fine.vertex_count());
        for (std::size_t x = 0; x < u.size(); ++x) {
            u[x] = random_rational(rng);
            v[x] = random_rational(rng);
        }
        Rational sum(0);
        for (const auto& m : maps) {
            std::vector<Rational> ui(m.size());
            std::vector<Rational> vi(m.size());
            for (std::size_t x = 0; x < m.size(); ++x) {
                ui[x] = u[static_cast<std::size_t>(m[x])];
                vi[x] = v[static_cast<std::size_t>(m[x])];
            }
            sum += graph_energy(coarse, ui, vi);
        }
        const Rational defect = abs(graph_energy(fine, u, v) - make_rational(5, 3) * sum);
        worst = std::max(worst, defect);
    }
    return worst;
}

OscillationProbe oscillation_constant_probe(int sample_count, int level, std::uint64_t seed)
{
    const LevelGraph g = build_level_graph(level);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coeff(-12, 12);
    OscillationProbe probe;
    probe.level = level;
    auto record = [&](const BoundaryTriple<double>& u) {
        const auto table = harmonic_extend_to_level(u, g);
        const auto [lo, hi] = std::minmax_element(table.begin(), table.end());
        OscillationSample s;
        s.boundary = u;
        s.oscillation = *hi - *lo;
        s.energy = harmonic_energy(u);
        s.ratio = s.oscillation / std::sqrt(s.energy);
        probe.lower_bound = std::max(probe.lower_bound, s.ratio);
        probe.samples.push_back(s);
    };
    record({1.0, 0.0, 0.0});
    while (static_cast<int>(probe.samples.size()) < sample_count) {
        const BoundaryTriple<double> u{double(coeff(rng)), double(coeff(rng)), double(coeff(rng))};
        if (u[0] == u[1] && u[1] == u[2]) {
            continue;  // 0/0
        }
        record(u);
    }
    return probe;
}

}  // namespace gasket

#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include <gasket/errors.hpp>
#include <gasket/harmonic.hpp>
#include <gasket/measures.hpp>

#include "oracles/brute_force.hpp"

using namespace gasket;

namespace {

std::vector<int> digits(const CellWord& w)
{
    std::vector<int> d;
    for (int i = 0; i < w.length(); ++i) {
        d.push_back(w[i] - 1);
    }
    return d;
}

}  // namespace

TEST_CASE("harmonic matrices")
{
    const auto& hm = exact_harmonic_matrices();
    CHECK(hm.A[0](1, 0) == make_rational(2, 5));
    CHECK(hm.A[0](1, 2) == make_rational(1, 5));
    CHECK(hm.A[1](1, 1) == Rational(1));
    CHECK(hm.Y[0](0, 0) == make_rational(2, 5));
    CHECK(hm.Y[0](0, 1) == make_rational(-1, 5));
    CHECK(hm.Y[0](1, 2) == Rational(0));
    CHECK(hm.Y[0] == hm.Y[0].transposed());
    Eigen::Matrix3d y;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            y(i, j) = hm.Y[0](static_cast<std::size_t>(i), static_cast<std::size_t>(j)).get_d();
        }
    }
    const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(y).eigenvalues();
    CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(0.2));
    CHECK(ev[2] == doctest::Approx(0.6));
    CHECK(kusuoka_matrix<Rational>(CellWord("")) == hm.P);
}

TEST_CASE("harmonic extension equals the Dirichlet solve")
{
    std::mt19937_64 rng(11);
    for (int m = 1; m <= 3; ++m) {
        const auto g = build_level_graph(m);
        for (int s = 0; s < 3; ++s) {
            const BoundaryTriple<Rational> u{random_rational(rng), random_rational(rng), random_rational(rng)};
            const auto table = harmonic_extend_to_level(u, g);
            const auto ref = oracle::dirichlet_extension(m, {u[0], u[1], u[2]});
            for (const auto& v : g.vertices()) {
                CHECK(table[static_cast<std::size_t>(v.id)] == ref.at({v.coords.x, v.coords.y_sqrt3}));
            }
        }
    }
}

TEST_CASE("level-1 harmonic values follow the 2-2-1 rule")
{
    const auto g = build_level_graph(1);
    const auto t = harmonic_extend_to_level<Rational>({Rational(1), Rational(0), make_rational(-1, 2)}, g);
    const int mid12 = g.find_vertex(midpoint(corner_point(1), corner_point(2)));
    CHECK(t[static_cast<std::size_t>(mid12)] == make_rational(3, 10));
}

TEST_CASE("restriction matrices reproduce cell corner values")
{
    std::mt19937_64 rng(5);
    const std::array<oracle::Q, 3> u{random_rational(rng), random_rational(rng), random_rational(rng)};
    const auto ref = oracle::dirichlet_extension(3, u);
    for (const char* word : {"1", "2", "13", "231", "322"}) {
        const CellWord w(word);
        const auto corners = harmonic_restrict<Rational>({u[0], u[1], u[2]}, w);
        for (int i = 0; i < 3; ++i) {
            const auto p = oracle::compose(digits(w), oracle::corner(i));
            CHECK(corners[static_cast<std::size_t>(i)] == ref.at(p));
        }
    }
}

TEST_CASE("energy of harmonic functions is exact at every level")
{
    for (int m = 0; m <= 4; ++m) {
        CHECK(energy_identity_defect(m, 10, 100 + static_cast<std::uint64_t>(m)) == 0);
    }
    CHECK(harmonic_energy<Rational>({Rational(1), Rational(0), Rational(0)}) == Rational(1));
}

TEST_CASE("energy is self-similar with renormalisation 5/3")
{
    for (int m = 0; m <= 3; ++m) {
        CHECK(self_similarity_defect(m, 3, 7) == 0);
    }
    // The same sum with a wrong factor is visibly off.
    const auto coarse = build_level_graph(1);
    const auto fine = build_level_graph(2);
    const auto maps = pullback_maps(coarse, fine);
    std::mt19937_64 rng(3);
    std::vector<Rational> u(fine.vertex_count());
    for (auto& x : u) {
        x = random_rational(rng);
    }
    Rational sum(0);
    for (const auto& m : maps) {
        std::vector<Rational> ui;
        for (int id : m) {
            ui.push_back(u[static_cast<std::size_t>(id)]);
        }
        sum += graph_energy(coarse, ui, ui);
    }
    CHECK(graph_energy(fine, u, u) == make_rational(5, 3) * sum);
    CHECK(graph_energy(fine, u, u) != 2 * sum);
}

TEST_CASE("graph energy rejects mismatched tables")
{
    const auto g = build_level_graph(1);
    CHECK_THROWS_AS(graph_energy<double>(g, std::vector<double>(5, 0.0), std::vector<double>(6, 0.0)), UsageError);
}

TEST_CASE("discrete gradient")
{
    const auto g = build_level_graph(3);
    const auto frames = build_gradient_frames(g);
    const auto h1 = harmonic_extend_to_level<double>({1.0, 0.0, 0.0}, g);
    double energy = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const auto& w = g.cells()[c].word;
        const double d = discrete_gradient(h1, w, g);
        CHECK(d < 0.0);
        CHECK(frames[c].kusuoka_mass == doctest::Approx(kusuoka_mass(w).get_d()).epsilon(1e-12));
        energy += d * d * frames[c].kusuoka_mass;
    }
    // nu_<u> = |grad u|^2 nu cell by cell, so the cells add up to the energy.
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));

    const auto u = harmonic_extend_to_level<double>({0.3, -1.2, 2.0}, g);
    std::vector<double> neg(u.size());
    std::vector<double> shifted(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        neg[i] = -2.0 * u[i];
        shifted[i] = u[i] + 5.0;
    }
    const CellWord w("213");
    CHECK(discrete_gradient(neg, w, g) == doctest::Approx(-2.0 * discrete_gradient(u, w, g)));
    CHECK(discrete_gradient(shifted, w, g) == doctest::Approx(discrete_gradient(u, w, g)));
    CHECK(discrete_gradient(std::vector<double>(u.size(), 4.0), w, g) == doctest::Approx(0.0));
}

TEST_CASE("oscillation probe")
{
    const auto probe = oscillation_constant_probe(20, 3, 9);
    CHECK(probe.samples.size() == 20);
    CHECK(probe.samples.front().ratio == doctest::Approx(1.0));
    CHECK(probe.lower_bound >= 1.0);
    for (const auto& s : probe.samples) {
        CHECK(s.ratio <= probe.lower_bound);
    }
}

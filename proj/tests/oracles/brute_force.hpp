#pragma once

// Oracles built only from the contractions F_i and plain linear algebra, without the
// library's graph builder, restriction matrices or Kusuoka products.

#include <gmpxx.h>

#include <array>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Q = mpq_class;
/// (x, y / sqrt(3)) with exact rationals.
using Point = std::pair<Q, Q>;

inline Point corner(int i)
{
    static const std::array<Point, 3> p{Point{Q(0), Q(0)}, Point{Q(1), Q(0)}, Point{Q(1, 2), Q(1, 2)}};
    return p[static_cast<std::size_t>(i)];
}

inline Point apply_map(int i, const Point& x)
{
    const Point c = corner(i);
    Q a = (x.first + c.first) / 2;
    Q b = (x.second + c.second) / 2;
    a.canonicalize();
    b.canonicalize();
    return {a, b};
}

/// F_{w_1} o ... o F_{w_m} (x) for a word given as 0-based digits.
inline Point compose(const std::vector<int>& word, Point x)
{
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        x = apply_map(*it, x);
    }
    return x;
}

inline std::vector<std::vector<int>> all_words(int m)
{
    std::vector<std::vector<int>> words{{}};
    for (int k = 0; k < m; ++k) {
        std::vector<std::vector<int>> next;
        for (const auto& w : words) {
            for (int i = 0; i < 3; ++i) {
                auto v = w;
                v.push_back(i);
                next.push_back(v);
            }
        }
        words = next;
    }
    return words;
}

/// V_m and its edge set as point pairs, by composing the maps over all words.
struct BruteGraph {
    std::set<Point> vertices;
    std::set<std::pair<Point, Point>> edges;
};

inline BruteGraph brute_graph(int m)
{
    BruteGraph g;
    for (const auto& w : all_words(m)) {
        std::array<Point, 3> c;
        for (int i = 0; i < 3; ++i) {
            c[static_cast<std::size_t>(i)] = compose(w, corner(i));
            g.vertices.insert(c[static_cast<std::size_t>(i)]);
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) {
                auto a = c[static_cast<std::size_t>(i)];
                auto b = c[static_cast<std::size_t>(j)];
                if (b < a) {
                    std::swap(a, b);
                }
                g.edges.insert({a, b});
            }
        }
    }
    return g;
}

/// Exact Gaussian elimination for a dense rational system A x = b.
inline std::vector<Q> solve(std::vector<std::vector<Q>> A, std::vector<Q> b)
{
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (A[piv][col] == 0) {
            ++piv;
        }
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0) {
                continue;
            }
            const Q f = A[r][col] / A[col][col];
            for (std::size_t k = col; k < n; ++k) {
                A[r][k] -= f * A[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    std::vector<Q> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = b[i] / A[i][i];
        x[i].canonicalize();
    }
    return x;
}

/// Harmonic extension by a Dirichlet solve of the graph Laplacian of V_m.
/// Returns values keyed by point.
inline std::map<Point, Q> dirichlet_extension(int m, const std::array<Q, 3>& boundary)
{
    const BruteGraph g = brute_graph(m);
    std::map<Point, std::size_t> index;
    std::vector<Point> interior;
    std::map<Point, Q> value;
    for (int i = 0; i < 3; ++i) {
        value[corner(i)] = boundary[static_cast<std::size_t>(i)];
    }
    for (const auto& p : g.vertices) {
        if (!value.count(p)) {
            index[p] = interior.size();
            interior.push_back(p);
        }
    }
    const std::size_t n = interior.size();
    std::vector<std::vector<Q>> A(n, std::vector<Q>(n, Q(0)));
    std::vector<Q> b(n, Q(0));
    for (const auto& [a, c] : g.edges) {
        for (const auto& [x, y] : {std::pair{a, c}, std::pair{c, a}}) {
            if (!index.count(x)) {
                continue;
            }
            const std::size_t r = index[x];
            A[r][r] += 1;
            if (index.count(y)) {
                A[r][index[y]] -= 1;
            } else {
                b[r] += value[y];
            }
        }
    }
    const auto x = solve(A, b);
    for (std::size_t i = 0; i < n; ++i) {
        value[interior[i]] = x[i];
    }
    return value;
}

/// Energy measure of the harmonic function with the given boundary data on the cell F_w(S):
/// edge energies (1/2)(5/3)^n sum (du)^2 over level-n edges inside the cell, n = |w| + extra.
/// For harmonic functions the sum does not depend on n >= |w|.
inline Q cell_energy(const std::vector<int>& w, const std::array<Q, 3>& boundary, int extra = 1)
{
    const int n = static_cast<int>(w.size()) + extra;
    const auto value = dirichlet_extension(n, boundary);
    Q total(0);
    for (const auto& tail : all_words(extra)) {
        std::vector<int> word = w;
        word.insert(word.end(), tail.begin(), tail.end());
        std::array<Point, 3> c;
        for (int i = 0; i < 3; ++i) {
            c[static_cast<std::size_t>(i)] = compose(word, corner(i));
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) {
                const Q d = value.at(c[static_cast<std::size_t>(i)]) - value.at(c[static_cast<std::size_t>(j)]);
                total += d * d;
            }
        }
    }
    Q scale(1);
    for (int k = 0; k < n; ++k) {
        scale *= Q(5, 3);
    }
    Q e = total * scale / 2;
    e.canonicalize();
    return e;
}

/// Kusuoka mass as the average of the energy measures of h_1, h_2, h_3.
inline Q kusuoka_mass(const std::vector<int>& w)
{
    Q sum(0);
    for (int i = 0; i < 3; ++i) {
        std::array<Q, 3> e{Q(0), Q(0), Q(0)};
        e[static_cast<std::size_t>(i)] = 1;
        sum += cell_energy(w, e);
    }
    Q r = sum / 3;
    r.canonicalize();
    return r;
}

}  // namespace oracle

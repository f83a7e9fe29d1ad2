#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gasket/rational.hpp"

namespace gasket {

inline constexpr int kMaxGraphLevel = 12;

/// Address of a level-m cell: a word over {1,2,3}. The empty word is the whole gasket.
class CellWord {
public:
    CellWord() = default;
    explicit CellWord(std::string_view symbols);

    static CellWord repeated(int symbol, int length);
    /// Inverse of index(): the word of the given length whose base-3 rank is `index`.
    static CellWord from_index(std::size_t index, int length);

    int length() const { return static_cast<int>(symbols_.size()); }
    bool empty() const { return symbols_.empty(); }
    /// Symbol at position i (0-based), in {1,2,3}.
    int operator[](int i) const { return symbols_[static_cast<std::size_t>(i)] - '0'; }

    CellWord child(int symbol) const;
    CellWord parent() const;
    /// Lexicographic rank among words of the same length (base-3, symbols shifted to 0..2).
    std::size_t index() const;

    const std::string& str() const { return symbols_; }

    friend bool operator==(const CellWord&, const CellWord&) = default;
    friend auto operator<=>(const CellWord&, const CellWord&) = default;

private:
    std::string symbols_;
};

/// A point of the plane with coordinates x and y = y_sqrt3 * sqrt(3), both parts exact.
struct GasketPoint {
    Rational x;
    Rational y_sqrt3;

    double x_double() const { return x.get_d(); }
    double y_double() const;

    friend bool operator==(const GasketPoint& a, const GasketPoint& b)
    {
        return a.x == b.x && a.y_sqrt3 == b.y_sqrt3;
    }
    friend bool operator<(const GasketPoint& a, const GasketPoint& b)
    {
        if (a.x != b.x) {
            return a.x < b.x;
        }
        return a.y_sqrt3 < b.y_sqrt3;
    }
};

/// Boundary corner p_i, i in {1,2,3}.
GasketPoint corner_point(int i);
/// The contraction F_i(x) = (x + p_i)/2.
GasketPoint contract(int i, const GasketPoint& p);
GasketPoint midpoint(const GasketPoint& a, const GasketPoint& b);

struct Vertex {
    int id = 0;
    GasketPoint coords;
    bool is_boundary = false;
};

struct Cell {
    CellWord word;
    /// Vertex ids of (F_w(p1), F_w(p2), F_w(p3)), in that order.
    std::array<int, 3> corners{};
};

/// Level-m approximation V_m: vertices, edges of length 2^-m and the 3^m cells.
///
/// Immutable after construction. Vertex ids 0,1,2 are p1,p2,p3; the remaining ids follow
/// first appearance in a lexicographic sweep of the cells. Cells are stored in
/// lexicographic word order so that cells()[w.index()] is the cell addressed by w.
class LevelGraph {
public:
    int level() const { return level_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    std::size_t cell_count() const { return cells_.size(); }

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<Cell>& cells() const { return cells_; }

    const Vertex& vertex(int id) const;
    const Cell& cell(const CellWord& w) const;
    std::span<const int> neighbors(int id) const;
    /// Indices into cells() of the (one or two) cells having `id` as a corner.
    std::span<const int> cells_of_vertex(int id) const;
    /// Vertex at the given exact point, or -1.
    int find_vertex(const GasketPoint& p) const;

    bool is_boundary(int id) const { return id >= 0 && id < 3; }

private:
    friend LevelGraph build_level_graph(int m);

    int level_ = 0;
    std::vector<Vertex> vertices_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<Cell> cells_;
    std::vector<std::size_t> adjacency_offsets_;
    std::vector<int> adjacency_;
    std::vector<std::size_t> vertex_cell_offsets_;
    std::vector<int> vertex_cells_;
};

/// Builds V_m for 0 <= m <= kMaxGraphLevel; throws CapacityError above the guard.
LevelGraph build_level_graph(int m);

/// Corner vertex ids of cell w (images of p1, p2, p3). UsageError if |w| != level.
std::array<int, 3> cell_corners(const CellWord& w, const LevelGraph& g);

/// Vertices at distance 2^-m from v. UsageError for unknown ids.
std::vector<int> neighbors(int v, const LevelGraph& g);

/// (3^(m+1) + 3) / 2.
std::size_t expected_vertex_count(int m);

/// JSON export: {level, vertices:[{id,x_rational,y_coeff_sqrt3_rational,boundary}],
/// edges:[[i,j]], cells:[{word, corners}]}.
void write_graph_json(const LevelGraph& g, std::ostream& out);

}  // namespace gasket

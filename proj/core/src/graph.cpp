#include "gasket/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <json.hpp>

#include "gasket/errors.hpp"

namespace gasket {

CellWord::CellWord(std::string_view symbols) : symbols_(symbols)
{
    for (char c : symbols_) {
        if (c < '1' || c > '3') {
            throw UsageError("cell word symbols must be in {1,2,3}, got '" + symbols_ + "'");
        }
    }
}

CellWord CellWord::repeated(int symbol, int length)
{
    if (symbol < 1 || symbol > 3 || length < 0) {
        throw UsageError("invalid repeated word");
    }
    CellWord w;
    w.symbols_.assign(static_cast<std::size_t>(length), static_cast<char>('0' + symbol));
    return w;
}

CellWord CellWord::from_index(std::size_t index, int length)
{
    CellWord w;
    w.symbols_.assign(static_cast<std::size_t>(length), '1');
    for (int i = length - 1; i >= 0; --i) {
        w.symbols_[static_cast<std::size_t>(i)] = static_cast<char>('1' + index % 3);
        index /= 3;
    }
    if (index != 0) {
        throw UsageError("cell index out of range for word length");
    }
    return w;
}

CellWord CellWord::child(int symbol) const
{
    if (symbol < 1 || symbol > 3) {
        throw UsageError("child symbol must be in {1,2,3}");
    }
    CellWord w = *this;
    w.symbols_.push_back(static_cast<char>('0' + symbol));
    return w;
}

CellWord CellWord::parent() const
{
    if (symbols_.empty()) {
        throw UsageError("the empty word has no parent");
    }
    CellWord w = *this;
    w.symbols_.pop_back();
    return w;
}

std::size_t CellWord::index() const
{
    std::size_t idx = 0;
    for (char c : symbols_) {
        idx = idx * 3 + static_cast<std::size_t>(c - '1');
    }
    return idx;
}

double GasketPoint::y_double() const { return y_sqrt3.get_d() * std::sqrt(3.0); }

GasketPoint corner_point(int i)
{
    switch (i) {
    case 1:
        return {Rational(0), Rational(0)};
    case 2:
        return {Rational(1), Rational(0)};
    case 3:
        return {make_rational(1, 2), make_rational(1, 2)};
    default:
        throw UsageError("corner index must be 1, 2 or 3");
    }
}

GasketPoint midpoint(const GasketPoint& a, const GasketPoint& b)
{
    GasketPoint m{a.x + b.x, a.y_sqrt3 + b.y_sqrt3};
    m.x /= 2;
    m.y_sqrt3 /= 2;
    return m;
}

GasketPoint contract(int i, const GasketPoint& p) { return midpoint(p, corner_point(i)); }

std::size_t expected_vertex_count(int m)
{
    std::size_t p = 1;
    for (int i = 0; i <= m; ++i) {
        p *= 3;
    }
    return (p + 3) / 2;
}

namespace {

struct Builder {
    LevelGraph* graph;
    std::map<GasketPoint, int>* index;
    std::vector<Vertex>* vertices;
    std::vector<Cell>* cells;
    std::vector<std::pair<int, int>>* edges;
    int level;

    int intern(const GasketPoint& p)
    {
        auto [it, inserted] = index->try_emplace(p, static_cast<int>(vertices->size()));
        if (inserted) {
            vertices->push_back(Vertex{it->second, p, false});
        }
        return it->second;
    }

    // Corners of child i of a cell with corners c are (mid(c_i, c_1), mid(c_i, c_2), mid(c_i, c_3)),
    // because F_{w i}(p_j) = F_w((p_i + p_j)/2) and F_w is affine.
    void descend(const CellWord& w, const std::array<GasketPoint, 3>& c)
    {
        if (w.length() == level) {
            Cell cell{w, {intern(c[0]), intern(c[1]), intern(c[2])}};
            const auto& k = cell.corners;
            edges->emplace_back(std::min(k[0], k[1]), std::max(k[0], k[1]));
            edges->emplace_back(std::min(k[0], k[2]), std::max(k[0], k[2]));
            edges->emplace_back(std::min(k[1], k[2]), std::max(k[1], k[2]));
            cells->push_back(std::move(cell));
            return;
        }
        for (int i = 1; i <= 3; ++i) {
            const auto& ci = c[static_cast<std::size_t>(i - 1)];
            std::array<GasketPoint, 3> child{
                i == 1 ? ci : midpoint(ci, c[0]),
                i == 2 ? ci : midpoint(ci, c[1]),
                i == 3 ? ci : midpoint(ci, c[2]),
            };
            descend(w.child(i), child);
        }
    }
};

}  // namespace

LevelGraph build_level_graph(int m)
{
    if (m < 0) {
        throw UsageError("level must be non-negative");
    }
    if (m > kMaxGraphLevel) {
        throw CapacityError("level " + std::to_string(m) + " exceeds the memory guard of " +
                            std::to_string(kMaxGraphLevel));
    }
    LevelGraph g;
    g.level_ = m;
    std::map<GasketPoint, int> index;
    g.vertices_.reserve(expected_vertex_count(m));
    Builder b{&g, &index, &g.vertices_, &g.cells_, &g.edges_, m};
    for (int i = 1; i <= 3; ++i) {
        b.intern(corner_point(i));
        g.vertices_.back().is_boundary = true;
    }
    b.descend(CellWord{}, {corner_point(1), corner_point(2), corner_point(3)});

    const std::size_t n = g.vertices_.size();
    std::vector<std::vector<int>> adj(n);
    for (const auto& [i, j] : g.edges_) {
        adj[static_cast<std::size_t>(i)].push_back(j);
        adj[static_cast<std::size_t>(j)].push_back(i);
    }
    g.adjacency_offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        std::sort(adj[v].begin(), adj[v].end());
        g.adjacency_offsets_[v + 1] = g.adjacency_offsets_[v] + adj[v].size();
        g.adjacency_.insert(g.adjacency_.end(), adj[v].begin(), adj[v].end());
    }

    std::vector<std::vector<int>> vc(n);
    for (std::size_t c = 0; c < g.cells_.size(); ++c) {
        for (int v : g.cells_[c].corners) {
            vc[static_cast<std::size_t>(v)].push_back(static_cast<int>(c));
        }
    }
    g.vertex_cell_offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        g.vertex_cell_offsets_[v + 1] = g.vertex_cell_offsets_[v] + vc[v].size();
        g.vertex_cells_.insert(g.vertex_cells_.end(), vc[v].begin(), vc[v].end());
    }
    return g;
}

const Vertex& LevelGraph::vertex(int id) const
{
    if (id < 0 || static_cast<std::size_t>(id) >= vertices_.size()) {
        throw UsageError("unknown vertex id " + std::to_string(id));
    }
    return vertices_[static_cast<std::size_t>(id)];
}

const Cell& LevelGraph::cell(const CellWord& w) const
{
    if (w.length() != level_) {
        throw UsageError("word '" + w.str() + "' has length " + std::to_string(w.length()) +
                         " but the graph level is " + std::to_string(level_));
    }
    return cells_[w.index()];
}

std::span<const int> LevelGraph::neighbors(int id) const
{
    vertex(id);
    const auto v = static_cast<std::size_t>(id);
    return {adjacency_.data() + adjacency_offsets_[v], adjacency_offsets_[v + 1] - adjacency_offsets_[v]};
}

std::span<const int> LevelGraph::cells_of_vertex(int id) const
{
    vertex(id);
    const auto v = static_cast<std::size_t>(id);
    return {vertex_cells_.data() + vertex_cell_offsets_[v],
            vertex_cell_offsets_[v + 1] - vertex_cell_offsets_[v]};
}

int LevelGraph::find_vertex(const GasketPoint& p) const
{
    for (const auto& v : vertices_) {
        if (v.coords == p) {
            return v.id;
        }
    }
    return -1;
}

std::array<int, 3> cell_corners(const CellWord& w, const LevelGraph& g) { return g.cell(w).corners; }

std::vector<int> neighbors(int v, const LevelGraph& g)
{
    auto span = g.neighbors(v);
    return {span.begin(), span.end()};
}

void write_graph_json(const LevelGraph& g, std::ostream& out)
{
    nlohmann::ordered_json j;
    j["level"] = g.level();
    auto& verts = j["vertices"] = nlohmann::ordered_json::array();
    for (const auto& v : g.vertices()) {
        verts.push_back({{"id", v.id},
                         {"x_rational", v.coords.x.get_str()},
                         {"y_coeff_sqrt3_rational", v.coords.y_sqrt3.get_str()},
                         {"boundary", v.is_boundary}});
    }
    auto& edges = j["edges"] = nlohmann::ordered_json::array();
    for (const auto& [a, b] : g.edges()) {
        edges.push_back({a, b});
    }
    auto& cells = j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : g.cells()) {
        cells.push_back({{"word", c.word.str()}, {"corners", c.corners}});
    }
    out << j.dump(1) << '\n';
}

}  // namespace gasket

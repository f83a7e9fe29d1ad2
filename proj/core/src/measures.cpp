#include "gasket/measures.hpp"

#include <algorithm>

#include "gasket/errors.hpp"

namespace gasket {

namespace {

constexpr int kMaxExactMeasureLevel = 10;

void check_level(int level)
{
    if (level < 0) {
        throw UsageError("measure level must be non-negative");
    }
    if (level > kMaxExactMeasureLevel) {
        throw CapacityError("exact measure tables are limited to level " +
                            std::to_string(kMaxExactMeasureLevel));
    }
}

std::size_t cells_at(int level)
{
    std::size_t n = 1;
    for (int i = 0; i < level; ++i) {
        n *= 3;
    }
    return n;
}

Rational half_trace_gram(const Mat3<Rational>& y) { return (y.transposed() * y).trace() / 2; }

void kusuoka_cells(const HarmonicMatrices<Rational>& hm, int level, std::size_t index, int depth,
                   const Mat3<Rational>& y, const Rational& scale, std::vector<Rational>& out)
{
    if (depth == level) {
        out[index] = scale * half_trace_gram(y);
        return;
    }
    const Rational next_scale = scale * make_rational(5, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        kusuoka_cells(hm, level, index * 3 + i, depth + 1, hm.Y[i] * y, next_scale, out);
    }
}

void energy_cells(const HarmonicMatrices<Rational>& hm, int level, std::size_t index, int depth,
                  const BoundaryTriple<Rational>& c, std::vector<Rational>& out)
{
    if (depth == level) {
        out[index] = cell_energy_from_corners(c, level);
        return;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        energy_cells(hm, level, index * 3 + i, depth + 1, hm.A[i] * c, out);
    }
}

}  // namespace

std::string to_string(MeasureKind kind)
{
    switch (kind) {
    case MeasureKind::hausdorff:
        return "mu";
    case MeasureKind::kusuoka:
        return "nu";
    case MeasureKind::energy:
        return "energy";
    }
    return "?";
}

MeasureKind parse_measure_kind(const std::string& name)
{
    if (name == "mu" || name == "hausdorff") {
        return MeasureKind::hausdorff;
    }
    if (name == "nu" || name == "kusuoka") {
        return MeasureKind::kusuoka;
    }
    if (name == "energy") {
        return MeasureKind::energy;
    }
    throw UsageError("unknown measure kind '" + name + "' (expected mu, nu or energy)");
}

const Rational& CellMeasure::mass(const CellWord& w) const
{
    if (w.length() != level) {
        throw UsageError("word length does not match the measure level");
    }
    return masses[w.index()];
}

Rational CellMeasure::total() const
{
    Rational s(0);
    for (const auto& m : masses) {
        s += m;
    }
    return s;
}

Rational kusuoka_mass(const CellWord& w)
{
    return rational_pow(make_rational(5, 3), static_cast<unsigned>(w.length())) *
           half_trace_gram(kusuoka_matrix<Rational>(w));
}

Rational hausdorff_mass(const CellWord& w)
{
    return Rational(1) / rational_pow(Rational(3), static_cast<unsigned>(w.length()));
}

CellMeasure hausdorff_measure_table(int level)
{
    check_level(level);
    const Rational each = hausdorff_mass(CellWord::repeated(1, level));
    return CellMeasure{MeasureKind::hausdorff, level, std::vector<Rational>(cells_at(level), each)};
}

CellMeasure kusuoka_measure_table(int level)
{
    check_level(level);
    CellMeasure m{MeasureKind::kusuoka, level, std::vector<Rational>(cells_at(level))};
    const auto& hm = exact_harmonic_matrices();
    kusuoka_cells(hm, level, 0, 0, hm.P, Rational(1), m.masses);
    return m;
}

CellMeasure energy_measure_table(const BoundaryTriple<Rational>& u, int level)
{
    check_level(level);
    CellMeasure m{MeasureKind::energy, level, std::vector<Rational>(cells_at(level))};
    energy_cells(exact_harmonic_matrices(), level, 0, 0, u, m.masses);
    return m;
}

CellMeasure coarsen(const CellMeasure& fine)
{
    if (fine.level == 0) {
        throw UsageError("cannot coarsen a level-0 measure");
    }
    CellMeasure coarse{fine.kind, fine.level - 1, std::vector<Rational>(fine.masses.size() / 3)};
    for (std::size_t i = 0; i < fine.masses.size(); ++i) {
        coarse.masses[i / 3] += fine.masses[i];
    }
    return coarse;
}

Rational kusuoka_identity_check(int level)
{
    const CellMeasure nu = kusuoka_measure_table(level);
    std::array<CellMeasure, 3> h;
    for (std::size_t i = 0; i < 3; ++i) {
        BoundaryTriple<Rational> e{Rational(0), Rational(0), Rational(0)};
        e[i] = 1;
        h[i] = energy_measure_table(e, level);
    }
    Rational worst(0);
    for (std::size_t c = 0; c < nu.masses.size(); ++c) {
        Rational defect = nu.masses[c] - (h[0].masses[c] + h[1].masses[c] + h[2].masses[c]) / 3;
        defect = abs(defect);
        if (defect > worst) {
            worst = defect;
        }
    }
    return worst;
}

SingularityDiagnostic singularity_diagnostic(int level)
{
    const CellMeasure nu = kusuoka_measure_table(level);
    const Rational scale = rational_pow(Rational(3), static_cast<unsigned>(level));
    SingularityDiagnostic d;
    d.level = level;
    const auto [lo, hi] = std::minmax_element(nu.masses.begin(), nu.masses.end());
    d.max_ratio = *hi * scale;
    d.min_ratio = *lo * scale;
    d.ratio_word_one = nu.masses.front() * scale;
    return d;
}

}  // namespace gasket

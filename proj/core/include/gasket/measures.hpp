#pragma once

#include <string>
#include <vector>

#include "gasket/graph.hpp"
#include "gasket/harmonic.hpp"
#include "gasket/rational.hpp"

namespace gasket {

enum class MeasureKind { hausdorff, kusuoka, energy };

std::string to_string(MeasureKind kind);
MeasureKind parse_measure_kind(const std::string& name);

/// Exact cell masses of one measure at a fixed level; masses[w.index()] is the mass of F_w(S).
struct CellMeasure {
    MeasureKind kind = MeasureKind::hausdorff;
    int level = 0;
    std::vector<Rational> masses;

    const Rational& mass(const CellWord& w) const;
    Rational total() const;
};

/// nu(F_w(S)) = (1/2)(5/3)^m tr(Y_w^t Y_w).
Rational kusuoka_mass(const CellWord& w);

/// mu(F_w(S)) = 3^-m.
Rational hausdorff_mass(const CellWord& w);

CellMeasure hausdorff_measure_table(int level);
CellMeasure kusuoka_measure_table(int level);
/// Energy measure of the harmonic function with boundary data u.
CellMeasure energy_measure_table(const BoundaryTriple<Rational>& u, int level);

/// Sums a level-m table into level m-1 parents.
CellMeasure coarsen(const CellMeasure& fine);

/// max over level-m cells of |nu(w) - (1/3) sum_i nu_<h_i>(w)|, in exact arithmetic.
Rational kusuoka_identity_check(int level);

struct SingularityDiagnostic {
    int level = 0;
    Rational max_ratio;
    Rational min_ratio;
    Rational ratio_word_one;  ///< 3^m nu(1^m)
};

/// Density ratios 3^m nu(w) over all level-m cells.
SingularityDiagnostic singularity_diagnostic(int level);

}  // namespace gasket

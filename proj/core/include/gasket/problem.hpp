#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gasket/graph.hpp"
#include "gasket/matrix3.hpp"

namespace gasket {

/// Scalar nonlinearity in y used by the built-in drivers.
struct ScalarLaw {
    enum class Kind { zero, linear, sine, sat_exp, table };
    Kind kind = Kind::zero;
    double coef = 0.0;  ///< linear: coef * y
    double amp = 0.0;   ///< sine: amp * sin(y); sat_exp: amp * sign(y) * (1 - exp(-rate |y|))
    double rate = 1.0;
    std::vector<double> xs;  ///< table: piecewise linear, constant beyond the ends
    std::vector<double> ys;

    static ScalarLaw zero() { return {}; }
    static ScalarLaw linear(double c);
    static ScalarLaw sine(double amplitude);
    static ScalarLaw sat_exp(double amplitude, double rate);
    static ScalarLaw table(std::vector<double> xs, std::vector<double> ys);

    double operator()(double y) const;
    /// Global Lipschitz constant.
    double lipschitz() const;
    std::string describe() const;
};

struct TerminalSpec {
    enum class Kind { constant, bump, harmonic };
    Kind kind = Kind::constant;
    double value = 0.0;
    double center_x = 0.5;
    double center_y = 0.28867513459481287;  // centroid of the unit triangle
    double radius = 0.35;
    double height = 1.0;
    Vec3<double> boundary{0.0, 0.0, 0.0};  ///< harmonic: values at p1, p2, p3

    static TerminalSpec constant(double v);
    static TerminalSpec bump(double radius = 0.35, double height = 1.0);
    static TerminalSpec harmonic(Vec3<double> boundary);

    double at(const GasketPoint& p) const;
    std::vector<double> table(const LevelGraph& g) const;
};

/// Boundary data phi(t, p_i) on [0, T) x V_0.
struct BoundarySpec {
    enum class Kind { zero, constant, affine };
    Kind kind = Kind::zero;
    double value = 0.0;
    Vec3<double> values{0.0, 0.0, 0.0};
    Vec3<double> slopes{0.0, 0.0, 0.0};

    double operator()(double t, int i) const;
};

struct LinearCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Markovian terminal-boundary problem with drivers g(t, x, y) = g_law(y) and
/// f(t, x, y, z) = f_law(y) + z_slope * z. Shared by the chain BSDE and the weak PDE solvers.
struct ProblemSpec {
    ScalarLaw g;
    ScalarLaw f;
    double z_slope = 0.0;
    TerminalSpec terminal;
    BoundarySpec boundary;
    double horizon = 1.0;
    bool killed = false;
    std::optional<double> K0;
    std::optional<double> K1;
    std::optional<double> kappa0;
    std::optional<double> kappa1;

    static ProblemSpec linear(LinearCoefficients coeffs, TerminalSpec terminal, double horizon, bool killed);

    /// Declared constants, defaulting to the smallest values compatible with the laws:
    /// K0 = 2 max(Lip g, Lip_y f), K1 = |z_slope|.
    double declared_K0() const;
    double declared_K1() const;
    /// Set when g = a y and f = b y + c z.
    std::optional<LinearCoefficients> linear_coefficients() const;
};

ProblemSpec problem_from_json(const std::string& text);
ProblemSpec problem_from_file(const std::string& path);
std::string problem_to_json(const ProblemSpec& p);

}  // namespace gasket

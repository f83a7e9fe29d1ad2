#include "gasket/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gasket/errors.hpp"
#include "gasket/harmonic.hpp"

namespace gasket {

using nlohmann::json;

ScalarLaw ScalarLaw::linear(double c)
{
    ScalarLaw l;
    l.kind = Kind::linear;
    l.coef = c;
    return l;
}

ScalarLaw ScalarLaw::sine(double amplitude)
{
    ScalarLaw l;
    l.kind = Kind::sine;
    l.amp = amplitude;
    return l;
}

ScalarLaw ScalarLaw::sat_exp(double amplitude, double rate)
{
    if (!(rate > 0.0)) {
        throw UsageError("sat-exp rate must be positive");
    }
    ScalarLaw l;
    l.kind = Kind::sat_exp;
    l.amp = amplitude;
    l.rate = rate;
    return l;
}

ScalarLaw ScalarLaw::table(std::vector<double> xs, std::vector<double> ys)
{
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw UsageError("table law needs matching x and y lists with at least two points");
    }
    if (!std::is_sorted(xs.begin(), xs.end()) || std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
        throw UsageError("table law x values must be strictly increasing");
    }
    ScalarLaw l;
    l.kind = Kind::table;
    l.xs = std::move(xs);
    l.ys = std::move(ys);
    return l;
}

double ScalarLaw::operator()(double y) const
{
    switch (kind) {
    case Kind::zero:
        return 0.0;
    case Kind::linear:
        return coef * y;
    case Kind::sine:
        return amp * std::sin(y);
    case Kind::sat_exp:
        return amp * std::copysign(1.0 - std::exp(-rate * std::abs(y)), y);
    case Kind::table: {
        if (y <= xs.front()) {
            return ys.front();
        }
        if (y >= xs.back()) {
            return ys.back();
        }
        const auto it = std::upper_bound(xs.begin(), xs.end(), y);
        const std::size_t j = static_cast<std::size_t>(it - xs.begin());
        const double s = (y - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return ys[j - 1] + s * (ys[j] - ys[j - 1]);
    }
    }
    return 0.0;
}

double ScalarLaw::lipschitz() const
{
    switch (kind) {
    case Kind::zero:
        return 0.0;
    case Kind::linear:
        return std::abs(coef);
    case Kind::sine:
        return std::abs(amp);
    case Kind::sat_exp:
        return std::abs(amp) * rate;
    case Kind::table: {
        double l = 0.0;
        for (std::size_t j = 1; j < xs.size(); ++j) {
            l = std::max(l, std::abs((ys[j] - ys[j - 1]) / (xs[j] - xs[j - 1])));
        }
        return l;
    }
    }
    return 0.0;
}

std::string ScalarLaw::describe() const
{
    std::ostringstream s;
    switch (kind) {
    case Kind::zero:
        s << "0";
        break;
    case Kind::linear:
        s << coef << "*y";
        break;
    case Kind::sine:
        s << amp << "*sin(y)";
        break;
    case Kind::sat_exp:
        s << amp << "*sat_exp(" << rate << "*y)";
        break;
    case Kind::table:
        s << "table[" << xs.size() << "]";
        break;
    }
    return s.str();
}

TerminalSpec TerminalSpec::constant(double v)
{
    TerminalSpec t;
    t.kind = Kind::constant;
    t.value = v;
    return t;
}

TerminalSpec TerminalSpec::bump(double radius, double height)
{
    if (!(radius > 0.0)) {
        throw UsageError("bump radius must be positive");
    }
    TerminalSpec t;
    t.kind = Kind::bump;
    t.radius = radius;
    t.height = height;
    return t;
}

TerminalSpec TerminalSpec::harmonic(Vec3<double> boundary)
{
    TerminalSpec t;
    t.kind = Kind::harmonic;
    t.boundary = boundary;
    return t;
}

double TerminalSpec::at(const GasketPoint& p) const
{
    switch (kind) {
    case Kind::constant:
        return value;
    case Kind::bump: {
        const double dx = p.x_double() - center_x;
        const double dy = p.y_double() - center_y;
        const double s = (dx * dx + dy * dy) / (radius * radius);
        return s < 1.0 ? height * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
    }
    case Kind::harmonic:
        throw UsageError("a harmonic terminal has no pointwise formula; use table()");
    }
    return 0.0;
}

std::vector<double> TerminalSpec::table(const LevelGraph& g) const
{
    if (kind == Kind::harmonic) {
        return harmonic_extend_to_level<double>(boundary, g);
    }
    std::vector<double> out;
    out.reserve(g.vertex_count());
    for (const auto& v : g.vertices()) {
        out.push_back(at(v.coords));
    }
    return out;
}

double BoundarySpec::operator()(double t, int i) const
{
    switch (kind) {
    case Kind::zero:
        return 0.0;
    case Kind::constant:
        return value;
    case Kind::affine:
        return values[static_cast<std::size_t>(i)] + slopes[static_cast<std::size_t>(i)] * t;
    }
    return 0.0;
}

ProblemSpec ProblemSpec::linear(LinearCoefficients coeffs, TerminalSpec terminal, double horizon, bool killed)
{
    ProblemSpec p;
    p.g = ScalarLaw::linear(coeffs.a);
    p.f = ScalarLaw::linear(coeffs.b);
    p.z_slope = coeffs.c;
    p.terminal = std::move(terminal);
    p.horizon = horizon;
    p.killed = killed;
    return p;
}

double ProblemSpec::declared_K0() const
{
    return K0 ? *K0 : 2.0 * std::max(g.lipschitz(), f.lipschitz());
}

double ProblemSpec::declared_K1() const
{
    return K1 ? *K1 : std::abs(z_slope);
}

std::optional<LinearCoefficients> ProblemSpec::linear_coefficients() const
{
    auto coef = [](const ScalarLaw& l) -> std::optional<double> {
        if (l.kind == ScalarLaw::Kind::zero) {
            return 0.0;
        }
        if (l.kind == ScalarLaw::Kind::linear) {
            return l.coef;
        }
        return std::nullopt;
    };
    const auto a = coef(g);
    const auto b = coef(f);
    if (!a || !b) {
        return std::nullopt;
    }
    return LinearCoefficients{*a, *b, z_slope};
}

namespace {

double number(const json& j, const char* key, double fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_number()) {
        throw UsageError(std::string("field '") + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

Vec3<double> triple(const json& j, const char* key)
{
    if (!j.contains(key)) {
        return {0.0, 0.0, 0.0};
    }
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 3) {
        throw UsageError(std::string("field '") + key + "' must be an array of three numbers");
    }
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

ScalarLaw parse_law(const json& j)
{
    if (j.is_null()) {
        return ScalarLaw::zero();
    }
    const std::string law = j.value("law", "zero");
    if (law == "zero") {
        return ScalarLaw::zero();
    }
    if (law == "linear") {
        return ScalarLaw::linear(number(j, "coef", 0.0));
    }
    if (law == "sin") {
        return ScalarLaw::sine(number(j, "amp", 1.0));
    }
    if (law == "sat-exp") {
        return ScalarLaw::sat_exp(number(j, "amp", 1.0), number(j, "rate", 1.0));
    }
    if (law == "table") {
        return ScalarLaw::table(j.at("x").get<std::vector<double>>(), j.at("y").get<std::vector<double>>());
    }
    throw UsageError("unknown driver law '" + law + "' (expected zero, linear, sin, sat-exp or table)");
}

json law_to_json(const ScalarLaw& l)
{
    switch (l.kind) {
    case ScalarLaw::Kind::zero:
        return {{"law", "zero"}};
    case ScalarLaw::Kind::linear:
        return {{"law", "linear"}, {"coef", l.coef}};
    case ScalarLaw::Kind::sine:
        return {{"law", "sin"}, {"amp", l.amp}};
    case ScalarLaw::Kind::sat_exp:
        return {{"law", "sat-exp"}, {"amp", l.amp}, {"rate", l.rate}};
    case ScalarLaw::Kind::table:
        return {{"law", "table"}, {"x", l.xs}, {"y", l.ys}};
    }
    return {};
}

TerminalSpec parse_terminal(const json& j)
{
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") {
        return TerminalSpec::constant(number(j, "value", 0.0));
    }
    if (kind == "bump") {
        auto t = TerminalSpec::bump(number(j, "radius", 0.35), number(j, "height", 1.0));
        if (j.contains("center")) {
            const auto c = j.at("center").get<std::vector<double>>();
            if (c.size() != 2) {
                throw UsageError("bump center must be [x, y]");
            }
            t.center_x = c[0];
            t.center_y = c[1];
        }
        return t;
    }
    if (kind == "harmonic") {
        return TerminalSpec::harmonic(triple(j, "boundary"));
    }
    throw UsageError("unknown terminal kind '" + kind + "' (expected constant, bump or harmonic)");
}

BoundarySpec parse_boundary(const json& j)
{
    BoundarySpec b;
    const std::string kind = j.value("kind", "zero");
    if (kind == "zero") {
        return b;
    }
    if (kind == "constant") {
        b.kind = BoundarySpec::Kind::constant;
        b.value = number(j, "value", 0.0);
        return b;
    }
    if (kind == "affine") {
        b.kind = BoundarySpec::Kind::affine;
        b.values = triple(j, "values");
        b.slopes = triple(j, "slopes");
        return b;
    }
    throw UsageError("unknown boundary kind '" + kind + "' (expected zero, constant or affine)");
}

}  // namespace

ProblemSpec problem_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("problem file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw UsageError("problem must be a JSON object");
    }
    try {
        ProblemSpec p;
        if (j.contains("linear")) {
            const auto& l = j.at("linear");
            p.g = ScalarLaw::linear(number(l, "a", 0.0));
            p.f = ScalarLaw::linear(number(l, "b", 0.0));
            p.z_slope = number(l, "c", 0.0);
        } else {
            p.g = parse_law(j.value("g", json()));
            const json f = j.value("f", json());
            p.f = parse_law(f);
            p.z_slope = f.is_object() ? number(f, "z_slope", 0.0) : 0.0;
        }
        if (j.contains("terminal")) {
            p.terminal = parse_terminal(j.at("terminal"));
        }
        if (j.contains("boundary")) {
            p.boundary = parse_boundary(j.at("boundary"));
        }
        p.horizon = number(j, "horizon", 1.0);
        if (!(p.horizon > 0.0)) {
            throw UsageError("horizon must be positive");
        }
        const std::string duration = j.value("duration", "fixed");
        if (duration != "fixed" && duration != "killed") {
            throw UsageError("duration must be 'fixed' or 'killed'");
        }
        p.killed = duration == "killed";
        if (j.contains("K0")) {
            p.K0 = number(j, "K0", 0.0);
        }
        if (j.contains("K1")) {
            p.K1 = number(j, "K1", 0.0);
        }
        if (j.contains("kappa0")) {
            p.kappa0 = number(j, "kappa0", 0.0);
        }
        if (j.contains("kappa1")) {
            p.kappa1 = number(j, "kappa1", 0.0);
        }
        if (p.declared_K0() < 0.0 || p.declared_K1() < 0.0) {
            throw UsageError("declared Lipschitz constants must be non-negative");
        }
        return p;
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed problem: ") + e.what());
    }
}

ProblemSpec problem_from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open problem file " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return problem_from_json(s.str());
}

std::string problem_to_json(const ProblemSpec& p)
{
    json j;
    j["g"] = law_to_json(p.g);
    j["f"] = law_to_json(p.f);
    j["f"]["z_slope"] = p.z_slope;
    json t;
    switch (p.terminal.kind) {
    case TerminalSpec::Kind::constant:
        t = {{"kind", "constant"}, {"value", p.terminal.value}};
        break;
    case TerminalSpec::Kind::bump:
        t = {{"kind", "bump"},
             {"center", {p.terminal.center_x, p.terminal.center_y}},
             {"radius", p.terminal.radius},
             {"height", p.terminal.height}};
        break;
    case TerminalSpec::Kind::harmonic:
        t = {{"kind", "harmonic"}, {"boundary", p.terminal.boundary}};
        break;
    }
    j["terminal"] = t;
    switch (p.boundary.kind) {
    case BoundarySpec::Kind::zero:
        j["boundary"] = {{"kind", "zero"}};
        break;
    case BoundarySpec::Kind::constant:
        j["boundary"] = {{"kind", "constant"}, {"value", p.boundary.value}};
        break;
    case BoundarySpec::Kind::affine:
        j["boundary"] = {{"kind", "affine"}, {"values", p.boundary.values}, {"slopes", p.boundary.slopes}};
        break;
    }
    j["horizon"] = p.horizon;
    j["duration"] = p.killed ? "killed" : "fixed";
    j["K0"] = p.declared_K0();
    j["K1"] = p.declared_K1();
    if (p.kappa0) {
        j["kappa0"] = *p.kappa0;
    }
    if (p.kappa1) {
        j["kappa1"] = *p.kappa1;
    }
    return j.dump(2);
}

}  // namespace gasket

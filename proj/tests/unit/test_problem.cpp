#include <doctest.h>

#include <cmath>

#include <gasket/errors.hpp>
#include <gasket/problem.hpp>

using namespace gasket;

TEST_CASE("scalar laws")
{
    CHECK(ScalarLaw::zero()(3.0) == 0.0);
    CHECK(ScalarLaw::linear(-2.0)(1.5) == -3.0);
    CHECK(ScalarLaw::linear(-2.0).lipschitz() == 2.0);
    CHECK(ScalarLaw::sine(0.5)(1.0) == doctest::Approx(0.5 * std::sin(1.0)));
    CHECK(ScalarLaw::sine(-0.5).lipschitz() == 0.5);

    const auto s = ScalarLaw::sat_exp(2.0, 3.0);
    CHECK(s(0.0) == 0.0);
    CHECK(s(1.0) == doctest::Approx(2.0 * (1.0 - std::exp(-3.0))));
    CHECK(s(-1.0) == doctest::Approx(-s(1.0)));
    CHECK(s(100.0) == doctest::Approx(2.0));
    CHECK(s.lipschitz() == doctest::Approx(6.0));
    CHECK_THROWS_AS(ScalarLaw::sat_exp(1.0, 0.0), UsageError);

    const auto t = ScalarLaw::table({0.0, 1.0, 3.0}, {0.0, 2.0, 1.0});
    CHECK(t(0.5) == doctest::Approx(1.0));
    CHECK(t(2.0) == doctest::Approx(1.5));
    CHECK(t(-5.0) == 0.0);
    CHECK(t(9.0) == 1.0);
    CHECK(t.lipschitz() == doctest::Approx(2.0));
    CHECK_THROWS_AS(ScalarLaw::table({0.0, 0.0}, {1.0, 2.0}), UsageError);
    CHECK_THROWS_AS(ScalarLaw::table({0.0}, {1.0}), UsageError);
}

TEST_CASE("terminal and boundary data")
{
    const auto g = build_level_graph(2);
    const auto bump = TerminalSpec::bump(0.35, 2.0);
    const auto table = bump.table(g);
    CHECK(table.size() == g.vertex_count());
    for (int i = 0; i < 3; ++i) {
        CHECK(table[static_cast<std::size_t>(i)] == 0.0);
    }
    CHECK(*std::max_element(table.begin(), table.end()) > 0.0);
    CHECK(*std::max_element(table.begin(), table.end()) <= 2.0);
    CHECK_THROWS_AS(TerminalSpec::bump(0.0), UsageError);

    const auto h = TerminalSpec::harmonic({1.0, 0.0, 0.0}).table(g);
    CHECK(h[0] == 1.0);
    CHECK(h[1] == 0.0);
    CHECK_THROWS_AS(TerminalSpec::harmonic({1.0, 0.0, 0.0}).at(corner_point(1)), UsageError);

    BoundarySpec b;
    CHECK(b(0.3, 1) == 0.0);
    b.kind = BoundarySpec::Kind::affine;
    b.values = {1.0, 2.0, 3.0};
    b.slopes = {0.0, -1.0, 2.0};
    CHECK(b(0.5, 1) == doctest::Approx(1.5));
    CHECK(b(0.5, 2) == doctest::Approx(4.0));
}

TEST_CASE("problem JSON")
{
    const auto p = problem_from_json(R"({
        "g": {"law": "sin", "amp": 0.5},
        "f": {"law": "sat-exp", "amp": 0.5, "rate": 2.0, "z_slope": 0.3},
        "terminal": {"kind": "bump", "center": [0.5, 0.3], "radius": 0.2, "height": 1.5},
        "boundary": {"kind": "affine", "values": [1, 0, 0], "slopes": [0, 1, 0]},
        "horizon": 0.8,
        "duration": "killed",
        "kappa0": 0.1
    })");
    CHECK(p.g.kind == ScalarLaw::Kind::sine);
    CHECK(p.f.rate == 2.0);
    CHECK(p.z_slope == 0.3);
    CHECK(p.terminal.center_y == 0.3);
    CHECK(p.terminal.height == 1.5);
    CHECK(p.boundary(0.5, 1) == doctest::Approx(0.5));
    CHECK(p.horizon == 0.8);
    CHECK(p.killed);
    CHECK(p.kappa0 == 0.1);
    CHECK_FALSE(p.kappa1.has_value());
    CHECK(p.declared_K0() == doctest::Approx(2.0));
    CHECK(p.declared_K1() == doctest::Approx(0.3));
    CHECK_FALSE(p.linear_coefficients().has_value());

    const auto back = problem_from_json(problem_to_json(p));
    CHECK(back.f.amp == p.f.amp);
    CHECK(back.terminal.radius == p.terminal.radius);
    CHECK(back.boundary.slopes == p.boundary.slopes);
    CHECK(back.killed);

    const auto l = problem_from_json(R"({"linear": {"a": 0.5, "b": 0.3, "c": 0.4}, "K0": 3})");
    REQUIRE(l.linear_coefficients().has_value());
    CHECK(l.linear_coefficients()->c == 0.4);
    CHECK(l.declared_K0() == 3.0);
    CHECK_FALSE(l.killed);

    CHECK_THROWS_AS(problem_from_json("{"), UsageError);
    CHECK_THROWS_AS(problem_from_json("[1]"), UsageError);
    CHECK_THROWS_AS(problem_from_json(R"({"g": {"law": "cubic"}})"), UsageError);
    CHECK_THROWS_AS(problem_from_json(R"({"horizon": -1})"), UsageError);
    CHECK_THROWS_AS(problem_from_json(R"({"duration": "forever"})"), UsageError);
    CHECK_THROWS_AS(problem_from_json(R"({"horizon": "long"})"), UsageError);
    CHECK_THROWS_AS(problem_from_json(R"({"K1": -1})"), UsageError);
    CHECK_THROWS_AS(problem_from_json(R"({"terminal": {"kind": "bump", "center": [1]}})"), UsageError);
    CHECK_THROWS_AS(problem_from_file("/nonexistent/problem.json"), UsageError);
}

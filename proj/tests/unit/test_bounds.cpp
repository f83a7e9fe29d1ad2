#include <doctest.h>

#include <cmath>

#include <gasket/bounds.hpp>
#include <gasket/errors.hpp>

using namespace gasket;

TEST_CASE("spectral constants")
{
    const auto s = spectral_constants();
    CHECK(s.d_s == doctest::Approx(1.3652123889719707).epsilon(1e-15));
    CHECK(s.gamma_s == doctest::Approx(0.3173938055140146).epsilon(1e-15));
}

TEST_CASE("Mittag-Leffler function against closed forms")
{
    CHECK(mittag_leffler(1.0, 2.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    CHECK(mittag_leffler(0.7, 1.3, 0.0) == doctest::Approx(1.0 / std::tgamma(1.3)).epsilon(1e-15));
    for (double z : {-4.0, -1.0, 0.5, 3.0, 9.0}) {
        CHECK(mittag_leffler(1.0, 1.0, z) == doctest::Approx(std::exp(z)).epsilon(1e-13));
    }
    for (double z : {-1.0, 0.5, 3.0, 9.0}) {
        CHECK(mittag_leffler(0.5, 1.0, z) == doctest::Approx(std::exp(z * z) * std::erfc(-z)).epsilon(1e-12));
    }
    for (double z : {0.25, 4.0, 30.0}) {
        CHECK(mittag_leffler(2.0, 1.0, z) == doctest::Approx(std::cosh(std::sqrt(z))).epsilon(1e-13));
    }
    CHECK(mittag_leffler(2.0, 1.0, -9.0) == doctest::Approx(std::cos(3.0)).epsilon(1e-12));
}

TEST_CASE("Mittag-Leffler monotonicity and domain")
{
    const double g = spectral_constants().gamma_s;
    double previous = 0.0;
    for (double z = 0.0; z <= 5.0; z += 0.25) {
        const double v = mittag_leffler(g, 1.0, z);
        CHECK(v > previous);
        previous = v;
    }
    // Smaller a grows faster for z > 1.
    CHECK(mittag_leffler(0.3, 1.0, 3.0) > mittag_leffler(0.6, 1.0, 3.0));
    CHECK_THROWS_AS(mittag_leffler(0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(mittag_leffler(1.0, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS(mittag_leffler(0.3, 1.0, 1e4), DomainError);
    CHECK_THROWS_AS(mittag_leffler(1.0, 1.0, -200.0), DomainError);
}

TEST_CASE("beta chain identity")
{
    const double g = spectral_constants().gamma_s;
    for (int p = 1; p <= 3; ++p) {
        const auto r = beta_chain_identity(p, g, 6);
        CHECK(r.rhs == doctest::Approx(std::pow(std::tgamma(g), p) / std::tgamma(p * g + 1.0)).epsilon(1e-14));
        CHECK(r.gap < 1e-9);
    }
    CHECK(beta_chain_identity(2, 0.5, 6).lhs == doctest::Approx(M_PI).epsilon(1e-9));
    CHECK_THROWS_AS(beta_chain_identity(5, g), UsageError);
    CHECK_THROWS_AS(beta_chain_identity(2, 1.5), DomainError);
}

TEST_CASE("moment and Mittag-Leffler bounds on a small ensemble")
{
    const auto g = build_level_graph(3);
    const auto k = build_step_kernel(g);
    const std::vector<double> times{0.25, 1.0};
    std::vector<QvEnsemble> ens;
    for (int start : {0, 3}) {
        ens.push_back(sample_quadratic_variation(k, start, times, 3000, 2, 2));
    }
    CHECK(ens[0].samples.size() == 3000);
    CHECK(ens[0].samples[0].size() == 2);
    const auto m = moment_bound_check(ens, {1, 2});
    CHECK(m.entries.size() == 8);
    CHECK(m.holds);
    CHECK(m.C > 0.0);
    for (const auto& e : m.entries) {
        CHECK(e.required_C <= m.C * (1.0 + 1e-12));
        CHECK(e.moment <= e.bound * (1.0 + 1e-9));
    }
    const auto ml = mittag_leffler_bound_check(ens, {0.5, 1.0}, m.C, 4);
    CHECK(ml.entries.size() == 4);
    for (const auto& e : ml.entries) {
        CHECK(e.bound >= 1.0);
        CHECK(e.estimate.mean >= 1.0);
    }
    CHECK_THROWS_AS(moment_bound_check({}, {1}), UsageError);
    CHECK_THROWS_AS(moment_bound_check(ens, {0}), UsageError);
}

TEST_CASE("exponential integrability at the exit time")
{
    const auto g = build_level_graph(3);
    const auto k = build_step_kernel(g);
    WalkConfig cfg{3, StartSpec::at(3), 1.0, 5, 5000, true, 2};
    const auto s = expint_horizon_doubling(cfg, k, 1.0, 2.0);
    CHECK(s.stable);
    CHECK(s.tail_mass < 1e-3);
    CHECK(s.at_horizon.mean > 1.0);
    CHECK_THROWS_AS(expint_horizon_doubling(cfg, k, 1.0, 0.0), UsageError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mmr/activation.hpp"
#include "mmr/errors.hpp"
#include "mmr/rng.hpp"

using namespace mmr;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("local_bounds examples") {
    auto relu = builtin("relu");
    auto r = local_bounds(relu->dphi, Interval(-1, 2));
    CHECK(r.lo == 0.0);
    CHECK(r.hi == 1.0);

    auto th = builtin("tanh");
    auto r2 = local_bounds(th->dphi, Interval(-1, 2));
    CHECK(r2.lo == doctest::Approx(1.0 - std::tanh(2.0) * std::tanh(2.0)));
    CHECK(r2.hi == doctest::Approx(1.0));
    auto g2 = testutil::grid_extrema(th->dphi.eval, -1, 2);
    CHECK(r2.lo <= g2.min + 1e-12);
    CHECK(r2.hi >= g2.max - 1e-12);

    // SiLU derivative on [-3,-2]: the global argmin lies inside, the
    // argmax does not.
    auto si = builtin("silu");
    auto r3 = local_bounds(si->dphi, Interval(-3, -2));
    auto g3 = testutil::grid_extrema(si->dphi.eval, -3, -2);
    CHECK(r3.lo == doctest::Approx(-0.0998).epsilon(1e-2));
    CHECK(r3.hi == doctest::Approx(-0.0881).epsilon(1e-2));
    CHECK(r3.lo <= g3.min + 1e-12);
    CHECK(r3.hi >= g3.max - 1e-12);
    CHECK(r3.lo >= g3.min - g3.max_step - 1e-12);
    CHECK(r3.hi <= g3.max + g3.max_step + 1e-12);
}

TEST_CASE("local_bounds degenerate and monotone cases") {
    SplitMix64 rng(5);
    for (const auto& name : ActivationRegistry::instance().names()) {
        auto spec = builtin(name);
        for (int i = 0; i < 20; ++i) {
            const double a = rng.uniform(-5, 5);
            auto r = local_bounds(spec->phi, Interval(a, a));
            CHECK(r.lo == spec->phi.eval(a));
            CHECK(r.hi == spec->phi.eval(a));
        }
        if (spec->phi.argmin == -kInf && spec->phi.argmax == kInf) {
            // Monotone descriptor: endpoint values.
            auto r = local_bounds(spec->phi, Interval(-2.5, 1.25));
            CHECK(r.lo == spec->phi.eval(-2.5));
            CHECK(r.hi == spec->phi.eval(1.25));
        }
    }
}

TEST_CASE("local_bounds grid oracle for all builtins") {
    SplitMix64 rng(123);
    for (const auto& name : ActivationRegistry::instance().names()) {
        auto spec = builtin(name);
        for (const auto* d : {&spec->phi, &spec->dphi}) {
            for (int trial = 0; trial < 100; ++trial) {
                const double a = rng.uniform(-10, 10);
                const double b = rng.uniform(-10, 10);
                const Interval x(std::min(a, b), std::max(a, b));
                const auto r = local_bounds(*d, x);
                const auto g = testutil::grid_extrema(d->eval, x.lo, x.hi);
                REQUIRE(r.lo <= g.min + 1e-12);
                REQUIRE(r.hi >= g.max - 1e-12);
                REQUIRE(r.lo >= g.min - g.max_step - 1e-12);
                REQUIRE(r.hi <= g.max + g.max_step + 1e-12);
            }
        }
    }
}

TEST_CASE("builtin constants") {
    auto relu = builtin("relu");
    CHECK(relu->phi.argmin == -kInf);
    CHECK(relu->phi.argmax == kInf);
    CHECK(relu->dphi.argmin == -kInf);
    CHECK(relu->dphi.argmax == kInf);
    CHECK(relu->dphi.eval(0.0) == 0.0);  // left-continuous convention

    auto th = builtin("tanh");
    CHECK(th->dphi.argmax == 0.0);
    auto sg = builtin("sigmoid");
    CHECK(sg->dphi.argmax == 0.0);

    auto si = builtin("silu");
    CHECK(si->phi.argmin == doctest::Approx(-1.2785).epsilon(5e-4));
    CHECK(si->phi.argmax == kInf);
    CHECK(si->dphi.argmin == doctest::Approx(-2.3994).epsilon(5e-4));
    CHECK(si->dphi.argmax == doctest::Approx(2.3994).epsilon(5e-4));
    // Refined constants are genuine roots.
    CHECK(std::abs(si->dphi.eval(si->phi.argmin)) < 1e-9);

    CHECK_THROWS_AS(builtin("gaussian"), UnknownActivation);
}

TEST_CASE("sigmoid does not overflow for large negative pre-activations") {
    auto sg = builtin("sigmoid");
    CHECK(std::isfinite(sg->phi.eval(-1e4)));
    CHECK(std::isfinite(sg->dphi.eval(-1e4)));
    CHECK(sg->phi.eval(-1e4) >= 0.0);
    auto r = local_bounds(sg->dphi, Interval(-1e4, -100.0));
    CHECK(std::isfinite(r.lo));
    CHECK(std::isfinite(r.hi));
}

TEST_CASE("register accepts a valid softsign spec") {
    ActivationSpec s;
    s.name = "softsign_test";
    s.phi = {[](double x) { return x / (1.0 + std::abs(x)); }, -kInf, kInf};
    s.dphi = {[](double x) {
                  const double d = 1.0 + std::abs(x);
                  return 1.0 / (d * d);
              },
              -kInf, 0.0};
    s.kinks = {0.0};
    ActivationRegistry::instance().add(s);
    auto got = builtin("softsign_test");
    CHECK(got->phi.eval(1.0) == doctest::Approx(0.5));
}

TEST_CASE("register rejects a corrupted derivative") {
    ActivationSpec s;
    s.name = "bad_deriv";
    s.phi = {[](double x) { return std::tanh(x); }, -kInf, kInf};
    s.dphi = {[](double x) {
                  const double t = std::tanh(x);
                  return 1.0 - t * t + 0.01;  // off by more than 1e-4
              },
              -kInf, 0.0};
    CHECK_THROWS_AS(ActivationRegistry::instance().add(s), DerivativeMismatch);
}

TEST_CASE("register rejects sine as not 3-piece on the sampled range") {
    ActivationSpec s;
    s.name = "sine_test";
    const double half_pi = std::acos(-1.0) / 2.0;
    s.phi = {[](double x) { return std::sin(x); }, -half_pi, half_pi};
    s.dphi = {[](double x) { return std::cos(x); }, std::acos(-1.0), 0.0};
    CHECK_THROWS_AS(ActivationRegistry::instance().add(s), ShapeViolation);
}

TEST_CASE("descriptor shape validation holds for every builtin") {
    for (const auto& name : ActivationRegistry::instance().names()) {
        auto spec = builtin(name);
        CHECK_NOTHROW(check_descriptor_shape(spec->phi, name + ".phi"));
        CHECK_NOTHROW(check_descriptor_shape(spec->dphi, name + ".dphi"));
        CHECK_NOTHROW(check_derivative_consistency(*spec));
    }
}

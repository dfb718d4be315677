#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "radwave/errors.hpp"
#include "radwave/model.hpp"

using namespace radwave;

TEST_SUITE("model") {

TEST_CASE("ModelSpec invariants") {
    CHECK_NOTHROW(check_invariants(ModelSpec::exp2d(0.25)));
    CHECK_NOTHROW(check_invariants(ModelSpec::power3d(0.5, 3.8)));
    CHECK_NOTHROW(check_invariants(ModelSpec::linear(3, 0.0)));
    ModelSpec bad = ModelSpec::exp2d(0.25);
    bad.dim = 3;
    CHECK_THROWS_AS(check_invariants(bad), DomainError);
    bad = ModelSpec::power3d(0.5, 3.8);
    bad.mass = 1.0;
    CHECK_THROWS_AS(check_invariants(bad), DomainError);
    bad = ModelSpec::power3d(0.5, 1.0);
    CHECK_THROWS_AS(check_invariants(bad), DomainError);
    CHECK(ModelSpec::power3d(0.5, 3.8).linearized() == ModelSpec::linear(3, 0.0));
}

TEST_CASE("f_eval examples") {
    const auto e = ModelSpec::exp2d(0.0);
    CHECK(f_eval(e, 0.0) == 0.0);
    CHECK(f_eval(e, 1.0) == doctest::Approx(-(std::numbers::e - 2.0)).epsilon(1e-15));
    CHECK(f_eval(ModelSpec::power3d(0.5, 4.0), 2.0) == -16.0);
    CHECK(f_eval(ModelSpec::linear(2, 1.0), 3.0) == 0.0);
}

TEST_CASE("F_eval examples") {
    for (const auto& s : {ModelSpec::exp2d(0.1), ModelSpec::power3d(0.5, 3.0), ModelSpec::linear(3, 0.0)})
        CHECK(F_eval(s, 0.0) == 0.0);
    CHECK(F_eval(ModelSpec::power3d(0.5, 3.0), 2.0) == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK(F_eval(ModelSpec::exp2d(0.0), 1.0) == doctest::Approx(-(std::numbers::e - 2.5)).epsilon(1e-14));
}

TEST_CASE("Exp2D small-u accuracy") {
    const auto e = ModelSpec::exp2d(0.0);
    // f ~ -u^2/2 - u^3/6, F ~ -u^3/6
    CHECK(f_eval(e, 1e-9) == doctest::Approx(-0.5e-18).epsilon(1e-8));
    CHECK(F_eval(e, 1e-6) == doctest::Approx(-1e-18 / 6.0).epsilon(1e-5));
}

TEST_CASE("overflow guard") {
    const auto e = ModelSpec::exp2d(0.0);
    CHECK_NOTHROW(f_eval(e, 700.0));
    try {
        f_eval(e, 700.5);
        FAIL("expected OverflowError");
    } catch (const OverflowError& err) {
        CHECK(err.value() == 700.5);
    }
    CHECK_THROWS_AS(F_eval(e, 701.0), OverflowError);
}

TEST_CASE("property: F' = f (central differences)") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    const double h = 1e-4;
    for (const auto& s : {ModelSpec::exp2d(0.25), ModelSpec::power3d(0.5, 3.8), ModelSpec::power3d(0.0, 5.0),
                          ModelSpec::linear(2, 1.0)}) {
        for (int i = 0; i < 200; ++i) {
            const double u = dist(rng);
            const double fd = (F_eval(s, u + h) - F_eval(s, u - h)) / (2 * h);
            const double scale = std::max(1.0, std::abs(f_eval(s, u)));
            CHECK(std::abs(fd - f_eval(s, u)) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("defocusing sign for u > 0, and the power case for all u") {
    for (double u = -5.0; u <= 5.0; u += 0.01) {
        CHECK(u * f_eval(ModelSpec::power3d(0.5, 3.8), u) <= 0.0);
        if (u > 0) CHECK(u * f_eval(ModelSpec::exp2d(0.25), u) <= 0.0);
    }
    // -(e^u - 1 - u) <= 0 everywhere, so u f(u) >= 0 for u < 0 in the exponential case;
    // the restoring force f(u) - m u still opposes u.
    CHECK(-1.0 * f_eval(ModelSpec::exp2d(0.25), -1.0) > 0.0);
    const auto e = ModelSpec::exp2d(0.25);
    for (double u = -5.0; u <= 5.0; u += 0.01) CHECK(u * (f_eval(e, u) - e.mass * u) <= 0.0);
}

TEST_CASE("critical_exponent examples") {
    auto r = critical_exponent(ModelSpec::power3d(0.0, 5.0));
    CHECK(r.s_c == 1.0);
    CHECK(r.classification == Criticality::EnergyCritical);
    CHECK(*r.p_energy_critical == 5.0);

    r = critical_exponent(ModelSpec::power3d(0.0, 7.0 / 3.0));
    CHECK(std::abs(r.s_c) <= 1e-15);
    CHECK(r.classification == Criticality::MassCritical);
    CHECK(r.p_mass_critical == doctest::Approx(7.0 / 3.0).epsilon(1e-15));

    r = critical_exponent(ModelSpec::power3d(1.0, 4.0));
    CHECK(r.s_c == 0.5);
    CHECK(r.classification == Criticality::InterCritical);
    CHECK(to_string(r.classification) == "inter-critical");

    CHECK_THROWS_AS(critical_exponent(ModelSpec::exp2d(0.25)), DomainError);
    CHECK_THROWS_AS(critical_exponent(ModelSpec::linear(3, 0.0)), DomainError);
}

TEST_CASE("critical_exponent: s_c = 0 iff p = p_mass, s_c = 1 iff p = p_energy") {
    for (double b : {0.0, 0.5, 1.0}) {
        const double pm = (3.0 + 4.0 + 2.0 * b) / 3.0;
        const double pe = 3.0 + 2.0 + 2.0 * b;
        CHECK(critical_exponent(ModelSpec::power3d(b, pm)).classification == Criticality::MassCritical);
        CHECK(critical_exponent(ModelSpec::power3d(b, pe)).classification == Criticality::EnergyCritical);
        CHECK(critical_exponent(ModelSpec::power3d(b, pm + 0.1)).s_c > 0.0);
        CHECK(critical_exponent(ModelSpec::power3d(b, pe - 0.1)).s_c < 1.0);
        CHECK(critical_exponent(ModelSpec::power3d(b, pe + 0.1)).classification ==
              Criticality::EnergySupercritical);
        CHECK(critical_exponent(ModelSpec::power3d(b, pm - 0.1)).classification == Criticality::MassSubcritical);
    }
}

TEST_CASE("validate_hypotheses examples") {
    CHECK(validate_hypotheses(ModelSpec::exp2d(0.5)).empty());
    CHECK(validate_hypotheses(ModelSpec::exp2d(0.0)).empty());

    auto v = validate_hypotheses(ModelSpec::exp2d(0.6));
    REQUIRE(v.size() == 1);
    CHECK(v[0].condition == "b <= 1/2");
    CHECK(!v[0].theorem.empty());

    v = validate_hypotheses(ModelSpec::power3d(0.5, 4.6));
    REQUIRE(v.size() == 1);
    CHECK(v[0].condition == "p < 4+b");

    v = validate_hypotheses(ModelSpec::power3d(0.0, 3.0));
    REQUIRE(v.size() == 1);
    CHECK(v[0].condition == "b > 0");

    v = validate_hypotheses(ModelSpec::power3d(0.5, 1.2));
    REQUIRE(v.size() == 1);
    CHECK(v[0].condition == "p >= 1+b");

    CHECK(validate_hypotheses(ModelSpec::power3d(0.5, 1.5)).empty());
    CHECK(validate_hypotheses(ModelSpec::power3d(0.5, 3.8)).empty());
    CHECK(validate_hypotheses(ModelSpec::linear(3, 0.0)).empty());
}

TEST_CASE("admissible pairs") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(admissible_pair_check(inf, 6));
    CHECK(admissible_pair_check(5, 10));
    CHECK(admissible_pair_check(4, 12));
    CHECK(admissible_pair_check(8, 8));
    CHECK_FALSE(admissible_pair_check(4, 8));
    CHECK_FALSE(admissible_pair_check(2, inf));
    CHECK_FALSE(admissible_pair_check(2, 1e300));

    const auto [q, r] = strichartz_pair(3.5, 0.2);
    CHECK(q == doctest::Approx(2.0 / 0.3));
    CHECK(admissible_pair_check(q, r));
}

TEST_CASE("property: the pair from (p, b) is admissible on (3+b, 4+b)") {
    for (double b : {0.0, 0.2, 0.5, 1.0}) {
        for (int i = 1; i <= 50; ++i) {
            const double p = 3.0 + b + i / 51.0;
            const auto [q, r] = strichartz_pair(p, b);
            CHECK(admissible_pair_check(q, r));
        }
    }
}

TEST_CASE("kind names round trip") {
    for (auto k : {NonlinearityKind::Exp2D, NonlinearityKind::Power3D, NonlinearityKind::Linear})
        CHECK(parse_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_kind("cubic"), DomainError);
}

}  // TEST_SUITE

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "saddlescope/elliptic_lift.hpp"

using namespace saddlescope;

namespace {

FixedPointRecord elliptic_q(double mu) {
    FixedPointRecord q = classify(MapSpec::standard(mu), {0.5, 0.0});
    REQUIRE(q.classification == Classification::Elliptic);
    return q;
}

// an integer-matrix map that is linearly conjugate to the rotation by pi/3
MapSpec rotation_pi3_map() { return MapSpec::linear_torus(1, 1, -1, 0); }

}  // namespace

TEST_CASE("rotation angle from the trace") {
    CHECK(rotation_angle(MapSpec::standard(1.0), elliptic_q(1.0)) ==
          doctest::Approx(kPi / 3.0).epsilon(1e-12));
    CHECK(rotation_angle(MapSpec::standard(2.0), elliptic_q(2.0)) ==
          doctest::Approx(kPi / 2.0).epsilon(1e-12));
    double a399 = rotation_angle(MapSpec::standard(3.99), elliptic_q(3.99));
    CHECK(a399 == doctest::Approx(std::acos(-0.995)).epsilon(1e-12));
    CHECK(a399 > 3.0);  // close to pi

    FixedPointRecord p = classify(MapSpec::standard(1.0), {0.0, 0.0});
    CHECK_THROWS_AS(rotation_angle(MapSpec::standard(1.0), p), NotElliptic);
}

TEST_CASE("chart conjugation turns the derivative into a rigid rotation") {
    for (double mu : {0.5, 1.0, 2.0, 3.5}) {
        MapSpec m = MapSpec::standard(mu);
        PolarChart chart = make_polar_chart(m, elliptic_q(mu));
        Jacobian2 j = jacobian(m, {0.5, 0.0});
        Mat2 conj = chart.inverse * j * chart.transform;
        Mat2 rot = Mat2::rotation(chart.alpha);
        CHECK(std::abs(conj.a11 - rot.a11) < 1e-12);
        CHECK(std::abs(conj.a12 - rot.a12) < 1e-12);
        CHECK(std::abs(conj.a21 - rot.a21) < 1e-12);
        CHECK(std::abs(conj.a22 - rot.a22) < 1e-12);
    }
}

TEST_CASE("lift_step on a linear elliptic map is the exact rotation") {
    MapSpec rot = rotation_pi3_map();
    FixedPointRecord q = classify(rot, {0.0, 0.0});
    REQUIRE(q.classification == Classification::Elliptic);
    PolarChart chart = make_polar_chart(rot, q);
    CHECK(chart.alpha == doctest::Approx(kPi / 3.0).epsilon(1e-12));

    PolarLiftState st{0.3, 0.05};
    for (int i = 0; i < 12; ++i) {
        PolarLiftState next = lift_step(rot, chart, st);
        CHECK(next.theta == doctest::Approx(st.theta + kPi / 3.0).epsilon(1e-9));
        CHECK(next.r == doctest::Approx(st.r).epsilon(1e-9));
        st = next;
    }
}

TEST_CASE("lift_step bounds follow the measured epsilon") {
    MapSpec m = MapSpec::standard(1.0);
    PolarChart chart = make_polar_chart(m, elliptic_q(1.0));
    for (double r : {1e-2, 1e-3, 1e-4}) {
        double eps = measure_epsilon(m, chart, r);
        CHECK(eps < 1.0);
        for (int i = 0; i < 64; ++i) {
            PolarLiftState st{kTwoPi * i / 64.0, r};
            PolarLiftState next = lift_step(m, chart, st);
            CHECK(std::abs(next.r - st.r) <= eps * st.r * (1.0 + 1e-9));
            CHECK(std::abs(next.theta - (st.theta + chart.alpha)) <=
                  0.5 * kPi * eps * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("epsilon decays linearly in the radius") {
    MapSpec m = MapSpec::standard(1.0);
    PolarChart chart = make_polar_chart(m, elliptic_q(1.0));
    double e2 = measure_epsilon(m, chart, 1e-2);
    double e3 = measure_epsilon(m, chart, 1e-3);
    double e4 = measure_epsilon(m, chart, 1e-4);
    CHECK(e3 / e2 <= 0.2);  // C^2 maps give epsilon(r) ~ r
    CHECK(e4 / e3 <= 0.2);
    SUBCASE("monotone over dyadic radii") {
        double prev = measure_epsilon(m, chart, 0.02);
        for (double r = 0.01; r > 1e-4; r *= 0.5) {
            double e = measure_epsilon(m, chart, r);
            CHECK(e <= prev * 1.1);  // within sampling noise
            prev = e;
        }
    }
}

TEST_CASE("epsilon conditions") {
    SUBCASE("worked example at alpha = pi/3, n = 7") {
        CHECK(verify_epsilon_conditions(kPi / 3.0, 7, 0.01));
        // slack: 7 (pi/2) 0.01 = 0.1100 against pi/3 = 1.047 and 29 pi/3 = 30.4
        CHECK(7.0 * 0.5 * kPi * 0.01 < 7.0 * kPi / 3.0 - kTwoPi);
        CHECK(7.0 * 0.5 * kPi * 0.01 < 7.0 * (kTwoPi - kPi / 3.0) - kTwoPi);
    }
    SUBCASE("n = 6 at alpha = pi/3 sits exactly on the boundary") {
        CHECK_THROWS_AS(verify_epsilon_conditions(kPi / 3.0, 6, 0.01), BadN);
    }
    SUBCASE("epsilon = 0 passes whenever the preconditions hold") {
        CHECK(verify_epsilon_conditions(1.0, 7, 0.0));
        CHECK(verify_epsilon_conditions(2.0, 4, 0.0));
    }
    SUBCASE("choose_n is minimal") {
        CHECK(choose_n(kPi / 3.0) == 7);
        CHECK(choose_n(kPi / 2.0) == 5);
    }
}

TEST_CASE("arc trap on the conjugated rigid rotation") {
    MapSpec rot = rotation_pi3_map();
    FixedPointRecord q = classify(rot, {0.0, 0.0});

    SUBCASE("narrow arc: iterate union meets the 2 pi translate at n = 7") {
        ArcTrapReport rep = arc_trap(rot, q, 0.1, 0.0, 0.1, 7);
        CHECK(rep.epsilon < 1e-9);
        CHECK(rep.k == 1);  // 6 alpha = 2 pi exactly: the sixth image coincides
        CHECK_FALSE(rep.consecutive_overlap);
    }
    SUBCASE("single step of a narrow arc cannot reach 2 pi") {
        ArcTrapReport rep = arc_trap(rot, q, 0.1, 0.0, 0.1, 1);
        CHECK(rep.k == 0);
        CHECK_FALSE(rep.closed);
    }
    SUBCASE("arc longer than alpha chains and closes with winding 1") {
        ArcTrapReport rep = arc_trap(rot, q, 0.1, 0.0, kPi / 3.0 + 0.4, 7);
        CHECK(rep.consecutive_overlap);
        CHECK(rep.k == 1);
        CHECK(rep.closed);
        CHECK(rep.winding == 1);
    }
}

TEST_CASE("arc trap closes for the standard map at mu = 1") {
    MapSpec m = MapSpec::standard(1.0);
    FixedPointRecord q = elliptic_q(1.0);
    double alpha = rotation_angle(m, q);
    ArcTrapReport rep = arc_trap(m, q, 1e-3, 0.0, alpha + 0.5, 7);
    CHECK(rep.conditions_ok);
    CHECK(rep.consecutive_overlap);
    CHECK(rep.k == 1);
    CHECK(rep.closed);
    CHECK(rep.winding == 1);
    CHECK(!rep.xi.empty());
    // xi stays near the elliptic point
    for (const auto& pt : rep.xi) {
        CHECK(torus_dist(pt, q.location) < 0.01);
    }
}

TEST_CASE("rotation numbers of circle-map lifts") {
    SUBCASE("rigid rotation") {
        double alpha = 0.3777;
        auto lift = [alpha](double x) { return x + alpha; };
        RotationNumberResult r = rotation_number(lift, 4000);
        CHECK(std::abs(r.value - alpha) <= r.error_estimate);
    }
    SUBCASE("identity") {
        auto lift = [](double x) { return x; };
        CHECK(rotation_number(lift, 1000).value == 0.0);
    }
    SUBCASE("perturbed rotation stays within the expected window") {
        auto lift = [](double x) { return x + 0.3 + 0.05 * std::sin(kTwoPi * x); };
        RotationNumberResult r = rotation_number(lift, 5000);
        CHECK(r.value > 0.25);
        CHECK(r.value < 0.35);
        // start-point independence
        double x = 0.731;
        for (int i = 0; i < 5000; ++i) x = lift(x);
        CHECK(std::abs((x - 0.731) / 5000.0 - r.value) <= 2.0 / 5000.0);
    }
    SUBCASE("non-monotone lifts are rejected") {
        auto lift = [](double x) { return x + 0.4 * std::sin(kTwoPi * x); };
        CHECK_THROWS_AS(rotation_number(lift, 100), NonMonotone);
    }
    SUBCASE("conjugacy invariance") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> dist(0.05, 0.12);
        double a = dist(rng);
        auto h = [a](double x) { return x + a * std::sin(kTwoPi * x); };  // circle diffeo
        auto h_inv = [&h](double y) {
            double x = y;
            for (int i = 0; i < 60; ++i) x = y - (h(x) - x);
            return x;
        };
        auto base = [](double x) { return x + 0.3 + 0.05 * std::sin(kTwoPi * x); };
        auto conj = [&](double x) { return h_inv(base(h(x))); };
        RotationNumberResult r1 = rotation_number(base, 4000);
        RotationNumberResult r2 = rotation_number(conj, 4000);
        CHECK(std::abs(r1.value - r2.value) <= 2.0 / 4000.0);
    }
}

#include <doctest.h>

#include "biokernel/quadrature.hpp"
#include "biokernel/specfun.hpp"

#include <cmath>

using namespace biokernel;
using namespace biokernel::quadrature;

namespace {
const QuadratureSettings kTight{1e-11, 1e-12, std::size_t(1) << 21};
const double kInvSqrt2Pi = 0.3989422804014327;
} // namespace

TEST_CASE("integrate_closed residues") {
    ClosedCircleContour circ{complexd(0.0), 1.0, 32, std::nullopt};
    auto r1 = integrate_closed([](complexd z) { return 1.0 / z; }, circ, kTight);
    CHECK(r1.converged);
    CHECK(std::abs(r1.value - 1.0) < 1e-11);

    auto r2 = integrate_closed([](complexd) { return complexd(1.0); }, circ, kTight);
    CHECK(std::abs(r2.value) < 1e-12);

    auto r3 = integrate_closed([](complexd z) { return std::exp(z) / (z * z); }, circ, kTight);
    CHECK(std::abs(r3.value - 1.0) < 1e-11);
}

TEST_CASE("integrate_closed invalid contour") {
    ClosedCircleContour bad{complexd(0.0), -1.0, 32, std::nullopt};
    CHECK_THROWS_AS(integrate_closed([](complexd z) { return z; }, bad, kTight),
                    InvalidContour);
}

TEST_CASE("integrate_vertical gaussians") {
    VerticalLineContour line{0.0, 9.0, 64};
    auto r1 = integrate_vertical([](complexd z) { return std::exp(z * z / 2.0); }, line,
                                 kTight);
    CHECK(r1.converged);
    CHECK(r1.value.real() == doctest::Approx(kInvSqrt2Pi).epsilon(1e-10));

    auto r2 = integrate_vertical(
        [](complexd z) { return std::exp(z * z / 2.0 - z); }, line, kTight);
    CHECK(r2.value.real() == doctest::Approx(0.24197072451914337).epsilon(1e-10));

    auto r3 = integrate_vertical([](complexd z) { return z * std::exp(z * z / 2.0); },
                                 line, kTight);
    CHECK(std::abs(r3.value) < 1e-11);
}

TEST_CASE("integrate_vertical tail guard") {
    VerticalLineContour line{0.0, 5.0, 64};
    CHECK_THROWS_AS(
        integrate_vertical([](complexd) { return complexd(1.0); }, line, kTight),
        TailTooFat);
}

TEST_CASE("integrate_hankel reciprocal-factorial residue series") {
    QuadratureSettings s{1e-9, 1e-10, std::size_t(1) << 21};
    HankelRayContour loop{1.0, 0.5, 40.0, 256};
    auto r1 = integrate_hankel(
        [](complexd u) { return specfun::gamma(complexd(1.0) - u); }, loop, s);
    // residue-theorem oracle: positively encircled poles at u = 1..40 with
    // Res_{u=k} Gamma(1-u) = -(-1)^{k-1}/(k-1)!; the sum tends to -1/e.
    double oracle = 0.0;
    double fact = 1.0;
    for (int k = 1; k <= 40; ++k) {
        if (k > 1) fact *= (k - 1);
        oracle -= ((k % 2 == 1) ? 1.0 : -1.0) / fact;
    }
    CHECK(oracle == doctest::Approx(-std::exp(-1.0)).epsilon(1e-12));
    CHECK(r1.value.real() == doctest::Approx(oracle).epsilon(1e-7));
    CHECK(std::abs(r1.value.imag()) < 1e-8);
}

TEST_CASE("integrate_hankel rational poles") {
    HankelRayContour loop2{1.0, 0.4, 2000.0, 512};
    QuadratureSettings s2{1e-9, 6e-4, std::size_t(1) << 21};
    auto r2 = integrate_hankel([](complexd u) { return 1.0 / (u - 2.0); }, loop2, s2);
    CHECK(r2.value.real() == doctest::Approx(1.0).epsilon(1e-3));

    auto r3 = integrate_hankel([](complexd u) { return 1.0 / (u + 5.0); }, loop2, s2);
    CHECK(std::abs(r3.value) < 1e-3);
}

TEST_CASE("choose_truncation roots") {
    // exact root of e^{-T^2/2} (1+T) = 1e-11 by bisection (test-side oracle)
    auto root_of = [](auto f) {
        double lo = 1.0, hi = 100.0;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            (f(mid) > 0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    double r1 = root_of([](double T) { return std::exp(-T * T / 2) * (1 + T) - 1e-11; });
    double t1 = choose_truncation([](double t) { return std::exp(-t * t / 2); }, 1e-10);
    CHECK(t1 >= r1);
    CHECK(t1 <= 1.5 * r1 + 1e-9);

    double r2 = root_of([](double T) { return std::exp(-2 * T) * (1 + T) - 1e-9; });
    double t2 = choose_truncation([](double t) { return std::exp(-2 * t); }, 1e-8);
    CHECK(t2 >= r2);
    CHECK(t2 <= 1.5 * r2 + 1e-9);

    CHECK_THROWS_AS(choose_truncation([](double) { return 1.0; }, 1e-8), NoDecay);
}

TEST_CASE("doubling stability") {
    // halving the node spacing changes the result by less than the reported error
    ClosedCircleContour c64{complexd(0.0), 1.0, 64, std::nullopt};
    ClosedCircleContour c128{complexd(0.0), 1.0, 128, std::nullopt};
    auto f = [](complexd z) { return std::exp(z) / (z - complexd(0.2, 0.1)); };
    auto a = integrate_closed(f, c64, kTight);
    auto b = integrate_closed(f, c128, kTight);
    CHECK(std::abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-14);
}

TEST_CASE("contour independence between admissible circles") {
    auto f = [](complexd z) { return std::exp(z) / z; };
    ClosedCircleContour small{complexd(0.0), 0.5, 32, std::nullopt};
    ClosedCircleContour large{complexd(0.0), 2.5, 32, std::nullopt};
    auto a = integrate_closed(f, small, kTight);
    auto b = integrate_closed(f, large, kTight);
    CHECK(std::abs(a.value - b.value) <= 2.0 * kTight.tolerance_for(a.value) + 1e-12);
}

TEST_CASE("truncation safety") {
    auto f = [](complexd z) { return std::exp(z * z / 2.0); };
    VerticalLineContour line1{0.0, 8.0, 64};
    VerticalLineContour line2{0.0, 12.0, 64};
    auto a = integrate_vertical(f, line1, kTight);
    auto b = integrate_vertical(f, line2, kTight);
    CHECK(std::abs(a.value - b.value) < kTight.abs_tol * 10);
}

TEST_CASE("linearity") {
    auto f = [](complexd z) { return 1.0 / z; };
    auto g = [](complexd z) { return std::exp(z) / (z * z); };
    const complexd alpha(2.0, 1.0), beta(-0.5, 0.3);
    ClosedCircleContour circ{complexd(0.0), 1.0, 32, std::nullopt};
    auto rf = integrate_closed(f, circ, kTight);
    auto rg = integrate_closed(g, circ, kTight);
    auto rc = integrate_closed(
        [&](complexd z) { return alpha * f(z) + beta * g(z); }, circ, kTight);
    CHECK(std::abs(rc.value - (alpha * rf.value + beta * rg.value)) <
          10 * (rf.error_estimate + rg.error_estimate + rc.error_estimate) + 1e-12);
}

TEST_CASE("phase offset never samples the distinguished point") {
    // circle through 0: no node should land on 0 at any refinement level
    for (std::size_t n : {8u, 16u, 64u, 256u, 2048u}) {
        Rule r = circle_rule(complexd(-0.5, 0.0), 0.5, n, std::nullopt);
        for (auto z : r.z) CHECK(std::abs(z) > 1e-6);
    }
}

TEST_CASE("integrate_segment") {
    auto r = integrate_segment([](double x) { return complexd(std::exp(-x * x)); }, -8.0,
                               8.0, kTight);
    CHECK(r.value.real() == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

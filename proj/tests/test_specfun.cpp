#include <doctest.h>

#include "biokernel/specfun.hpp"

#include <cmath>
#include <random>

using namespace biokernel;
using specfun::bessel_j;
using specfun::bessel_j_deriv;
using specfun::log_gamma;
using specfun::wright_bessel;

namespace {

// Independent oracle: Stirling series with upward recurrence shifts.  Used only
// in tests; a different algorithm from the Lanczos path under test.
complexd lgamma_stirling(complexd z) {
    complexd shift = 0.0;
    while (z.real() < 40.0) {
        shift += std::log(z);
        z += 1.0;
    }
    // Stirling with Bernoulli terms B_2..B_16
    static const double bern[] = {1.0 / 6,     -1.0 / 30,   1.0 / 42,   -1.0 / 30,
                                  5.0 / 66,    -691.0 / 2730, 7.0 / 6,  -3617.0 / 510};
    complexd s = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * M_PI);
    complexd zp = z;
    for (int n = 0; n < 8; ++n) {
        s += bern[n] / (2.0 * (n + 1) * (2.0 * (n + 1) - 1.0) * zp);
        zp *= z * z;
    }
    return s - shift;
}

} // namespace

TEST_CASE("log_gamma at distinguished points") {
    CHECK(std::abs(log_gamma(complexd(1.0))) < 1e-14);
    CHECK(log_gamma(complexd(0.5)).real() == doctest::Approx(0.5723649429247001).epsilon(1e-12));
    CHECK(std::abs(log_gamma(complexd(0.5)).imag()) < 1e-14);

    // Gamma(1+i) from an arbitrary-precision reference evaluation
    complexd g = std::exp(log_gamma(complexd(1.0, 1.0)));
    CHECK(g.real() == doctest::Approx(0.49801566811835604).epsilon(1e-12));
    CHECK(g.imag() == doctest::Approx(-0.15494982830181069).epsilon(1e-12));
}

TEST_CASE("log_gamma pole detection") {
    CHECK_THROWS_AS(log_gamma(complexd(0.0)), PoleAtNonpositiveInteger);
    CHECK_THROWS_AS(log_gamma(complexd(-3.0)), PoleAtNonpositiveInteger);
}

TEST_CASE("log_gamma against the Stirling oracle") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(0.1, 900.0), im(-900.0, 900.0);
    for (int i = 0; i < 200; ++i) {
        complexd z(re(rng), im(rng));
        complexd a = log_gamma(z), b = lgamma_stirling(z);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("log_gamma recurrence") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> re(0.1, 50.0), im(-50.0, 50.0);
    for (int i = 0; i < 100; ++i) {
        complexd z(re(rng), im(rng));
        complexd lhs = log_gamma(z + 1.0) - log_gamma(z) - std::log(z);
        CHECK(std::abs(lhs) < 1e-11);
    }
}

TEST_CASE("gamma reflection") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> re(-19.0, 19.0), im(-5.0, 5.0);
    int done = 0;
    while (done < 100) {
        complexd z(re(rng), im(rng));
        if (std::abs(z.real() - std::round(z.real())) < 1e-3) continue;
        complexd g1 = std::exp(log_gamma(z));
        complexd g2 = std::exp(log_gamma(1.0 - z));
        complexd lhs = g1 * g2 * std::sin(M_PI * z) / M_PI;
        CHECK(std::abs(lhs - 1.0) < 1e-10);
        ++done;
    }
}

TEST_CASE("bessel_j series values") {
    CHECK(bessel_j(0.0, 0.0) == doctest::Approx(1.0));
    CHECK(bessel_j(0.0, 1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-12));
    CHECK(bessel_j(1.0, 1.0) == doctest::Approx(0.4400505857449335).epsilon(1e-12));
}

TEST_CASE("bessel Wronskian") {
    const double nu = 1.0 / 3.0;
    const double h = 1e-5;
    for (double x : {1.0, 2.0, 5.0}) {
        auto dj = [&](double order, double t) {
            return (bessel_j(order, t + h) - bessel_j(order, t - h)) / (2.0 * h);
        };
        double lhs = bessel_j(nu, x) * dj(-nu, x) - dj(nu, x) * bessel_j(-nu, x);
        double rhs = -2.0 * std::sin(nu * M_PI) / (M_PI * x);
        CHECK(std::abs(lhs - rhs) < 1e-6);
    }
}

TEST_CASE("wright_bessel basics") {
    CHECK(wright_bessel(1.0, 1.0, 0.0) == doctest::Approx(1.0));
    // sum (-x)^k/(k!)^2 = J_0(2 sqrt x)
    CHECK(wright_bessel(1.0, 1.0, 1.0) ==
          doctest::Approx(0.22389077914123567).epsilon(1e-12));
}

TEST_CASE("wright_bessel two-depth truncation agreement") {
    // independent series summation at two fixed depths
    auto series = [](double a, double b, double x, int depth) {
        double sum = 0.0;
        for (int k = 0; k < depth; ++k) {
            double lt = (k == 0 ? 0.0 : k * std::log(x)) - std::lgamma(k + 1.0);
            double rg = specfun::rgamma(a * k + b);
            sum += ((k % 2 == 0) ? 1.0 : -1.0) * std::exp(lt) * rg;
        }
        return sum;
    };
    double s60 = series(2.0, 1.0, 1.0, 60);
    double s120 = series(2.0, 1.0, 1.0, 120);
    CHECK(std::abs(s60 - s120) < 1e-12);
    CHECK(wright_bessel(2.0, 1.0, 1.0) == doctest::Approx(s120).epsilon(1e-12));
}

TEST_CASE("wright_bessel Bessel identity") {
    for (double nu : {0.0, 1.0, 2.0}) {
        for (double x : {0.5, 1.0, 4.0}) {
            double lhs = wright_bessel(1.0, nu + 1.0, x);
            double rhs = std::pow(x, -nu / 2.0) * bessel_j(nu, 2.0 * std::sqrt(x));
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    }
}

TEST_CASE("bessel_j_deriv matches central differences") {
    const double h = 1e-6;
    for (double nu : {0.0, 0.5, 2.0}) {
        for (double x : {0.7, 3.0}) {
            double fd = (bessel_j(nu, x + h) - bessel_j(nu, x - h)) / (2.0 * h);
            CHECK(bessel_j_deriv(nu, x) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

#include <doctest.h>

#include "biokernel/wcatalog.hpp"
#include "biokernel/verify.hpp"

#include <cmath>
#include <random>

using namespace biokernel;
using wcatalog::WFunction;

namespace {
const QuadratureSettings kTight{1e-10, 1e-12, std::size_t(1) << 21};
const double kSqrt2Pi = 2.5066282746310002;
} // namespace

TEST_CASE("w_log_eval catalogue values") {
    // paper-normalized Gaussian: W(z) = e^{z^2/2}
    auto g = WFunction::gaussian(1.0, 0.0);
    CHECK(wcatalog::w_log_eval(g, complexd(2.0)).real() == doctest::Approx(2.0).epsilon(1e-14));

    // canonical LUE: W(0) = Gamma(2) = 1
    auto lue = WFunction::rational_lue(2, 0.0);
    CHECK(std::abs(wcatalog::w_log_eval(lue, complexd(0.0))) < 1e-13);

    // Polya product with b = (-1, -1) at z = 1: W = (e/2)^2
    auto p = WFunction::polya_product(0.0, 0.0, {-1.0, -1.0});
    CHECK(std::exp(wcatalog::w_log_eval(p, complexd(1.0)).real()) ==
          doctest::Approx(1.8472640247326626).epsilon(1e-12));
}

TEST_CASE("w_strip per variant") {
    auto p = WFunction::polya_product(0.0, 0.0, {-1.0, -0.5});
    auto s = wcatalog::w_strip(p);
    CHECK(s.c_minus == doctest::Approx(-1.0));
    CHECK(std::isinf(s.c_plus));

    auto lue = WFunction::rational_lue(3, 1.5);
    auto s2 = wcatalog::w_strip(lue);
    CHECK(std::isinf(s2.c_minus));
    CHECK(s2.c_plus == doctest::Approx(1.0));

    auto prod = WFunction::product(WFunction::gaussian(1.0, 0.0), lue);
    auto s3 = wcatalog::w_strip(prod);
    CHECK(std::isinf(s3.c_minus));
    CHECK(s3.c_plus == doctest::Approx(1.0));
}

TEST_CASE("w_inverse_transform recovers weights") {
    // canonical Gaussian: w(x) = e^{-x^2/2}
    auto g = WFunction::gaussian(1.0, 0.0, kSqrt2Pi);
    CHECK(wcatalog::w_inverse_transform(g, 0.0, 0.0, kTight).real() ==
          doctest::Approx(1.0).epsilon(1e-9));

    // canonical LUE N=2, nu=0: w(x) = x e^{-x}
    auto lue = WFunction::rational_lue(2, 0.0);
    QuadratureSettings s{1e-8, 1e-8, std::size_t(1) << 22};
    CHECK(wcatalog::w_inverse_transform(lue, 1.0, 0.3, s).real() ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-5));
    CHECK(std::abs(wcatalog::w_inverse_transform(lue, -1.0, 0.3, s)) < 1e-5);
}

TEST_CASE("w_mellin_inverse Gamma pair") {
    QuadratureSettings s{1e-9, 1e-10, std::size_t(1) << 21};
    // W = Gamma(s): w~(y) = e^{-y}
    auto w0 = WFunction::gamma_lue_star(0.0);
    CHECK(wcatalog::w_mellin_inverse(w0, 1.0, 0.5, s).real() ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
    // W = Gamma(1+s): w~(y) = y e^{-y}
    auto w1 = WFunction::gamma_lue_star(1.0);
    CHECK(wcatalog::w_mellin_inverse(w1, 2.0, 0.5, s).real() ==
          doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-8));
    // change of variables consistency
    CHECK(std::abs(wcatalog::w_mellin_inverse(w1, 3.0, 0.5, s) -
                   wcatalog::w_inverse_transform(w1, std::log(3.0), 0.5, s)) < 1e-10);
}

TEST_CASE("polya_decay_check") {
    auto p1 = WFunction::polya_product(1.0, 0.0, {});
    auto r1 = wcatalog::polya_decay_check(p1, 5, 0.0, {1.0, 10.0, 100.0});
    CHECK(r1.passed);

    auto p2 = WFunction::polya_product(0.0, 0.0, {-1.0, -1.0, -1.0});
    auto r2 = wcatalog::polya_decay_check(p2, 3, 0.0, {1.0, 10.0, 100.0});
    CHECK(r2.passed);

    auto p3 = WFunction::polya_product(0.0, 0.0, {-1.0});
    CHECK_THROWS_AS(wcatalog::polya_decay_check(p3, 3, 0.0, {1.0, 10.0, 100.0}),
                    PreconditionViolated);
}

TEST_CASE("convolve products") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> re(-2.0, 0.8), im(-2.0, 2.0);

    // LUE x LUE equals 1/(z-1)^{2N+nu1+nu2} up to a constant
    auto a = WFunction::rational_lue(2, 0.5);
    auto b = WFunction::rational_lue(2, 1.0);
    auto prod = wcatalog::convolve(a, b);
    auto direct = WFunction::rational_lue(4, 1.5); // 2N + nu1 + nu2 = 5.5 = 4 + 1.5
    complexd z0(0.2, 0.4);
    complexd offset = prod.log_eval(z0) - direct.log_eval(z0);
    for (int i = 0; i < 10; ++i) {
        complexd z(re(rng), im(rng));
        complexd d = prod.log_eval(z) - direct.log_eval(z) - offset;
        CHECK(std::abs(d) < 1e-11);
    }

    // Gaussian x Gaussian adds tau
    auto g1 = WFunction::gaussian(0.7, 0.1);
    auto g2 = WFunction::gaussian(0.5, -0.3);
    auto gp = wcatalog::convolve(g1, g2);
    auto gd = WFunction::gaussian(1.2, -0.2);
    for (int i = 0; i < 10; ++i) {
        complexd z(re(rng), im(rng));
        CHECK(std::abs(gp.log_eval(z) - gd.log_eval(z)) < 1e-12);
    }

    // identity element
    auto one = WFunction::gaussian(0.0, 0.0);
    auto idp = wcatalog::convolve(a, one);
    for (int i = 0; i < 5; ++i) {
        complexd z(re(rng), im(rng));
        CHECK(std::abs(idp.log_eval(z) - a.log_eval(z)) < 1e-13);
    }
}

TEST_CASE("fourier roundtrip") {
    QuadratureSettings s{1e-10, 1e-11, std::size_t(1) << 21};
    auto g = WFunction::gaussian(1.0, 0.0, kSqrt2Pi);
    std::vector<complexd> pts{{0.3, 0.0}, {-0.4, 0.2}, {0.0, 1.0}, {0.7, -0.5}, {-1.2, 0.0}};
    auto r = verify::check_fourier_roundtrip(g, pts, -12.0, 12.0, s, 1e-6);
    CHECK(r.passed);

    auto lue = WFunction::rational_lue(2, 0.0);
    QuadratureSettings s2{1e-7, 1e-7, std::size_t(1) << 22};
    std::vector<complexd> pts2{{0.0, 0.0}, {0.4, 0.3}, {-0.5, 0.0}, {0.2, -1.0}, {-2.0, 0.5}};
    auto r2 = verify::check_fourier_roundtrip(lue, pts2, 0.0, 40.0, s2, 1e-6);
    CHECK(r2.passed);
}

TEST_CASE("c-independence of the inverse transform") {
    auto g = WFunction::gaussian(1.0, 0.0, kSqrt2Pi);
    for (double x : {0.0, 0.7, -1.3}) {
        complexd w1 = wcatalog::w_inverse_transform(g, x, 0.0, kTight);
        complexd w2 = wcatalog::w_inverse_transform(g, x, 0.8, kTight);
        CHECK(std::abs(w1 - w2) < 1e-8);
    }
}

TEST_CASE("polya weights are nonnegative") {
    QuadratureSettings s{1e-9, 1e-10, std::size_t(1) << 22};
    auto p1 = WFunction::polya_product(0.5, 0.0, {-0.6, 0.3});
    auto p2 = WFunction::polya_product(0.0, 0.0, {-1.0, -0.8, -0.6, -0.5, -0.4});
    for (const auto& w : {p1, p2}) {
        for (int i = 0; i < 50; ++i) {
            double x = -6.0 + 12.0 * double(i) / 49.0;
            CHECK(wcatalog::w_inverse_transform(w, x, 0.0, s).real() > -1e-8);
        }
    }
}

TEST_CASE("strip soundness") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> re(-3.0, 3.0), im(-3.0, 3.0);
    auto p = WFunction::polya_product(0.0, 0.0, {-1.0, 0.8});
    auto s = wcatalog::w_strip(p); // (-1, 1.25)
    for (int i = 0; i < 200; ++i) {
        complexd z(re(rng), im(rng));
        bool inside = z.real() > s.c_minus && z.real() < s.c_plus;
        if (std::abs(z.real() - s.c_minus) < 1e-9 || std::abs(z.real() - s.c_plus) < 1e-9)
            continue;
        if (inside) {
            CHECK_NOTHROW(wcatalog::w_log_eval(p, z));
        } else {
            CHECK_THROWS_AS(wcatalog::w_log_eval(p, z), OutsideStrip);
        }
    }
}

TEST_CASE("polya parameter validation") {
    CHECK_THROWS_AS(WFunction::polya_product(0.0, 0.0, {}), PreconditionViolated);
    CHECK_THROWS_AS(WFunction::polya_product(0.0, 0.0, {0.0}), PreconditionViolated);
    CHECK_NOTHROW(WFunction::polya_product(0.0, 1.5, {-2.0}));
}

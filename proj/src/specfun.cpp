#include "biokernel/specfun.hpp"

#include <cmath>
#include <limits>

namespace biokernel::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Lanczos g=7, n=9 coefficients (Godfrey/Pugh set).
constexpr double kLanczosG = 7.0;
constexpr double kLanczosP[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

bool is_nonpositive_integer(complexd z, double eps = 1e-13) {
    if (std::abs(z.imag()) > eps) return false;
    double r = z.real();
    if (r > 0.5) return false;
    return std::abs(r - std::round(r)) <= eps * std::max(1.0, std::abs(r));
}

// log sin(pi z), continuous off the real axis crossings, overflow-safe for large |Im z|.
complexd log_sin_pi(complexd z) {
    const complexd ipz = complexd(0.0, kPi) * z;
    if (z.imag() >= 0) {
        // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i)
        return -ipz + std::log((std::exp(2.0 * ipz) - 1.0) / complexd(0.0, 2.0));
    }
    return ipz + std::log((complexd(1.0) - std::exp(-2.0 * ipz)) / complexd(0.0, 2.0));
}

complexd log_gamma_lanczos(complexd z) {
    // valid for Re z >= 0.5
    z -= 1.0;
    complexd x = kLanczosP[0];
    for (int i = 1; i < 9; ++i) x += kLanczosP[i] / (z + double(i));
    const complexd t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

} // namespace

complexd log_gamma(complexd z) {
    if (is_nonpositive_integer(z))
        throw PoleAtNonpositiveInteger("log_gamma pole at z = " + std::to_string(z.real()));
    if (z.real() >= 0.5) return log_gamma_lanczos(z);
    complexd lg = std::log(complexd(kPi)) - log_sin_pi(z) - log_gamma_lanczos(1.0 - z);
    if (z.imag() == 0.0 && z.real() > 0.0) lg = complexd(lg.real(), 0.0);
    return lg;
}

complexd gamma(complexd z) {
    if (is_nonpositive_integer(z)) throw PoleAtNonpositiveInteger("gamma pole");
    if (z.real() < 0.5)
        return kPi / (std::sin(kPi * z) * std::exp(log_gamma_lanczos(1.0 - z)));
    return std::exp(log_gamma_lanczos(z));
}

double rgamma(double s) {
    if (s >= 0.5) return std::exp(-log_gamma(complexd(s)).real());
    if (std::abs(s - std::round(s)) < 1e-14 * std::max(1.0, std::abs(s)))
        return 0.0; // pole of Gamma
    return std::sin(kPi * s) * std::exp(log_gamma(complexd(1.0 - s)).real()) / kPi;
}

double bessel_j(double nu, double x) {
    if (x < 0.0) throw PreconditionViolated("bessel_j: x must be >= 0");
    if (nu < 0.0 && std::abs(nu - std::round(nu)) < 1e-12) {
        int n = int(std::lround(-nu));
        double v = bessel_j(double(n), x);
        return (n % 2 == 0) ? v : -v;
    }
    if (nu <= -1.0)
        throw PreconditionViolated("bessel_j: order must be > -1 or a negative integer");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;

    const double xh = 0.5 * x;
    // term_0 = (x/2)^nu / Gamma(nu+1); term_{k+1} = term_k * (-(x/2)^2) / ((k+1)(nu+k+1))
    double term = std::exp(nu * std::log(xh)) * rgamma(nu + 1.0);
    double sum = term;
    const double q = -xh * xh;
    for (int k = 0; k < 500; ++k) {
        term *= q / ((k + 1.0) * (nu + k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-17 * (std::abs(sum) + 1e-300) && double(k) > xh) break;
    }
    return sum;
}

double bessel_j_deriv(double nu, double x) {
    return 0.5 * (bessel_j(nu - 1.0, x) - bessel_j(nu + 1.0, x));
}

double wright_bessel(double a, double b, double x) {
    if (!(a > 0.0)) throw PreconditionViolated("wright_bessel: a must be > 0");
    // sum_k (-x)^k / (k! Gamma(a k + b)); 1/Gamma handles poles of Gamma (term vanishes).
    double sum = rgamma(b);
    if (x == 0.0) return sum;
    const double logax = std::log(std::abs(x));
    double kfact_log = 0.0;
    for (int k = 1; k < 500; ++k) {
        kfact_log += std::log(double(k));
        double sign = (x > 0.0 && k % 2 == 1) ? -1.0 : 1.0;
        double term = sign * std::exp(k * logax - kfact_log) * rgamma(a * k + b);
        sum += term;
        if (std::abs(term) < 1e-16 * (std::abs(sum) + 1.0) && double(k) > std::abs(x)) break;
    }
    return sum;
}

} // namespace biokernel::specfun

#pragma once

#include "biokernel/types.hpp"

namespace biokernel::specfun {

/// Principal branch of log Gamma(z), analytic on C \ (-inf, 0], real on (0, inf).
/// Lanczos approximation with reflection for Re z < 1/2; ~1e-13 relative for |z| <= 1e3.
/// Throws PoleAtNonpositiveInteger at the poles.
complexd log_gamma(complexd z);

/// Gamma(z) = exp(log_gamma(z)).
complexd gamma(complexd z);

/// Bessel function J_nu(x) by ascending power series, intended for x <= 20.
/// Accepts any real order; negative integer orders use J_{-n} = (-1)^n J_n.
double bessel_j(double nu, double x);

/// Derivative J_nu'(x) = (J_{nu-1}(x) - J_{nu+1}(x)) / 2.
double bessel_j_deriv(double nu, double x);

/// Wright's generalized Bessel series  sum_{k>=0} (-x)^k / (k! Gamma(a k + b)),  a > 0.
double wright_bessel(double a, double b, double x);

/// 1/Gamma(s) for real s, finite everywhere (0 at the poles).
double rgamma(double s);

} // namespace biokernel::specfun

#pragma once

#include "biokernel/kernels.hpp"
#include "biokernel/quadrature.hpp"
#include "biokernel/types.hpp"
#include "biokernel/wcatalog.hpp"

#include <functional>
#include <vector>

namespace biokernel::limits {

/// Perturbed hard-edge Bessel kernel
///   K(x, x'; r) = oint ds/(2pi i) int dt/(2pi i) (s/t)^nu W(rt)/W(rs)
///                 exp(1/(4t) - x t - 1/(4s) + x' s) / (t - s),
/// s around 0 on a contour equivalent to the circle through 0 with center c/3,
/// t on c + iR (r > 0) or its inverted image (r = 0).  c < 0.
KernelValue pbessel_eval(double nu, double r, const wcatalog::WFunction& w, double x,
                         double xp, double c, const QuadratureSettings& settings);

/// Default line abscissa: c_minus/(5r) for a finite strip edge, else -0.75.
double pbessel_default_c(double r, const wcatalog::WFunction& w);

/// Classical hard-edge Bessel kernel in squared variables,
///   K(x,y) = [J_nu(sqrt x) sqrt(y) J_nu'(sqrt y) - sqrt(x) J_nu'(sqrt x) J_nu(sqrt y)]
///            / (2 (x - y)),
/// diagonal [J_nu^2 - J_{nu+1} J_{nu-1}] / 4.  Symmetric in (x, y).
/// The contour kernel satisfies pbessel(r=0; x, x') = (x/x')^{nu/2} * this.
double bessel_oracle(double nu, double x, double y);

/// Muttalib-Borodin hard-edge limit kernel (double contour form): u on the
/// given Hankel loop around [theta+eta, +inf), v on a vertical line.
KernelValue mb_limit_eval(double theta, double eta, const wcatalog::WFunction& w,
                          double y, double yp, const quadrature::HankelRayContour& loop,
                          const QuadratureSettings& settings);

/// Default loop for mb_limit_eval (standoff min(theta/4, 1/2), reach grown until
/// the integrand dies).
quadrature::HankelRayContour mb_limit_default_loop(double theta, double eta,
                                                   const wcatalog::WFunction& w, double yp,
                                                   const QuadratureSettings& settings);

/// Residue expansion of the same kernel: sum over k >= 1 of
///   (-1)^{k-1} theta/(k-1)! (y')^{u_k}/W(u_k) *
///   (1/2pi i) int W(v)/Gamma(1-(v-eta)/theta) y^{-v-1}/(u_k - v) dv.
KernelValue mb_limit_residue_series(double theta, double eta, const wcatalog::WFunction& w,
                                    double y, double yp, int k_max,
                                    const QuadratureSettings& settings);

/// One row of a convergence scan.
struct ScanRow {
    int n = 0;
    double sup_error = 0.0;
    double ratio_to_previous = 0.0; // 0 on the first row
};

/// sup over the grid of |prefactor(N) * finite(N, scaled x, scaled x') - limit(x, x')|.
std::vector<ScanRow> convergence_scan(
    const std::function<complexd(int, double, double)>& finite_kernel,
    const std::function<complexd(double, double)>& limit_kernel,
    const std::function<double(int, double)>& scaling,
    const std::function<double(int)>& prefactor, const std::vector<int>& n_list,
    const std::vector<std::pair<double, double>>& grid);

} // namespace biokernel::limits

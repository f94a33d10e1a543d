#pragma once

#include "biokernel/kernels.hpp"
#include "biokernel/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace biokernel::verify {

/// x-integration window for the real-axis quadratures of the checks.
struct QuadGrid {
    double lo = -10.0;
    double hi = 10.0;
    std::size_t panels = 16;
};

std::string report_json_line(const VerificationReport& r);

/// Gram matrix of (phi_k, psi_m) against the identity, max entrywise deviation.
VerificationReport check_biorthogonality(const kernels::EnsembleSpec& spec,
                                         const kernels::ContourPlan& plan,
                                         const QuadGrid& grid,
                                         const QuadratureSettings& settings,
                                         double tolerance = 1e-8);

/// int K(x,t) K(t,x') dt vs K(x,x') at the given points.
VerificationReport check_reproducing(const kernels::EnsembleSpec& spec,
                                     const kernels::ContourPlan& plan,
                                     const std::vector<std::pair<double, double>>& points,
                                     const QuadGrid& grid,
                                     const QuadratureSettings& settings,
                                     double tolerance = 1e-6);

/// int K(x,x) dx vs N (additive variables).
VerificationReport check_trace(const kernels::EnsembleSpec& spec,
                               const kernels::ContourPlan& plan, const QuadGrid& grid,
                               const QuadratureSettings& settings,
                               double tolerance = 1e-6);

/// Direct N-dimensional quadrature of the partition integral vs N! prod W(a_j);
/// Gaussian-weight ensembles with N <= 3.
VerificationReport check_partition(const kernels::EnsembleSpec& spec, double box,
                                   double tolerance = 1e-3);

/// (1/2!) det[K(x_i,x_j)] vs the explicit two-point density, N = 2 Gaussian.
VerificationReport check_density_vs_kernel(const kernels::EnsembleSpec& spec,
                                           const kernels::ContourPlan& plan,
                                           const std::vector<std::pair<double, double>>& points,
                                           const QuadratureSettings& settings,
                                           double tolerance = 1e-6);

/// Fourier round-trip: re-transform w_inverse_transform output and compare to W.
VerificationReport check_fourier_roundtrip(const wcatalog::WFunction& w,
                                           const std::vector<complexd>& strip_points,
                                           double x_lo, double x_hi,
                                           const QuadratureSettings& settings,
                                           double tolerance = 1e-6);

/// Wraps a convergence scan: passes when sup-errors decrease monotonically and
/// the final error is below `final_bound`.
VerificationReport check_limit(const std::vector<double>& sup_errors, double final_bound,
                               const std::string& name);

// Defect-injection hooks used by the tests: the same checks evaluated through an
// arbitrary kernel callable rather than kernel_eval.
using KernelFn = std::function<complexd(double, double)>;
VerificationReport check_trace_fn(const KernelFn& k, int n, const QuadGrid& grid,
                                  double tolerance = 1e-6);
VerificationReport check_reproducing_fn(const KernelFn& k,
                                        const std::vector<std::pair<double, double>>& points,
                                        const QuadGrid& grid, double tolerance = 1e-6);
VerificationReport check_biorthogonality_fns(const std::vector<std::function<complexd(double)>>& phis,
                                             const std::vector<std::function<complexd(double)>>& psis,
                                             const QuadGrid& grid, double tolerance = 1e-8);

} // namespace biokernel::verify

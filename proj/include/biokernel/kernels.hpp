#pragma once

#include "biokernel/quadrature.hpp"
#include "biokernel/types.hpp"
#include "biokernel/wcatalog.hpp"

#include <optional>
#include <vector>

namespace biokernel::kernels {

struct Source {
    complexd b{};
    int mult = 1;
};

/// Ensemble data: a W-function together with source points and multiplicities.
class EnsembleSpec {
public:
    EnsembleSpec(wcatalog::WFunction w, std::vector<Source> sources);

    const wcatalog::WFunction& W() const { return w_; }
    const std::vector<Source>& sources() const { return sources_; }
    int N() const { return n_; }
    bool all_simple() const;
    /// Sources repeated by multiplicity, in declaration order.
    const std::vector<complexd>& expanded() const { return expanded_; }

private:
    wcatalog::WFunction w_;
    std::vector<Source> sources_;
    std::vector<complexd> expanded_;
    int n_ = 0;
};

struct ContourPlan {
    quadrature::ClosedCircleContour sigma{};
    double line_abscissa = 0.0;
    std::optional<double> sine_correction_alpha{};
};

/// Circle around the sources with a strip-aware margin and a non-crossing
/// vertical line.  Throws NoRoom when no such plan fits; the caller must then
/// supply a crossing plan with sine_correction_alpha set.
ContourPlan default_contour_plan(const EnsembleSpec& spec);

/// Z_N = N! prod_j W(a_j), distinct sources.
complexd partition_function(const EnsembleSpec& spec);

/// Confluent partition function
///   N! prod_j (N_j - 1)! prod_{j<k} (b_k - b_j)^{N_j N_k} prod_j W(b_j)^{N_j}.
complexd partition_confluent(const EnsembleSpec& spec);

/// phi_n(x) = e^{a_n x} (0-based index into the expanded source list).
complexd phi_eval(const EnsembleSpec& spec, int n, double x);

/// psi_m(x) = (1 / Wt'(a_m)) (1/2pi i) int Wt(v) e^{-x v} / (v - a_m) dv,
/// Wt(z) = W(z) prod_j (z - a_j); distinct sources only.
complexd psi_eval(const EnsembleSpec& spec, int m, double x, const ContourPlan& plan,
                  const QuadratureSettings& settings);

/// Double contour integral kernel; adds the sine-correction term when the plan
/// declares a line/circle crossing.
KernelValue kernel_eval(const EnsembleSpec& spec, double x, double xp,
                        const ContourPlan& plan, const QuadratureSettings& settings);

/// Fully confluent single-formula variant (v^N/u^N - 1), single source at 0.
KernelValue kernel_fully_confluent(const EnsembleSpec& spec, double x, double xp,
                                   const quadrature::ClosedCircleContour& contour,
                                   const QuadratureSettings& settings);

/// K~(y, y') = (1/y) K(log y, log y'), y, y' > 0.
KernelValue multiplicative_kernel_eval(const EnsembleSpec& spec, double y, double yp,
                                       const ContourPlan& plan,
                                       const QuadratureSettings& settings);

/// Perturbed-LUE kernel: integrand v^N (1-u)^{N+nu} W(tau v) /
/// (u^N (1-v)^{N+nu} W(tau u)) * e^{-x v + x' u} / (v - u).
KernelValue plue_kernel_eval(double nu, int n, const wcatalog::WFunction& w, double tau,
                             double x, double xp, const ContourPlan& plan,
                             const QuadratureSettings& settings);
ContourPlan plue_default_plan(double nu, int n, const wcatalog::WFunction& w, double tau);

/// Muttalib-Borodin kernel with sources theta j + eta, j = 1..N, in the
/// multiplicative variables y, y' > 0.
KernelValue mb_kernel_eval(double theta, double eta, int n, const wcatalog::WFunction& w,
                           double y, double yp, const ContourPlan& plan,
                           const QuadratureSettings& settings);
ContourPlan mb_default_plan(double theta, double eta, int n, const wcatalog::WFunction& w);

/// Same kernel through the residue expansion of the u-integral: a k-sum of
/// residue terms, each with one v-line integral.
KernelValue mb_kernel_residue_sum(double theta, double eta, int n,
                                  const wcatalog::WFunction& w, double y, double yp,
                                  const QuadratureSettings& settings);

} // namespace biokernel::kernels

#include "biokernel/verify.hpp"

#include "biokernel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace biokernel::verify {

using kernels::ContourPlan;
using kernels::EnsembleSpec;
using quadrature::gauss_legendre;

namespace {

// Composite Gauss-Legendre sum of f over [lo, hi].
template <typename F>
auto panel_integrate(const F& f, const QuadGrid& g, std::size_t order = 32)
    -> decltype(f(0.0)) {
    const auto& [xg, wg] = gauss_legendre(order);
    decltype(f(0.0)) acc{};
    for (std::size_t p = 0; p < g.panels; ++p) {
        double a = g.lo + (g.hi - g.lo) * double(p) / double(g.panels);
        double b = g.lo + (g.hi - g.lo) * double(p + 1) / double(g.panels);
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t i = 0; i < xg.size(); ++i)
            acc += half * wg[i] * f(mid + half * xg[i]);
    }
    return acc;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

std::string report_json_line(const VerificationReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"check_name\":\"" << r.check_name << "\",\"discrepancy\":" << r.discrepancy
       << ",\"tolerance\":" << r.tolerance << ",\"passed\":" << (r.passed ? "true" : "false")
       << "}";
    return os.str();
}

VerificationReport check_biorthogonality_fns(
    const std::vector<std::function<complexd(double)>>& phis,
    const std::vector<std::function<complexd(double)>>& psis, const QuadGrid& grid,
    double tolerance) {
    const std::size_t n = phis.size();
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t m = 0; m < n; ++m) {
            complexd g = panel_integrate(
                [&](double x) { return phis[k](x) * psis[m](x); }, grid);
            double target = (k == m) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(g - target));
        }
    return VerificationReport::make("biorthogonality", worst, tolerance,
                                    "max |Gram - I| entry");
}

VerificationReport check_biorthogonality(const EnsembleSpec& spec, const ContourPlan& plan,
                                         const QuadGrid& grid,
                                         const QuadratureSettings& settings,
                                         double tolerance) {
    const int n = spec.N();
    std::vector<std::function<complexd(double)>> phis, psis;
    for (int k = 0; k < n; ++k) {
        phis.push_back([&spec, k](double x) { return kernels::phi_eval(spec, k, x); });
        psis.push_back([&spec, &plan, &settings, k](double x) {
            return kernels::psi_eval(spec, k, x, plan, settings);
        });
    }
    auto r = check_biorthogonality_fns(phis, psis, grid, tolerance);
    return r;
}

VerificationReport check_trace_fn(const KernelFn& k, int n, const QuadGrid& grid,
                                  double tolerance) {
    complexd tr = panel_integrate([&](double x) { return k(x, x); }, grid);
    double disc = std::abs(tr - double(n));
    return VerificationReport::make("trace", disc, tolerance,
                                    "integral of the kernel diagonal = " + fmt(tr.real()));
}

VerificationReport check_trace(const EnsembleSpec& spec, const ContourPlan& plan,
                               const QuadGrid& grid, const QuadratureSettings& settings,
                               double tolerance) {
    auto k = [&](double x, double xp) {
        return kernels::kernel_eval(spec, x, xp, plan, settings).value;
    };
    return check_trace_fn(k, spec.N(), grid, tolerance);
}

VerificationReport check_reproducing_fn(const KernelFn& k,
                                        const std::vector<std::pair<double, double>>& points,
                                        const QuadGrid& grid, double tolerance) {
    double worst = 0.0;
    for (const auto& [x, xp] : points) {
        complexd folded = panel_integrate(
            [&](double t) { return k(x, t) * k(t, xp); }, grid);
        worst = std::max(worst, std::abs(folded - k(x, xp)));
    }
    return VerificationReport::make("reproducing", worst, tolerance,
                                    "max |int K K - K| over points");
}

VerificationReport check_reproducing(const EnsembleSpec& spec, const ContourPlan& plan,
                                     const std::vector<std::pair<double, double>>& points,
                                     const QuadGrid& grid,
                                     const QuadratureSettings& settings, double tolerance) {
    auto k = [&](double x, double xp) {
        return kernels::kernel_eval(spec, x, xp, plan, settings).value;
    };
    return check_reproducing_fn(k, points, grid, tolerance);
}

VerificationReport check_partition(const EnsembleSpec& spec, double box, double tolerance) {
    // Gaussian-weight oracle: the derivative determinant equals
    // Delta(x) prod w(x_j) with w(x) = |norm|/sqrt(2 pi) e^{-x^2/2} for tau=1, gamma=0.
    using Kind = wcatalog::WFunction::Kind;
    const auto& w = spec.W();
    if (w.kind() != Kind::Gaussian || w.tau() != 1.0 || w.gamma_lin() != 0.0)
        throw PreconditionViolated("check_partition supports the Gaussian{tau=1,gamma=0} fixture");
    if (!spec.all_simple() || spec.N() > 3)
        throw PreconditionViolated("check_partition needs distinct sources, N <= 3");
    const int n = spec.N();
    std::vector<double> a;
    for (const auto& s : spec.sources()) a.push_back(s.b.real());
    const double wnorm = std::abs(w.normalization()) / std::sqrt(2.0 * M_PI);

    double delta_a = 1.0;
    for (int j = 0; j < n; ++j)
        for (int k2 = j + 1; k2 < n; ++k2) delta_a *= (a[std::size_t(k2)] - a[std::size_t(j)]);

    auto weight = [&](double x) { return wnorm * std::exp(-0.5 * x * x); };
    auto integrand = [&](const std::vector<double>& x) {
        // det[e^{a_j x_k}] / Delta(a) * Delta(x) * prod w(x_j)
        double det = 0.0;
        if (n == 1) det = std::exp(a[0] * x[0]);
        else if (n == 2)
            det = std::exp(a[0] * x[0] + a[1] * x[1]) - std::exp(a[0] * x[1] + a[1] * x[0]);
        else {
            static const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                            {2, 1, 0}, {1, 0, 2}, {0, 2, 1}};
            for (int p = 0; p < 6; ++p) {
                double t = std::exp(a[0] * x[std::size_t(perms[p][0])] +
                                    a[1] * x[std::size_t(perms[p][1])] +
                                    a[2] * x[std::size_t(perms[p][2])]);
                det += (p < 3 ? t : -t);
            }
        }
        double dx = 1.0;
        for (int j = 0; j < n; ++j)
            for (int k2 = j + 1; k2 < n; ++k2) dx *= (x[std::size_t(k2)] - x[std::size_t(j)]);
        double pw = 1.0;
        for (int j = 0; j < n; ++j) pw *= weight(x[std::size_t(j)]);
        return det / delta_a * dx * pw;
    };

    const std::size_t order = 48;
    const auto& [xg, wg] = gauss_legendre(order);
    std::vector<double> nodes(order), wts(order);
    for (std::size_t i = 0; i < order; ++i) {
        nodes[i] = box * xg[i];
        wts[i] = box * wg[i];
    }
    double z = 0.0;
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    if (n == 1) {
        for (std::size_t i = 0; i < order; ++i) {
            x[0] = nodes[i];
            z += wts[i] * integrand(x);
        }
    } else if (n == 2) {
        for (std::size_t i = 0; i < order; ++i)
            for (std::size_t j = 0; j < order; ++j) {
                x[0] = nodes[i];
                x[1] = nodes[j];
                z += wts[i] * wts[j] * integrand(x);
            }
    } else {
        for (std::size_t i = 0; i < order; ++i)
            for (std::size_t j = 0; j < order; ++j)
                for (std::size_t k2 = 0; k2 < order; ++k2) {
                    x[0] = nodes[i];
                    x[1] = nodes[j];
                    x[2] = nodes[k2];
                    z += wts[i] * wts[j] * wts[k2] * integrand(x);
                }
    }
    complexd zf = kernels::partition_function(spec);
    double disc = std::abs(z - zf) / std::abs(zf);
    return VerificationReport::make("partition", disc, tolerance,
                                    "relative gap, direct quadrature = " + fmt(z));
}

VerificationReport check_density_vs_kernel(const EnsembleSpec& spec, const ContourPlan& plan,
                                           const std::vector<std::pair<double, double>>& points,
                                           const QuadratureSettings& settings,
                                           double tolerance) {
    using Kind = wcatalog::WFunction::Kind;
    const auto& w = spec.W();
    if (w.kind() != Kind::Gaussian || w.tau() != 1.0 || w.gamma_lin() != 0.0 ||
        spec.N() != 2 || !spec.all_simple())
        throw PreconditionViolated("check_density_vs_kernel supports the N=2 Gaussian fixture");
    const double a1 = spec.sources()[0].b.real(), a2 = spec.sources()[1].b.real();
    const double wnorm = std::abs(w.normalization()) / std::sqrt(2.0 * M_PI);
    const complexd z2 = kernels::partition_function(spec);

    auto density = [&](double x1, double x2) {
        double det = std::exp(a1 * x1 + a2 * x2) - std::exp(a1 * x2 + a2 * x1);
        double dx = (x2 - x1);
        double pw = wnorm * wnorm * std::exp(-0.5 * (x1 * x1 + x2 * x2));
        return det / (a2 - a1) * dx * pw / z2.real();
    };
    double worst = 0.0;
    for (const auto& [x1, x2] : points) {
        complexd k11 = kernels::kernel_eval(spec, x1, x1, plan, settings).value;
        complexd k12 = kernels::kernel_eval(spec, x1, x2, plan, settings).value;
        complexd k21 = kernels::kernel_eval(spec, x2, x1, plan, settings).value;
        complexd k22 = kernels::kernel_eval(spec, x2, x2, plan, settings).value;
        complexd detk = (k11 * k22 - k12 * k21) / 2.0;
        double ref = density(x1, x2);
        worst = std::max(worst, std::abs(detk - ref) / std::max(1e-300, std::abs(ref)));
    }
    return VerificationReport::make("density_vs_kernel", worst, tolerance,
                                    "max relative gap over points");
}

VerificationReport check_fourier_roundtrip(const wcatalog::WFunction& w,
                                           const std::vector<complexd>& strip_points,
                                           double x_lo, double x_hi,
                                           const QuadratureSettings& settings,
                                           double tolerance) {
    // sample w on a fine grid once, then re-transform int e^{x z} w(x) dx
    const double c0 = 0.0;
    const std::size_t order = 32;
    const auto& [xg, wg] = gauss_legendre(order);
    // panel edges: dyadic away from 0 (one-sided weights are expensive to sample
    // near the support edge), uniform refinement elsewhere
    std::vector<double> edges{x_lo};
    if (x_lo == 0.0) {
        double e = 0.25;
        while (e < x_hi) {
            edges.push_back(e);
            e *= 2.0;
        }
        edges.push_back(x_hi);
    } else {
        for (std::size_t p = 1; p <= 64; ++p)
            edges.push_back(x_lo + (x_hi - x_lo) * double(p) / 64.0);
    }
    std::vector<double> xs, ws, wvals;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        double mid = 0.5 * (edges[p] + edges[p + 1]);
        double half = 0.5 * (edges[p + 1] - edges[p]);
        for (std::size_t i = 0; i < order; ++i) {
            xs.push_back(mid + half * xg[i]);
            ws.push_back(half * wg[i]);
        }
    }
    for (double x : xs)
        wvals.push_back(wcatalog::w_inverse_transform(w, x, c0, settings).real());
    double worst = 0.0;
    for (complexd z : strip_points) {
        complexd acc{};
        for (std::size_t i = 0; i < xs.size(); ++i)
            acc += ws[i] * wvals[i] * std::exp(xs[i] * z);
        complexd ref = w.eval(z);
        worst = std::max(worst, std::abs(acc - ref) / std::abs(ref));
    }
    return VerificationReport::make("fourier_roundtrip", worst, tolerance,
                                    "max relative gap over strip points");
}

VerificationReport check_limit(const std::vector<double>& sup_errors, double final_bound,
                               const std::string& name) {
    bool monotone = true;
    for (std::size_t i = 1; i < sup_errors.size(); ++i)
        if (!(sup_errors[i] < sup_errors[i - 1])) monotone = false;
    double final_err = sup_errors.empty() ? 1e300 : sup_errors.back();
    double disc = monotone ? final_err : 1e300;
    return VerificationReport::make(name, disc, final_bound,
                                    monotone ? "monotone decreasing"
                                             : "sup-errors not monotone");
}

} // namespace biokernel::verify

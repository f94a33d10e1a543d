#include "biokernel/limits.hpp"

#include "biokernel/specfun.hpp"

#include <algorithm>
#include <cmath>

namespace biokernel::limits {

using quadrature::Rule;
using specfun::bessel_j;
using specfun::bessel_j_deriv;
using specfun::log_gamma;
using wcatalog::AnalyticStrip;
using wcatalog::WFunction;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

} // namespace

double pbessel_default_c(double r, const WFunction& w) {
    AnalyticStrip s = w.strip();
    if (r > 0.0 && std::isfinite(s.c_minus)) {
        if (!(s.c_minus < 0.0)) throw NoRoom("pbessel needs c_minus < 0");
        return s.c_minus / (5.0 * r);
    }
    return -0.75;
}

KernelValue pbessel_eval(double nu, double r, const WFunction& w, double x, double xp,
                         double c, const QuadratureSettings& settings) {
    if (!(nu >= 0.0)) throw PreconditionViolated("pbessel: nu must be >= 0");
    if (!(r >= 0.0)) throw PreconditionViolated("pbessel: r must be >= 0");
    if (!(c < 0.0)) throw PreconditionViolated("pbessel: c must be negative");
    settings.validate();
    const bool with_w = r > 0.0;
    if (with_w) {
        AnalyticStrip s = w.strip();
        if (!(r * c > s.c_minus)) throw OutsideStrip("pbessel: r c below the strip");
    }
    // The kernel vanishes for x < 0 (the t-integrand is analytic left of the line
    // when no W factor obstructs; with W the fixtures keep x >= 0).
    if (x < 0.0 && !with_w) return {complexd(0.0), 0.0, 0, true};

    // s-contour: teardrop pinched at 0 equivalent to the circle through 0 with
    // center c/3; legs leave at +-pi/4 where exp(-1/(4s)) vanishes.
    double ds = 2.0 * std::abs(c) / 3.0;
    if (with_w) {
        AnalyticStrip s = w.strip();
        double lim = std::min(std::abs(s.c_minus), std::abs(s.c_plus)) / r;
        ds = std::min(ds, 0.8 * lim);
    }
    const double d_s = ds;

    auto Bs = [&, xp](complexd s) {
        complexd val = std::exp(-0.25 / s + xp * s + nu * std::log(-s));
        if (with_w) val *= std::exp(-w.log_eval(r * s));
        return val;
    };

    auto make_s = [d_s](int level) {
        return quadrature::teardrop_rule(complexd(0.0, 0.0), d_s, kPi / 4.0,
                                         7.0 * kPi / 4.0, 10u << level,
                                         48u << level, 46);
    };

    if (with_w) {
        // t on the vertical line; truncation from W(r t) decay.
        auto At = [&, x](complexd t) {
            return std::exp(0.25 / t - x * t - nu * std::log(-t) + w.log_eval(r * t));
        };
        auto wb = w.decay_bound(r * c);
        const double cap = std::exp(std::abs(x * c)) * std::pow(std::abs(c), -nu) + 1.0;
        double T = quadrature::choose_truncation(
            [&](double t) { return cap * wb(r * t) * std::pow(1.0 + t, 0.0); },
            settings.abs_tol);
        const double oc = 1.0 / std::max(0.05, std::abs(c));
        const double of = std::abs(x) + r * r * std::abs(c) + 0.25;
        auto make_t = [=](int level) {
            return quadrature::graded_line_rule(c, T, std::min(1.0, T), 10u << level, oc,
                                                std::max(0.5, std::abs(c)), of);
        };
        return quadrature::integrate_double(make_t, make_s, At, Bs, settings);
    }

    // r = 0: substitute t = -1/(4u); the line maps to the circle through 0 with
    // center -1/(8c) traversed CCW, deformed to a teardrop (x > 0) or kept as a
    // plain circle around 0 (x = 0, integer nu).
    //   I(s) = -(1/(4s)) (1/2pi i) oint (4u)^nu e^{-u + x/(4u)} / (u (u - u_s)) du
    const double rp = 1.0 / (4.0 * d_s); // poles u_s = -1/(4s) satisfy |u_s| >= rp
    const double d_u = 0.5 * rp;

    auto Au = [&, x](complexd u) {
        return std::exp(nu * std::log(4.0 * u) - u + x / (4.0 * u)) / u;
    };
    std::function<Rule(int)> make_u;
    if (x > 0.0) {
        make_u = [d_u](int level) {
            return quadrature::teardrop_rule(complexd(0.0, 0.0), d_u, -3.0 * kPi / 4.0,
                                             3.0 * kPi / 4.0, 10u << level, 48u << level,
                                             46);
        };
    } else if (is_integer(nu)) {
        make_u = [d_u](int level) {
            return quadrature::circle_rule(complexd(0.0, 0.0), d_u, 64u << level,
                                           std::nullopt);
        };
    } else {
        // x = 0 with non-integer nu: integrable endpoint (rho^{nu-1}); the
        // teardrop converges algebraically through the panel grading.
        make_u = [d_u](int level) {
            return quadrature::teardrop_rule(complexd(0.0, 0.0), d_u, -3.0 * kPi / 4.0,
                                             3.0 * kPi / 4.0, 10u << level, 48u << level,
                                             60);
        };
    }

    // Inner integral evaluated per s over the (shared) u-rule.
    complexd prev{};
    bool have = false;
    std::size_t total = 0;
    for (int level = 0; level < 5; ++level) {
        Rule ru = make_u(level);
        Rule rs = make_s(level);
        std::vector<complexd> wa(ru.size());
        for (std::size_t j = 0; j < ru.size(); ++j) wa[j] = ru.w[j] * Au(ru.z[j]);
        complexd acc{};
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const complexd s = rs.z[i];
            const complexd us = -1.0 / (4.0 * s);
            complexd inner{};
            for (std::size_t j = 0; j < ru.size(); ++j) inner += wa[j] / (ru.z[j] - us);
            inner *= -1.0 / (4.0 * s);
            acc += rs.w[i] * Bs(s) * inner;
        }
        total += ru.size() * rs.size();
        if (have && std::abs(acc - prev) <= settings.tolerance_for(acc))
            return {acc, std::abs(acc - prev), total, true};
        prev = acc;
        have = true;
    }
    return {prev, settings.tolerance_for(prev), total, false};
}

double bessel_oracle(double nu, double x, double y) {
    if (x < 0.0 || y < 0.0) throw PreconditionViolated("bessel_oracle: x, y >= 0");
    const double sx = std::sqrt(x), sy = std::sqrt(y);
    if (std::abs(x - y) < 1e-12) {
        double j = bessel_j(nu, sx);
        double jm = bessel_j(nu - 1.0, sx);
        double jp = bessel_j(nu + 1.0, sx);
        return (j * j - jp * jm) / 4.0;
    }
    const double num = bessel_j(nu, sx) * sy * bessel_j_deriv(nu, sy) -
                       sx * bessel_j_deriv(nu, sx) * bessel_j(nu, sy);
    return num / (2.0 * (x - y));
}

quadrature::HankelRayContour mb_limit_default_loop(double theta, double eta,
                                                   const WFunction& w, double yp,
                                                   const QuadratureSettings& settings) {
    quadrature::HankelRayContour loop;
    loop.ray_start = theta + eta;
    loop.standoff = std::min(theta / 4.0, 0.5);
    const double lyp = std::log(yp);
    auto mag = [&](double re) {
        complexd u(re, loop.standoff);
        complexd g = log_gamma(1.0 - (u - eta) / theta) - w.log_eval(u) + u * lyp;
        return std::exp(g.real());
    };
    double reach = loop.ray_start + 8.0 * theta + 8.0;
    while (mag(reach) * (1.0 + reach) > settings.abs_tol / 10.0 && reach < 1e5)
        reach *= 1.4;
    loop.reach = reach;
    loop.nodes_per_leg = 256;
    return loop;
}

namespace {

double mb_limit_line_abscissa(double /*theta*/, double eta, const WFunction& w,
                              const quadrature::HankelRayContour& loop) {
    AnalyticStrip s = w.strip();
    double hi = loop.ray_start - loop.standoff; // stay clear of the loop cap
    if (!(s.c_minus < hi)) throw NoRoom("mb limit: strip does not reach the loop");
    double c = eta;
    if (!(c > s.c_minus + 1e-6)) c = s.c_minus + 0.45 * std::min(hi - s.c_minus, 1.0);
    if (!(c < hi - 0.05)) c = 0.5 * (s.c_minus + hi);
    return c;
}

// Truncation for the v-line of the limit kernels: |W(c+it)| e^{pi |t| / (2 theta)}
// must decay (condition on W); sample-check and bound.
double mb_limit_truncation(double theta, const WFunction& w, double c, double ly,
                           const QuadratureSettings& settings) {
    auto wb = w.decay_bound(c);
    auto bound = [&](double t) {
        return wb(t) * std::exp(kPi * t / (2.0 * theta)) * std::exp(std::abs(ly * c)) /
               std::sqrt(1.0 + t);
    };
    // decay sanity: the bound must shrink between two reference heights
    const double b1 = bound(60.0), b2 = bound(120.0);
    if (!(b2 < b1))
        throw DecayViolation("W(eta + it) does not decay faster than e^{-pi |t|/(2 theta)}");
    return quadrature::choose_truncation(bound, settings.abs_tol);
}

} // namespace

KernelValue mb_limit_eval(double theta, double eta, const WFunction& w, double y,
                          double yp, const quadrature::HankelRayContour& loop,
                          const QuadratureSettings& settings) {
    if (!(theta > 0.0) || !(eta > -theta))
        throw PreconditionViolated("mb limit: theta > 0, eta > -theta");
    if (!(y > 0.0 && yp > 0.0)) throw PreconditionViolated("mb limit: y, y' > 0");
    loop.validate();
    settings.validate();
    const double ly = std::log(y), lyp = std::log(yp);
    const double c = mb_limit_line_abscissa(theta, eta, w, loop);
    const double T = mb_limit_truncation(theta, w, c, ly, settings);

    auto A = [&](complexd v) {
        return std::exp(w.log_eval(v) - log_gamma(1.0 - (v - eta) / theta) +
                        (-v - 1.0) * ly);
    };
    auto B = [&](complexd u) {
        return std::exp(log_gamma(1.0 - (u - eta) / theta) - w.log_eval(u) + u * lyp);
    };

    const double oc = 2.0 * std::log(2.0 + T) / theta + 2.0;
    auto make_inner = [=](int level) {
        return quadrature::graded_line_rule(c, T, std::min(1.0, T), 10u << level, oc,
                                            std::max(1.0, theta), std::abs(ly) + 1.0);
    };
    double ray = loop.ray_start, d = loop.standoff, reach = loop.reach;
    auto make_outer = [=](int level) {
        return quadrature::hankel_rule_graded(ray, d, reach, 10u << level);
    };
    return quadrature::integrate_double(make_inner, make_outer, A, B, settings);
}

KernelValue mb_limit_residue_series(double theta, double eta, const WFunction& w,
                                    double y, double yp, int k_max,
                                    const QuadratureSettings& settings) {
    if (!(theta > 0.0) || !(eta > -theta))
        throw PreconditionViolated("mb limit: theta > 0, eta > -theta");
    if (!(y > 0.0 && yp > 0.0)) throw PreconditionViolated("mb limit: y, y' > 0");
    if (k_max < 1) throw PreconditionViolated("k_max must be >= 1");
    settings.validate();
    const double ly = std::log(y), lyp = std::log(yp);
    quadrature::HankelRayContour probe{theta + eta, std::min(theta / 4.0, 0.5),
                                       theta + eta + 1.0, 64};
    const double c = mb_limit_line_abscissa(theta, eta, w, probe);
    const double T = mb_limit_truncation(theta, w, c, ly, settings);
    const double oc = 2.0 * std::log(2.0 + T) / theta + 2.0;

    // residue coefficients (-1)^{k-1} theta / (k-1)! * (y')^{u_k} / W(u_k)
    std::vector<complexd> coef;
    std::vector<double> uk;
    for (int k = 1; k <= k_max; ++k) {
        double u = theta * k + eta;
        complexd lw;
        try {
            lw = w.log_eval(u);
        } catch (const Error&) {
            throw ZeroW("W singular or zero at u_k");
        }
        double sign = (k % 2 == 1) ? 1.0 : -1.0;
        complexd cf = sign * std::exp(std::log(theta) - std::lgamma(double(k)) +
                                      complexd(u * lyp) - lw);
        coef.push_back(cf);
        uk.push_back(u);
        if (k > 3 && std::abs(cf) < 1e-250) break; // underflow guard
    }

    complexd prev{};
    bool have = false;
    std::size_t total = 0;
    for (int level = 0; level < 6; ++level) {
        Rule r = quadrature::graded_line_rule(c, T, std::min(1.0, T), 10u << level, oc,
                                              std::max(1.0, theta), std::abs(ly) + 1.0);
        // shared v-samples across the k-terms
        complexd acc{};
        double term_scale = 0.0;
        std::vector<complexd> terms(coef.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            const complexd v = r.z[i];
            const complexd base =
                r.w[i] * std::exp(w.log_eval(v) - log_gamma(1.0 - (v - eta) / theta) +
                                  (-v - 1.0) * ly);
            for (std::size_t k = 0; k < coef.size(); ++k)
                terms[k] += base / (uk[k] - v);
        }
        complexd partial{};
        std::size_t used_terms = coef.size();
        for (std::size_t k = 0; k < coef.size(); ++k) {
            complexd term = coef[k] * terms[k];
            partial += term;
            term_scale = std::abs(term);
            if (k > 2 && term_scale < 1e-12 * std::abs(partial)) {
                used_terms = k + 1;
                break;
            }
        }
        if (used_terms == coef.size() && coef.size() == std::size_t(k_max) &&
            term_scale >= 1e-12 * std::abs(partial) && std::abs(partial) > 0.0)
            throw SeriesNotConverged("k_max too small for the residue series");
        acc = partial;
        total += r.size() * used_terms;
        if (have && std::abs(acc - prev) <= settings.tolerance_for(acc))
            return {acc, std::abs(acc - prev), total, true};
        prev = acc;
        have = true;
    }
    return {prev, settings.tolerance_for(prev), total, false};
}

std::vector<ScanRow> convergence_scan(
    const std::function<complexd(int, double, double)>& finite_kernel,
    const std::function<complexd(double, double)>& limit_kernel,
    const std::function<double(int, double)>& scaling,
    const std::function<double(int)>& prefactor, const std::vector<int>& n_list,
    const std::vector<std::pair<double, double>>& grid) {
    std::vector<ScanRow> rows;
    std::vector<complexd> limit_vals;
    limit_vals.reserve(grid.size());
    for (const auto& [gx, gy] : grid) limit_vals.push_back(limit_kernel(gx, gy));
    double prev = 0.0;
    for (int n : n_list) {
        double sup = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& [gx, gy] = grid[i];
            complexd fin = finite_kernel(n, scaling(n, gx), scaling(n, gy));
            sup = std::max(sup, std::abs(prefactor(n) * fin - limit_vals[i]));
        }
        ScanRow row;
        row.n = n;
        row.sup_error = sup;
        row.ratio_to_previous = rows.empty() ? 0.0 : sup / prev;
        rows.push_back(row);
        prev = sup;
    }
    return rows;
}

} // namespace biokernel::limits

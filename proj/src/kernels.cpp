#include "biokernel/kernels.hpp"

#include "biokernel/specfun.hpp"

#include <algorithm>
#include <cmath>

namespace biokernel::kernels {

using quadrature::Rule;
using wcatalog::AnalyticStrip;
using wcatalog::WFunction;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

complexd log_w_or_zero(const WFunction& w, complexd z) {
    try {
        complexd lw = w.log_eval(z);
        if (!std::isfinite(lw.real()) || !std::isfinite(lw.imag()))
            throw ZeroW("W vanishes or is singular at a source point");
        return lw;
    } catch (const AtPoleOrZero&) {
        throw ZeroW("W vanishes at a source point");
    } catch (const PoleAtNonpositiveInteger&) {
        throw ZeroW("W singular at a source point");
    }
}

double lfact(int n) { return std::lgamma(double(n) + 1.0); }

complexd source_product(const std::vector<complexd>& a, complexd z) {
    complexd p = 1.0;
    for (complexd aj : a) p *= (z - aj);
    return p;
}

// Which side of the strip carries W's singularities (for contour closing).
// side: -1 all-left, +1 all-right, 0 entire, 2 both sides.
struct SingularSide {
    int side = 0;
    double start = 0.0;
};

SingularSide singular_side(const WFunction& w) {
    using Kind = WFunction::Kind;
    switch (w.kind()) {
        case Kind::Gaussian: return {0, 0.0};
        case Kind::RationalLUE: return {+1, 1.0};
        case Kind::GammaLUEstar: return {-1, -w.nu()};
        case Kind::BetaJUE: return {-1, -w.mu()};
        case Kind::BetaCLUE: return {2, 0.0};
        case Kind::PolyaProduct: {
            bool neg = false, pos = false;
            double l = -1e300, r = 1e300;
            for (double bj : w.polya_b()) {
                if (bj < 0) { neg = true; l = std::max(l, 1.0 / bj); }
                else { pos = true; r = std::min(r, 1.0 / bj); }
            }
            if (neg && pos) return {2, 0.0};
            if (neg) return {-1, l};
            if (pos) return {+1, r};
            return {0, 0.0};
        }
        case Kind::Product: {
            SingularSide a = singular_side(w.left());
            SingularSide b = singular_side(w.right());
            if (a.side == 0) return b;
            if (b.side == 0) return a;
            if (a.side != b.side || a.side == 2 || b.side == 2) return {2, 0.0};
            return {a.side, a.side > 0 ? std::min(a.start, b.start)
                                       : std::max(a.start, b.start)};
        }
    }
    return {0, 0.0};
}

// --- v-side integration strategy -------------------------------------------

struct VStrategy {
    enum class Route { Line, HankelRight, HankelLeft, Zero } route = Route::Line;
    double c = 0.0;          // line abscissa
    double T = 0.0;          // line truncation
    double osc_center = 0.0, osc_width = 1.0, osc_flat = 0.0;
    double ray = 0.0, standoff = 0.3, reach = 0.0; // hankel parameters
};

// Pick the v-integration route for an integrand |W(v)| * (R0+|t|)^npow * e^{-x c}.
VStrategy choose_v_strategy(const WFunction& w, int npow, double x, double c,
                            double dist_scale, const QuadratureSettings& settings,
                            double circle_right, double circle_left) {
    VStrategy s;
    s.c = c;
    auto wb = w.decay_bound(c);
    const double exc = std::exp(-x * c);
    const double r0 = std::abs(c) + dist_scale + 1.0;
    auto bound = [&](double t) {
        return wb(t) * std::pow(r0 + t, double(npow)) * exc / std::max(dist_scale, 0.1);
    };
    bool line_ok = false;
    double T = 0.0;
    try {
        T = quadrature::choose_truncation(bound, settings.abs_tol);
        line_ok = T <= 3e4;
    } catch (const NoDecay&) {
    }
    if (line_ok) {
        s.route = VStrategy::Route::Line;
        s.T = T;
        double oc = std::abs(x) * 0.0;
        (void)oc;
        return s;
    }
    SingularSide ss = singular_side(w);
    if (ss.side == +1) {
        if (x > 0.0) {
            s.route = VStrategy::Route::HankelRight;
            s.ray = ss.start;
            s.standoff = std::min(0.4, std::max(0.05, (ss.start - circle_right) / 3.0));
            return s;
        }
        if (x < 0.0) {
            s.route = VStrategy::Route::Zero;
            return s;
        }
    } else if (ss.side == -1) {
        if (x < 0.0) {
            s.route = VStrategy::Route::HankelLeft;
            s.ray = ss.start;
            s.standoff = std::min(0.4, std::max(0.05, (circle_left - ss.start) / 3.0));
            return s;
        }
        if (x > 0.0) {
            s.route = VStrategy::Route::Zero;
            return s;
        }
    }
    throw TailTooFat("v-integrand decays too slowly on the line and no one-sided "
                     "closure is available");
}

// Grow the reach until |A| at the loop's open ends falls below tolerance.
double grow_reach(const quadrature::Integrand& A, double ray, double standoff,
                  double abs_tol, int sgn /* +1 right, -1 left */) {
    double R = std::abs(ray) + 8.0 * standoff + 4.0;
    for (int i = 0; i < 200; ++i) {
        complexd p(sgn > 0 ? R : -R, standoff);
        double m = std::max(std::abs(A(p)), std::abs(A(std::conj(p))));
        if (m * (1.0 + R) < abs_tol / 10.0) return R;
        R *= 1.5;
        if (R > 1e6) break;
    }
    throw TailTooFat("hankel legs do not decay");
}

struct VRule {
    std::function<Rule(int)> make;
    double sign = 1.0; // factor applied to the v-side (contour-closing orientation)
};

VRule build_v_rule(const VStrategy& s, const quadrature::Integrand& A, double abs_tol) {
    VRule out;
    switch (s.route) {
        case VStrategy::Route::Line: {
            double T = s.T, oc = s.osc_center, ow = s.osc_width, of = s.osc_flat, c = s.c;
            out.make = [=](int level) {
                return quadrature::graded_line_rule(c, T, std::min(1.0, T), 10u << level,
                                                    oc, ow, of);
            };
            out.sign = 1.0;
            return out;
        }
        case VStrategy::Route::HankelRight: {
            double reach = grow_reach(A, s.ray, s.standoff, abs_tol, +1);
            double ray = s.ray, d = s.standoff;
            out.make = [=](int level) {
                return quadrature::hankel_rule_graded(ray, d, reach, 10u << level);
            };
            out.sign = -1.0; // int over the upward line = -(ccw loop around the right ray)
            return out;
        }
        case VStrategy::Route::HankelLeft: {
            double reach = grow_reach(A, s.ray, s.standoff, abs_tol, -1);
            double ray = s.ray, d = s.standoff;
            out.make = [=](int level) {
                return quadrature::left_hankel_rule_graded(ray, d, reach, 10u << level);
            };
            out.sign = 1.0; // int over the upward line = +(ccw loop around the left ray)
            return out;
        }
        case VStrategy::Route::Zero:
            out.make = [](int) { return Rule{}; };
            out.sign = 0.0;
            return out;
    }
    throw Error("unreachable");
}

double sinc_sine_term(double c, double alpha, double x, double xp) {
    // e^{c (x'-x)} sin(alpha (x-x')) / (pi (x-x')), diagonal limit alpha/pi
    const double d = x - xp;
    const double pre = std::exp(c * (xp - x)) / kPi;
    if (std::abs(alpha * d) < 1e-5) {
        double ad = alpha * d;
        return pre * alpha * (1.0 - ad * ad / 6.0);
    }
    return pre * std::sin(alpha * d) / d;
}

} // namespace

// --- EnsembleSpec -----------------------------------------------------------

EnsembleSpec::EnsembleSpec(wcatalog::WFunction w, std::vector<Source> sources)
    : w_(std::move(w)), sources_(std::move(sources)) {
    if (sources_.empty()) throw PreconditionViolated("EnsembleSpec needs sources");
    AnalyticStrip s = w_.strip();
    for (const auto& src : sources_) {
        if (src.mult < 1) throw PreconditionViolated("multiplicity must be >= 1");
        if (!(src.b.real() > s.c_minus && src.b.real() < s.c_plus))
            throw OutsideStrip("source outside the strip of W");
        (void)log_w_or_zero(w_, src.b); // W(b_j) != 0
        for (int k = 0; k < src.mult; ++k) expanded_.push_back(src.b);
        n_ += src.mult;
    }
}

bool EnsembleSpec::all_simple() const {
    for (const auto& s : sources_)
        if (s.mult != 1) return false;
    return true;
}

// --- plans ------------------------------------------------------------------

ContourPlan default_contour_plan(const EnsembleSpec& spec) {
    AnalyticStrip strip = spec.W().strip();
    const auto& a = spec.expanded();
    double max_re = -1e300, min_re = 1e300;
    complexd center{};
    for (complexd aj : a) {
        center += aj;
        max_re = std::max(max_re, aj.real());
        min_re = std::min(min_re, aj.real());
    }
    center /= double(a.size());
    double maxdist = 0.0;
    for (complexd aj : a) maxdist = std::max(maxdist, std::abs(aj - center));

    const double clip = std::min(strip.c_plus, max_re + 1.0) - std::max(strip.c_minus, min_re - 1.0);
    const double margin = 0.25 * clip;
    const double standoff = 0.05 * clip;
    double radius = maxdist + margin;
    double radius_cap = 1e300;
    if (std::isfinite(strip.c_plus))
        radius_cap = std::min(radius_cap, strip.c_plus - standoff - center.real());
    if (std::isfinite(strip.c_minus))
        radius_cap = std::min(radius_cap, center.real() - strip.c_minus - standoff);
    radius = std::min(radius, radius_cap);
    if (radius < maxdist + 0.02 * clip)
        throw NoRoom("sources span too much of the strip for a non-crossing plan; "
                     "supply a sine-corrected plan instead");

    const double gap = 0.02 * clip;
    double right_edge = center.real() + radius;
    double c;
    if (std::isfinite(strip.c_plus)) {
        c = 0.5 * (right_edge + strip.c_plus);
        if (!(c - right_edge >= gap && strip.c_plus - c >= gap)) {
            // fall back to the left side
            double left_edge = center.real() - radius;
            if (std::isfinite(strip.c_minus)) {
                c = 0.5 * (strip.c_minus + left_edge);
                if (!(left_edge - c >= gap && c - strip.c_minus >= gap))
                    throw NoRoom("no vertical line separates the circle from the strip edges");
            } else {
                c = left_edge - std::max(1.0, 0.5 * radius);
            }
        }
    } else {
        c = right_edge + std::max(1.0, 0.5 * radius);
    }

    ContourPlan plan;
    plan.sigma.center = center;
    plan.sigma.radius = radius;
    plan.sigma.nodes = std::max<std::size_t>(64, 8 * std::size_t(spec.N()));
    plan.line_abscissa = c;
    return plan;
}

// --- partition functions ----------------------------------------------------

complexd partition_function(const EnsembleSpec& spec) {
    if (!spec.all_simple())
        throw PreconditionViolated("partition_function needs distinct simple sources");
    complexd logz = lfact(spec.N());
    for (const auto& s : spec.sources()) logz += log_w_or_zero(spec.W(), s.b);
    return std::exp(logz);
}

complexd partition_confluent(const EnsembleSpec& spec) {
    const auto& srcs = spec.sources();
    complexd z = std::exp(complexd(lfact(spec.N())));
    for (const auto& s : srcs) z *= std::exp(complexd(lfact(s.mult - 1)));
    for (std::size_t j = 0; j < srcs.size(); ++j)
        for (std::size_t k = j + 1; k < srcs.size(); ++k) {
            complexd diff = srcs[k].b - srcs[j].b;
            int e = srcs[j].mult * srcs[k].mult;
            complexd p = 1.0;
            for (int i = 0; i < e; ++i) p *= diff;
            z *= p;
        }
    for (const auto& s : srcs)
        z *= std::exp(double(s.mult) * log_w_or_zero(spec.W(), s.b));
    return z;
}

// --- biorthogonal functions --------------------------------------------------

complexd phi_eval(const EnsembleSpec& spec, int n, double x) {
    const auto& a = spec.expanded();
    if (n < 0 || n >= int(a.size())) throw PreconditionViolated("phi index out of range");
    return std::exp(a[std::size_t(n)] * x);
}

complexd psi_eval(const EnsembleSpec& spec, int m, double x, const ContourPlan& plan,
                  const QuadratureSettings& settings) {
    if (!spec.all_simple()) throw ConfluentSources("psi_eval needs distinct sources");
    const auto& a = spec.expanded();
    if (m < 0 || m >= int(a.size())) throw PreconditionViolated("psi index out of range");
    for (complexd aj : a)
        if (std::abs(plan.line_abscissa - aj.real()) < 1e-12)
            throw PreconditionViolated("line abscissa must avoid Re a_j");

    const WFunction& w = spec.W();
    const complexd am = a[std::size_t(m)];
    auto A = [&](complexd v) {
        return std::exp(w.log_eval(v) - x * v) * source_product(a, v) / (v - am);
    };
    const double circle_right = plan.sigma.center.real() + plan.sigma.radius;
    const double circle_left = plan.sigma.center.real() - plan.sigma.radius;
    VStrategy strat = choose_v_strategy(w, spec.N() - 1, x, plan.line_abscissa, 1.0,
                                        settings, circle_right, circle_left);
    strat.osc_center = double(spec.N()) + 2.0;
    strat.osc_flat = std::abs(x) + 0.5;
    VRule vr = build_v_rule(strat, A, settings.abs_tol);
    if (vr.sign == 0.0) return 0.0;

    complexd wpm = std::exp(log_w_or_zero(w, am));
    for (std::size_t j = 0; j < a.size(); ++j)
        if (int(j) != m) wpm *= (am - a[j]);

    complexd prev{};
    bool have = false;
    for (int level = 0; level < 6; ++level) {
        Rule r = vr.make(level);
        complexd s{};
        for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * A(r.z[i]);
        s *= vr.sign / wpm;
        if (have && std::abs(s - prev) <= settings.tolerance_for(s)) return s;
        prev = s;
        have = true;
    }
    return prev;
}

// --- kernels ------------------------------------------------------------------

namespace {

KernelValue kernel_double(const EnsembleSpec& spec, double x, double xp,
                          const ContourPlan& plan, const QuadratureSettings& settings) {
    const WFunction& w = spec.W();
    const auto& a = spec.expanded();
    auto A = [&, x](complexd v) {
        return std::exp(w.log_eval(v) - x * v) * source_product(a, v);
    };
    auto B = [&, xp](complexd u) {
        return std::exp(xp * u - w.log_eval(u)) / source_product(a, u);
    };

    const double cr = plan.sigma.center.real() + plan.sigma.radius;
    const double cl = plan.sigma.center.real() - plan.sigma.radius;
    VStrategy strat = choose_v_strategy(w, spec.N(), x, plan.line_abscissa,
                                        std::max(0.2, std::abs(plan.line_abscissa - cr)),
                                        settings, cr, cl);
    // oscillation of prod (v - a_j) e^{-x v} along the line
    strat.osc_center = double(spec.N()) + 1.0;
    strat.osc_width = std::max(1.0, plan.sigma.radius);
    strat.osc_flat = std::abs(x) + std::abs(plan.line_abscissa) * w.tail(plan.line_abscissa).gauss_tau + 0.5;
    VRule vr = build_v_rule(strat, A, settings.abs_tol);
    if (vr.sign == 0.0) return {complexd(0.0), 0.0, 0, true};

    std::function<Rule(int)> make_inner = [vr](int level) {
        Rule r = vr.make(level);
        if (vr.sign != 1.0) r.scale(vr.sign);
        return r;
    };

    std::size_t n0 = plan.sigma.nodes;
    std::optional<double> offset = plan.sigma.node_phase_offset;
    complexd ctr = plan.sigma.center;
    double rad = plan.sigma.radius;
    std::function<Rule(int)> make_outer;
    if (plan.sine_correction_alpha) {
        // circle crossed by the line: integrate the two arcs separately with
        // panels graded toward the crossing points
        double cosq = (plan.line_abscissa - ctr.real()) / rad;
        if (!(std::abs(cosq) < 1.0))
            throw NoRoom("sine-corrected plan requires an actual crossing");
        double th = std::acos(cosq);
        make_outer = [=](int level) {
            return quadrature::split_circle_rule(ctr, rad, -th, th, 10u << level, 14);
        };
    } else {
        make_outer = [=](int level) {
            return quadrature::circle_rule(ctr, rad, n0 << level, offset);
        };
    }

    KernelValue kv = quadrature::integrate_double(make_inner, make_outer, A, B, settings);
    if (plan.sine_correction_alpha)
        kv.value += sinc_sine_term(plan.line_abscissa, *plan.sine_correction_alpha, x, xp);
    return kv;
}

} // namespace

KernelValue kernel_eval(const EnsembleSpec& spec, double x, double xp,
                        const ContourPlan& plan, const QuadratureSettings& settings) {
    plan.sigma.validate();
    settings.validate();
    // enclosure check
    for (complexd aj : spec.expanded())
        if (std::abs(aj - plan.sigma.center) >= plan.sigma.radius)
            throw NoRoom("plan circle does not enclose all sources");
    const bool crossing =
        std::abs(plan.line_abscissa - plan.sigma.center.real()) < plan.sigma.radius;
    if (crossing && !plan.sine_correction_alpha)
        throw NoRoom("line crosses the circle; sine_correction_alpha required");
    if (crossing && std::abs(plan.sigma.center.imag()) > 1e-12)
        throw NoRoom("sine-corrected plans need a real-centered circle");
    return kernel_double(spec, x, xp, plan, settings);
}

KernelValue kernel_fully_confluent(const EnsembleSpec& spec, double x, double xp,
                                   const quadrature::ClosedCircleContour& contour,
                                   const QuadratureSettings& settings) {
    contour.validate();
    settings.validate();
    if (spec.sources().size() != 1 || std::abs(spec.sources()[0].b) > 1e-14)
        throw PreconditionViolated("kernel_fully_confluent needs a single source at 0");
    const int n = spec.N();
    const WFunction& w = spec.W();

    auto A = [&, x](complexd v) { return std::exp(w.log_eval(v) - x * v); };
    auto B = [&, xp](complexd u) { return std::exp(xp * u - w.log_eval(u)); };

    // v-line to the right of the circle (the -1 term needs a non-crossing line)
    AnalyticStrip strip = w.strip();
    double cr = contour.center.real() + contour.radius;
    double c = std::isfinite(strip.c_plus) ? 0.5 * (cr + strip.c_plus)
                                           : cr + std::max(1.0, contour.radius);
    if (c <= cr) throw NoRoom("no room for a non-crossing line");

    VStrategy strat = choose_v_strategy(w, n - 1, x, c, std::max(0.2, c - cr), settings,
                                        cr, contour.center.real() - contour.radius);
    if (strat.route != VStrategy::Route::Line)
        throw TailTooFat("fully confluent variant needs line-integrable W decay");
    strat.osc_center = double(n) + 1.0;
    strat.osc_flat = std::abs(x) + std::abs(c) * w.tail(c).gauss_tau + 0.5;
    VRule vr = build_v_rule(strat, A, settings.abs_tol);

    complexd prev{};
    bool have = false;
    std::size_t total = 0;
    for (int level = 0; level < 6; ++level) {
        Rule inner = vr.make(level);
        Rule outer = quadrature::circle_rule(contour.center, contour.radius,
                                             contour.nodes << level,
                                             contour.node_phase_offset);
        std::vector<complexd> wa(inner.size());
        for (std::size_t j = 0; j < inner.size(); ++j) wa[j] = inner.w[j] * A(inner.z[j]);
        complexd acc{};
        for (std::size_t i = 0; i < outer.size(); ++i) {
            complexd u = outer.z[i];
            complexd lu = std::log(u);
            complexd s{};
            for (std::size_t j = 0; j < inner.size(); ++j) {
                complexd ratio = std::exp(double(n) * (std::log(inner.z[j]) - lu));
                s += wa[j] * (ratio - 1.0) / (inner.z[j] - u);
            }
            acc += outer.w[i] * B(u) * s;
        }
        total += inner.size() * outer.size();
        if (have && std::abs(acc - prev) <= settings.tolerance_for(acc))
            return {acc, std::abs(acc - prev), total, true};
        prev = acc;
        have = true;
    }
    return {prev, settings.tolerance_for(prev), total, false};
}

KernelValue multiplicative_kernel_eval(const EnsembleSpec& spec, double y, double yp,
                                       const ContourPlan& plan,
                                       const QuadratureSettings& settings) {
    if (!(y > 0.0 && yp > 0.0))
        throw PreconditionViolated("multiplicative kernel needs y, y' > 0");
    KernelValue kv = kernel_eval(spec, std::log(y), std::log(yp), plan, settings);
    kv.value /= y;
    kv.error_estimate /= y;
    return kv;
}

// --- pLUE --------------------------------------------------------------------

ContourPlan plue_default_plan(double nu, int n, const wcatalog::WFunction& w, double tau) {
    (void)nu;
    (void)n;
    AnalyticStrip s = w.strip();
    double c;
    if (std::isfinite(s.c_minus)) {
        if (!(s.c_minus / tau < 0.0)) throw NoRoom("empty pLUE line range");
        c = std::max(s.c_minus / tau * 0.5, -1.0);
    } else {
        c = -0.75;
    }
    ContourPlan plan;
    // circle around 0 with the line strictly to its left
    plan.sigma.center = complexd(0.0, 0.0);
    plan.sigma.radius = std::min(0.45, std::abs(c) / 2.0);
    plan.sigma.nodes = std::max<std::size_t>(128, 16 * std::size_t(n));
    plan.line_abscissa = c;
    return plan;
}

KernelValue plue_kernel_eval(double nu, int n, const wcatalog::WFunction& w, double tau,
                             double x, double xp, const ContourPlan& plan,
                             const QuadratureSettings& settings) {
    if (!(nu >= 0.0)) throw PreconditionViolated("plue: nu must be >= 0");
    if (!(tau > 0.0)) throw PreconditionViolated("plue: tau must be > 0");
    settings.validate();
    plan.sigma.validate();
    // circle must enclose 0 and avoid the branch cut [1, inf)
    if (!(std::abs(plan.sigma.center) < plan.sigma.radius))
        throw NoRoom("plue circle must enclose 0");
    if (plan.sigma.center.real() + plan.sigma.radius >= 1.0 &&
        std::abs(plan.sigma.center.imag()) <= plan.sigma.radius)
        throw BranchCutHit("plue circle intersects [1, inf)");
    AnalyticStrip s = w.strip();
    const double c = plan.line_abscissa;
    if (!(c < 1.0) || !(tau * c > s.c_minus) || !(tau * c < s.c_plus))
        throw NoRoom("plue line abscissa outside the admissible range");

    const double dn = double(n);
    auto A = [&, x](complexd v) {
        return std::exp(dn * std::log(v) - (dn + nu) * std::log(complexd(1.0) - v) +
                        w.log_eval(tau * v) - x * v);
    };
    auto B = [&, xp](complexd u) {
        return std::exp(-dn * std::log(u) + (dn + nu) * std::log(complexd(1.0) - u) -
                        w.log_eval(tau * u) + xp * u);
    };

    // line truncation from the decay of W(tau v); the (v/(1-v))^N modulus is <= 1
    // left of Re v = 1/2 and -> 1 at infinity.
    auto wb = w.decay_bound(tau * c);
    const double cap = std::max(1.0, std::pow(1.0 / std::abs(1.0 - c), nu)) *
                       std::exp(std::abs(x) * std::abs(c) + 1.0);
    double T = quadrature::choose_truncation(
        [&](double t) { return cap * wb(tau * t); }, settings.abs_tol);

    const double oc = dn * (1.0 / std::max(0.3, std::abs(c)) + 1.0 / std::max(0.3, std::abs(1.0 - c)));
    const double of = std::abs(x) + tau * tau * std::abs(c) + 0.5;
    const double ow = std::max(1.0, std::abs(c));
    auto make_inner = [=](int level) {
        return quadrature::graded_line_rule(c, T, std::min(1.0, T), 10u << level, oc, ow, of);
    };
    std::size_t n0 = plan.sigma.nodes;
    complexd ctr = plan.sigma.center;
    double rad = plan.sigma.radius;
    std::optional<double> off = plan.sigma.node_phase_offset;
    auto make_outer = [=](int level) {
        return quadrature::circle_rule(ctr, rad, n0 << level, off);
    };
    return quadrature::integrate_double(make_inner, make_outer, A, B, settings);
}

// --- Muttalib-Borodin ---------------------------------------------------------

namespace {

std::vector<complexd> mb_poles(double theta, double eta, int n) {
    std::vector<complexd> uk;
    uk.reserve(std::size_t(n));
    for (int k = 1; k <= n; ++k) uk.emplace_back(theta * k + eta, 0.0);
    return uk;
}

double mb_line_abscissa(double theta, double eta, const WFunction& w) {
    AnalyticStrip s = w.strip();
    double lo = s.c_minus, hi = theta + eta;
    if (!(lo < hi)) throw NoRoom("mb: strip does not reach theta + eta");
    double c = eta;
    if (!(c > lo + 0.05 * (hi - lo))) c = lo + 0.3 * std::min(hi - lo, 1.0);
    if (!(c < hi - 0.25 * theta)) c = hi - 0.5 * std::min(theta, hi - lo);
    return c;
}

} // namespace

ContourPlan mb_default_plan(double theta, double eta, int n, const wcatalog::WFunction& w) {
    auto uk = mb_poles(theta, eta, n);
    ContourPlan plan;
    double lo = uk.front().real(), hi = uk.back().real();
    plan.sigma.center = complexd(0.5 * (lo + hi), 0.0);
    plan.sigma.radius = 0.5 * (hi - lo) + 0.5 * theta;
    plan.sigma.nodes = std::max<std::size_t>(128, 16 * std::size_t(n));
    plan.line_abscissa = mb_line_abscissa(theta, eta, w);
    // keep the line clear of the circle
    double cl = plan.sigma.center.real() - plan.sigma.radius;
    if (plan.line_abscissa > cl - 0.1 * theta) plan.line_abscissa = cl - 0.25 * theta;
    AnalyticStrip s = w.strip();
    if (!(plan.line_abscissa > s.c_minus))
        throw NoRoom("mb: no line abscissa between the strip edge and the circle");
    return plan;
}

KernelValue mb_kernel_eval(double theta, double eta, int n, const wcatalog::WFunction& w,
                           double y, double yp, const ContourPlan& plan,
                           const QuadratureSettings& settings) {
    if (!(theta > 0.0) || !(eta > -theta))
        throw PreconditionViolated("mb: theta > 0 and eta > -theta required");
    if (!(y > 0.0 && yp > 0.0)) throw PreconditionViolated("mb: y, y' > 0 required");
    settings.validate();
    plan.sigma.validate();
    auto uk = mb_poles(theta, eta, n);
    for (complexd p : uk)
        if (std::abs(p - plan.sigma.center) >= plan.sigma.radius)
            throw NoRoom("mb circle must enclose all theta j + eta");
    AnalyticStrip s = w.strip();
    if (!(s.c_plus > theta * n + eta))
        throw NoRoom("mb: strip must contain (c_minus, N theta + eta]");
    const double c = plan.line_abscissa;
    if (!(c > s.c_minus && c < theta + eta))
        throw NoRoom("mb: line abscissa outside (c_minus, theta + eta)");

    const double ly = std::log(y), lyp = std::log(yp);
    auto A = [&](complexd v) {
        return std::exp(w.log_eval(v) + (-v - 1.0) * ly) * source_product(uk, v);
    };
    auto B = [&](complexd u) {
        return std::exp(u * lyp - w.log_eval(u)) / source_product(uk, u);
    };

    auto wb = w.decay_bound(c);
    const double r0 = std::abs(c) + theta * n + eta + 1.0;
    const double exc = std::exp(-ly * c - ly);
    double T = quadrature::choose_truncation(
        [&](double t) { return wb(t) * std::pow(r0 + t, double(n)) * exc; },
        settings.abs_tol);

    const double oc = double(n) / std::max(1.0, theta) + 4.0;
    const double ow = std::max(1.0, 0.5 * theta * n);
    const double of = std::abs(ly) + 1.0;
    auto make_inner = [=](int level) {
        return quadrature::graded_line_rule(c, T, std::min(1.0, T), 10u << level, oc, ow, of);
    };
    std::size_t n0 = plan.sigma.nodes;
    complexd ctr = plan.sigma.center;
    double rad = plan.sigma.radius;
    std::optional<double> off = plan.sigma.node_phase_offset;
    auto make_outer = [=](int level) {
        return quadrature::circle_rule(ctr, rad, n0 << level, off);
    };
    return quadrature::integrate_double(make_inner, make_outer, A, B, settings);
}

KernelValue mb_kernel_residue_sum(double theta, double eta, int n,
                                  const wcatalog::WFunction& w, double y, double yp,
                                  const QuadratureSettings& settings) {
    if (!(theta > 0.0) || !(eta > -theta))
        throw PreconditionViolated("mb: theta > 0 and eta > -theta required");
    if (!(y > 0.0 && yp > 0.0)) throw PreconditionViolated("mb: y, y' > 0 required");
    settings.validate();
    auto uk = mb_poles(theta, eta, n);
    const double c = mb_line_abscissa(theta, eta, w);
    const double ly = std::log(y), lyp = std::log(yp);

    // residue weights at u_k: 1 / (theta^{N-1} (k-1)! (N-k)! (-1)^{N-k}),
    // multiplied by (y')^{u_k} / W(u_k)
    std::vector<complexd> coef(static_cast<std::size_t>(n), complexd{});
    for (int k = 1; k <= n; ++k) {
        complexd lw = log_w_or_zero(w, uk[std::size_t(k - 1)]);
        double lc = -((n - 1) * std::log(theta) + lfact(k - 1) + lfact(n - k));
        double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
        coef[std::size_t(k - 1)] =
            sign * std::exp(complexd(lc) + uk[std::size_t(k - 1)] * lyp - lw);
    }

    auto wb = w.decay_bound(c);
    const double r0 = std::abs(c) + theta * n + eta + 1.0;
    const double exc = std::exp(-ly * c - ly);
    double T = quadrature::choose_truncation(
        [&](double t) { return wb(t) * std::pow(r0 + t, double(n)) * exc; },
        settings.abs_tol);
    const double oc = double(n) / std::max(1.0, theta) + 4.0;
    const double ow = std::max(1.0, 0.5 * theta * n);
    const double of = std::abs(ly) + 1.0;

    complexd prev{};
    bool have = false;
    std::size_t total = 0;
    for (int level = 0; level < 6; ++level) {
        Rule r = quadrature::graded_line_rule(c, T, std::min(1.0, T), 10u << level, oc, ow, of);
        complexd acc{};
        for (std::size_t i = 0; i < r.size(); ++i) {
            const complexd v = r.z[i];
            const complexd base = r.w[i] * std::exp(w.log_eval(v) + (-v - 1.0) * ly) *
                                  source_product(uk, v);
            complexd s{};
            for (int k = 0; k < n; ++k) s += coef[std::size_t(k)] / (v - uk[std::size_t(k)]);
            acc += base * s;
        }
        total += r.size();
        if (have && std::abs(acc - prev) <= settings.tolerance_for(acc))
            return {acc, std::abs(acc - prev), total, true};
        prev = acc;
        have = true;
    }
    return {prev, settings.tolerance_for(prev), total, false};
}

} // namespace biokernel::kernels

#include "biokernel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace biokernel::quadrature {

namespace {
constexpr double kTwoPi = 6.28318530717958647692528676655900577;
}

void Rule::append(const Rule& other) {
    z.insert(z.end(), other.z.begin(), other.z.end());
    w.insert(w.end(), other.w.begin(), other.w.end());
}

void Rule::scale(complexd factor) {
    for (auto& wi : w) wi *= factor;
}

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(std::size_t n) {
    static std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> x(n), w(n);
    // Newton iteration on Legendre P_n, symmetric nodes.
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(M_PI * (double(i) + 0.75) / (double(n) + 0.5));
        double p0 = 0, p1 = 0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - double(j) * p2) / (j + 1.0);
            }
            double dp = n * (t * p0 - p1) / (t * t - 1.0);
            double dt = p0 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) {
                dp = n * (t * p0 - p1) / (t * t - 1.0);
                x[i] = -t;
                x[n - 1 - i] = t;
                w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
                break;
            }
        }
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
    auto [pos, ok] = cache.emplace(n, std::make_pair(std::move(x), std::move(w)));
    (void)ok;
    return pos->second;
}

Rule circle_rule(complexd center, double radius, std::size_t n,
                 std::optional<double> phase_offset) {
    Rule r;
    r.z.resize(n);
    r.w.resize(n);
    const double off = phase_offset.value_or(M_PI / double(n));
    for (std::size_t k = 0; k < n; ++k) {
        double th = off + kTwoPi * double(k) / double(n);
        complexd e = std::polar(1.0, th);
        r.z[k] = center + radius * e;
        // (1/2pi i) * i R e^{i th} dth with dth = 2pi/n
        r.w[k] = radius * e / double(n);
    }
    return r;
}

Rule line_rule(double abscissa, double half_length, std::size_t n) {
    // n intervals, n+1 nodes, trapezoid weights; dv = i dt, 1/(2pi i) -> dt/(2pi)
    Rule r;
    r.z.resize(n + 1);
    r.w.resize(n + 1);
    const double h = 2.0 * half_length / double(n);
    for (std::size_t k = 0; k <= n; ++k) {
        double t = -half_length + h * double(k);
        r.z[k] = complexd(abscissa, t);
        r.w[k] = h / kTwoPi;
    }
    r.w.front() *= 0.5;
    r.w.back() *= 0.5;
    return r;
}

namespace {

// Gauss-Legendre panel over a parameter interval mapped through `gamma` with
// derivative `dgamma`; weights carry dgamma/(2 pi i).
template <typename Map, typename DMap>
void add_gl_panel(Rule& r, double a, double b, std::size_t order, const Map& gamma,
                  const DMap& dgamma) {
    const auto& [xg, wg] = gauss_legendre(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < order; ++i) {
        double t = mid + half * xg[i];
        r.z.push_back(gamma(t));
        r.w.push_back(half * wg[i] * dgamma(t) / complexd(0.0, kTwoPi));
    }
}

void add_gl_segment(Rule& r, complexd za, complexd zb, std::size_t order) {
    complexd d = zb - za;
    add_gl_panel(
        r, 0.0, 1.0, order, [&](double t) { return za + t * d; },
        [&](double) { return d; });
}

} // namespace

Rule graded_line_rule(double abscissa, double half_length, double t0, std::size_t order,
                      double osc_center, double osc_width, double osc_flat) {
    Rule r;
    t0 = std::min(t0, half_length);
    // panel edges 0, t0, 2 t0, 4 t0, ... up to half_length, mirrored
    std::vector<double> edges{0.0, t0};
    while (edges.back() < half_length)
        edges.push_back(std::min(2.0 * edges.back(), half_length));
    auto gamma = [&](double t) { return complexd(abscissa, t); };
    auto dgamma = [&](double) { return complexd(0.0, 1.0); };
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        double a = edges[p], b = edges[p + 1];
        // resolve local oscillation: phase across the panel ~ omega(t_mid) * width
        double tm = 0.5 * (a + b);
        double omega = osc_center / (1.0 + (tm / osc_width) * (tm / osc_width)) + osc_flat;
        double phase = omega * (b - a);
        std::size_t sub = 1 + std::size_t(phase / (1.5 * double(std::max<std::size_t>(order, 1))));
        for (std::size_t s = 0; s < sub; ++s) {
            double aa = a + (b - a) * double(s) / double(sub);
            double bb = a + (b - a) * double(s + 1) / double(sub);
            add_gl_panel(r, aa, bb, order, gamma, dgamma);
            add_gl_panel(r, -bb, -aa, order, gamma, dgamma);
        }
    }
    return r;
}

Rule hankel_rule(const HankelRayContour& c, std::size_t n_per_leg) {
    Rule r;
    const double a0 = c.ray_start - c.standoff;
    const complexd top_out(c.reach, c.standoff), top_in(a0, c.standoff);
    const complexd bot_in(a0, -c.standoff), bot_out(c.reach, -c.standoff);
    auto add_leg = [&](complexd za, complexd zb) {
        complexd d = (zb - za) / double(n_per_leg);
        for (std::size_t k = 0; k <= n_per_leg; ++k) {
            r.z.push_back(za + double(k) * d);
            complexd w = d / complexd(0.0, kTwoPi);
            if (k == 0 || k == n_per_leg) w *= 0.5;
            r.w.push_back(w);
        }
    };
    add_leg(top_out, top_in); // rightward end in, above the ray
    add_leg(top_in, bot_in);  // cap, downward
    add_leg(bot_in, bot_out); // back out below the ray
    return r;
}

Rule hankel_rule_graded(double ray_start, double standoff, double reach, std::size_t order) {
    Rule r;
    const double a0 = ray_start - standoff;
    std::vector<double> edges{a0};
    double w = standoff;
    while (edges.back() < reach) {
        edges.push_back(std::min(edges.back() + w, reach));
        w *= 2.0;
    }
    // top leg: from reach down to a0 (right to left)
    for (std::size_t p = edges.size() - 1; p > 0; --p)
        add_gl_segment(r, complexd(edges[p], standoff), complexd(edges[p - 1], standoff), order);
    // cap down
    add_gl_segment(r, complexd(a0, standoff), complexd(a0, -standoff), order);
    // bottom leg: left to right
    for (std::size_t p = 0; p + 1 < edges.size(); ++p)
        add_gl_segment(r, complexd(edges[p], -standoff), complexd(edges[p + 1], -standoff), order);
    return r;
}

Rule left_hankel_rule_graded(double ray_end, double standoff, double reach, std::size_t order) {
    // Positively oriented loop around the leftward ray [-reach, ray_end]:
    // bottom leg far->cap, cap up at ray_end+standoff, top leg cap->far.
    Rule r;
    const double a0 = ray_end + standoff;
    std::vector<double> edges{a0};
    double w = standoff;
    while (edges.back() > -reach) {
        edges.push_back(std::max(edges.back() - w, -reach));
        w *= 2.0;
    }
    // bottom: from -reach (edges.back()) rightward to a0
    for (std::size_t p = edges.size() - 1; p > 0; --p)
        add_gl_segment(r, complexd(edges[p], -standoff), complexd(edges[p - 1], -standoff), order);
    // cap up
    add_gl_segment(r, complexd(a0, -standoff), complexd(a0, standoff), order);
    // top: a0 leftward to -reach
    for (std::size_t p = 0; p + 1 < edges.size(); ++p)
        add_gl_segment(r, complexd(edges[p], standoff), complexd(edges[p + 1], standoff), order);
    return r;
}

Rule teardrop_rule(complexd pinch, double d, double phi_out, double phi_in,
                   std::size_t order, std::size_t arc_nodes, std::size_t leg_depth) {
    Rule r;
    const complexd eo = std::polar(1.0, phi_out), ei = std::polar(1.0, phi_in);
    // dyadic radial panels [d 2^-(k+1), d 2^-k]
    double b = d;
    for (std::size_t k = 0; k < leg_depth; ++k) {
        double a = (k + 1 == leg_depth) ? 0.0 : 0.5 * b;
        add_gl_segment(r, pinch + a * eo, pinch + b * eo, order);  // outgoing
        add_gl_segment(r, pinch + b * ei, pinch + a * ei, order);  // incoming
        b = a;
    }
    // arc radius d from phi_out to phi_in
    std::size_t panels = std::max<std::size_t>(1, arc_nodes / std::max<std::size_t>(order, 1));
    for (std::size_t p = 0; p < panels; ++p) {
        double pa = phi_out + (phi_in - phi_out) * double(p) / double(panels);
        double pb = phi_out + (phi_in - phi_out) * double(p + 1) / double(panels);
        add_gl_panel(
            r, pa, pb, order, [&](double t) { return pinch + std::polar(d, t); },
            [&](double t) { return complexd(0.0, 1.0) * std::polar(d, t); });
    }
    return r;
}

Rule split_circle_rule(complexd center, double radius, double theta_lo, double theta_hi,
                       std::size_t order, std::size_t depth) {
    // Full circle as two arcs [theta_lo, theta_hi] and [theta_hi, theta_lo + 2pi],
    // each with panels graded dyadically toward both endpoints.
    Rule r;
    auto add_arc = [&](double a, double b) {
        double mid = 0.5 * (a + b);
        // dyadic from each endpoint toward the middle
        double len = mid - a;
        std::vector<double> e{a};
        double step = len / std::pow(2.0, double(depth));
        e.push_back(a + step);
        while (e.back() < mid) {
            step *= 2.0;
            e.push_back(std::min(e.back() + step, mid));
        }
        std::vector<double> edges(e);
        for (auto it = e.rbegin(); it != e.rend(); ++it) edges.push_back(b - (*it - a));
        for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
            if (edges[p + 1] <= edges[p]) continue;
            add_gl_panel(
                r, edges[p], edges[p + 1], order,
                [&](double t) { return center + std::polar(radius, t); },
                [&](double t) { return complexd(0.0, 1.0) * std::polar(radius, t); });
        }
    };
    add_arc(theta_lo, theta_hi);
    add_arc(theta_hi, theta_lo + kTwoPi);
    return r;
}

// ---------------------------------------------------------------------------

namespace {

complexd apply_rule(const Rule& r, const Integrand& f) {
    complexd s{};
    for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * f(r.z[i]);
    return s;
}

QuadratureResult converge_by_doubling(const std::function<complexd(std::size_t)>& eval,
                                      std::size_t n0, std::size_t max_nodes,
                                      const QuadratureSettings& settings) {
    std::size_t n = std::max<std::size_t>(n0, 8);
    complexd prev = eval(n);
    std::size_t used = n;
    while (2 * n <= max_nodes) {
        n *= 2;
        complexd cur = eval(n);
        used += n;
        double diff = std::abs(cur - prev);
        if (diff <= settings.tolerance_for(cur))
            return {cur, diff, used, true};
        prev = cur;
    }
    return {prev, std::abs(prev) * settings.rel_tol + settings.abs_tol, used, false};
}

} // namespace

QuadratureResult integrate_closed(const Integrand& f, const ClosedCircleContour& contour,
                                  const QuadratureSettings& settings) {
    contour.validate();
    settings.validate();
    auto eval = [&](std::size_t n) {
        return apply_rule(circle_rule(contour.center, contour.radius, n,
                                      contour.node_phase_offset),
                          f);
    };
    return converge_by_doubling(eval, contour.nodes, settings.max_nodes, settings);
}

QuadratureResult integrate_vertical(const Integrand& f, const VerticalLineContour& line,
                                    const QuadratureSettings& settings) {
    line.validate();
    settings.validate();
    const double tail = std::max(std::abs(f(complexd(line.abscissa, line.half_length))),
                                 std::abs(f(complexd(line.abscissa, -line.half_length))));
    if (tail > settings.abs_tol)
        throw TailTooFat("integrand magnitude " + std::to_string(tail) +
                         " at the truncation height exceeds abs_tol");
    auto eval = [&](std::size_t n) {
        return apply_rule(line_rule(line.abscissa, line.half_length, n), f);
    };
    return converge_by_doubling(eval, line.nodes, settings.max_nodes, settings);
}

QuadratureResult integrate_hankel(const Integrand& f, const HankelRayContour& loop,
                                  const QuadratureSettings& settings) {
    loop.validate();
    settings.validate();
    const double tail = std::max(std::abs(f(complexd(loop.reach, loop.standoff))),
                                 std::abs(f(complexd(loop.reach, -loop.standoff))));
    if (tail > settings.abs_tol)
        throw TailTooFat("integrand magnitude " + std::to_string(tail) +
                         " at the loop's open ends exceeds abs_tol");
    auto eval = [&](std::size_t n) { return apply_rule(hankel_rule(loop, n), f); };
    return converge_by_doubling(eval, loop.nodes_per_leg, settings.max_nodes, settings);
}

double choose_truncation(const std::function<double(double)>& decay_bound, double abs_tol) {
    if (!(abs_tol > 0.0)) throw PreconditionViolated("abs_tol must be positive");
    const double threshold = abs_tol / 10.0;
    double T = 1.0;
    while (T <= 1e6) {
        if (decay_bound(T) * (1.0 + T) < threshold) return T;
        T *= 1.5;
    }
    throw NoDecay("no truncation height up to 1e6 satisfies the decay bound");
}

QuadratureResult integrate_segment(const std::function<complexd(double)>& f, double a,
                                   double b, const QuadratureSettings& settings,
                                   std::size_t panels) {
    settings.validate();
    auto eval = [&](std::size_t order) {
        const auto& [xg, wg] = gauss_legendre(order);
        complexd s{};
        for (std::size_t p = 0; p < panels; ++p) {
            double pa = a + (b - a) * double(p) / double(panels);
            double pb = a + (b - a) * double(p + 1) / double(panels);
            double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
            for (std::size_t i = 0; i < order; ++i) s += half * wg[i] * f(mid + half * xg[i]);
        }
        return s;
    };
    std::size_t order = 8;
    complexd prev = eval(order);
    std::size_t used = order * panels;
    while (order <= 512 && used * 2 <= settings.max_nodes) {
        order *= 2;
        complexd cur = eval(order);
        used += order * panels;
        double diff = std::abs(cur - prev);
        if (diff <= settings.tolerance_for(cur)) return {cur, diff, used, true};
        prev = cur;
    }
    return {prev, settings.tolerance_for(prev), used, false};
}

KernelValue integrate_double(const std::function<Rule(int)>& make_inner,
                             const std::function<Rule(int)>& make_outer,
                             const Integrand& A, const Integrand& B,
                             const QuadratureSettings& settings, int max_level) {
    settings.validate();
    complexd prev{};
    bool have_prev = false;
    std::size_t total_nodes = 0;
    for (int level = 0; level <= max_level; ++level) {
        Rule inner = make_inner(level);
        Rule outer = make_outer(level);
        const std::size_t nv = inner.size(), nu = outer.size();
        std::vector<complexd> wa(nv);
        for (std::size_t j = 0; j < nv; ++j) wa[j] = inner.w[j] * A(inner.z[j]);
        complexd total{};
        for (std::size_t i = 0; i < nu; ++i) {
            const complexd u = outer.z[i];
            complexd s{};
            for (std::size_t j = 0; j < nv; ++j) s += wa[j] / (inner.z[j] - u);
            total += outer.w[i] * B(u) * s;
        }
        total_nodes += nu * nv;
        if (have_prev) {
            double diff = std::abs(total - prev);
            if (diff <= settings.tolerance_for(total))
                return {total, diff, total_nodes, true};
        }
        prev = total;
        have_prev = true;
        if (nu * nv > settings.max_nodes * 64) break;
    }
    return {prev, settings.tolerance_for(prev), total_nodes, false};
}

} // namespace biokernel::quadrature

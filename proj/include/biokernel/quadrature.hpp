#pragma once

#include "biokernel/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace biokernel::quadrature {

/// Closed circle, positively oriented (counterclockwise).
struct ClosedCircleContour {
    complexd center{};
    double radius = 1.0;
    std::size_t nodes = 64;
    /// Absolute phase shift of the node set.  Unset means half the current node
    /// spacing, which keeps a designated point (phase 0) unsampled at every
    /// refinement level.
    std::optional<double> node_phase_offset{};

    void validate() const {
        if (!(radius > 0.0)) throw InvalidContour("circle radius must be positive");
        if (nodes < 8) throw InvalidContour("circle needs at least 8 nodes");
    }
};

/// Truncated vertical segment c - iT ... c + iT, traversed upward.
struct VerticalLineContour {
    double abscissa = 0.0;
    double half_length = 10.0;
    std::size_t nodes = 128;

    void validate() const {
        if (!(half_length > 0.0)) throw InvalidContour("line half_length must be positive");
        if (nodes < 16) throw InvalidContour("line needs at least 16 nodes");
    }
};

/// Capped loop around the ray [ray_start, reach], encircling it positively:
/// top leg from reach+i*standoff to the cap, cap down at ray_start-standoff,
/// bottom leg back out to reach-i*standoff.
struct HankelRayContour {
    double ray_start = 0.0;
    double standoff = 0.5;
    double reach = 20.0;
    std::size_t nodes_per_leg = 256;

    void validate() const {
        if (!(standoff > 0.0)) throw InvalidContour("hankel standoff must be positive");
        if (!(reach > ray_start)) throw InvalidContour("hankel reach must exceed ray_start");
        if (nodes_per_leg < 16) throw InvalidContour("hankel needs at least 16 nodes per leg");
    }
};

using Integrand = std::function<complexd(complexd)>;

/// (1/2pi i) closed-circle integral by the trapezoidal rule on the phase
/// parametrization, node count doubled until two successive estimates agree.
QuadratureResult integrate_closed(const Integrand& f, const ClosedCircleContour& contour,
                                  const QuadratureSettings& settings);

/// (1/2pi i) integral over the truncated vertical segment, trapezoid + doubling.
/// Throws TailTooFat when |f| at the endpoints exceeds abs_tol.
QuadratureResult integrate_vertical(const Integrand& f, const VerticalLineContour& line,
                                    const QuadratureSettings& settings);

/// (1/2pi i) integral over the capped Hankel loop, trapezoid + doubling per leg.
/// Throws TailTooFat when |f| at the open right ends exceeds abs_tol.
QuadratureResult integrate_hankel(const Integrand& f, const HankelRayContour& loop,
                                  const QuadratureSettings& settings);

/// Smallest T on a geometric grid with decay_bound(T) * (1 + T) < abs_tol / 10.
/// decay_bound must be a monotone-decreasing bound on the integrand modulus.
double choose_truncation(const std::function<double(double)>& decay_bound, double abs_tol);

/// Real-segment integral by composite Gauss-Legendre panels with doubling.
QuadratureResult integrate_segment(const std::function<complexd(double)>& f, double a,
                                   double b, const QuadratureSettings& settings,
                                   std::size_t panels = 8);

// ---------------------------------------------------------------------------
// Discretized-contour machinery shared by the kernel evaluators.
// A Rule is a node/weight set with sum_i w_i f(z_i) ~ (1/2pi i) * contour integral.
// ---------------------------------------------------------------------------

struct Rule {
    std::vector<complexd> z;
    std::vector<complexd> w;
    std::size_t size() const { return z.size(); }
    void append(const Rule& other);
    void scale(complexd factor);
};

/// Gauss-Legendre nodes/weights on [-1, 1] (cached per order).
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(std::size_t n);

Rule circle_rule(complexd center, double radius, std::size_t n,
                 std::optional<double> phase_offset = std::nullopt);

Rule line_rule(double abscissa, double half_length, std::size_t n);

/// Vertical line with dyadic Gauss-Legendre panels: |t| in [0, t0], [t0, 2 t0], ...
/// with per-panel order scaled to resolve a phase-velocity profile
/// omega(t) ~ osc_center / (1 + (t/osc_width)^2) + osc_flat.
Rule graded_line_rule(double abscissa, double half_length, double t0, std::size_t order,
                      double osc_center = 0.0, double osc_width = 1.0, double osc_flat = 0.0);

/// Hankel loop discretization matching integrate_hankel's geometry,
/// uniform trapezoid per leg (n nodes per leg).
Rule hankel_rule(const HankelRayContour& c, std::size_t n_per_leg);

/// Hankel loop with dyadic panels graded toward the cap; panel width starts at
/// standoff and doubles outward.  `order` is the per-panel Gauss-Legendre order.
Rule hankel_rule_graded(double ray_start, double standoff, double reach, std::size_t order);

/// Mirror image: loop around the leftward ray (-reach, ray_end], encircled positively.
Rule left_hankel_rule_graded(double ray_end, double standoff, double reach, std::size_t order);

/// Teardrop pinched at `pinch`: out-leg along angle phi_out to radius d, CCW arc
/// radius d from phi_out to phi_in, in-leg back to the pinch.  Integrand must
/// vanish at the pinch (or be improperly integrable there).  Leg panels are
/// dyadic toward the pinch down to depth `leg_depth`.
Rule teardrop_rule(complexd pinch, double d, double phi_out, double phi_in,
                   std::size_t order, std::size_t arc_nodes, std::size_t leg_depth = 44);

/// Two circle arcs with Gauss-Legendre panels graded toward both arc endpoints;
/// used when a vertical line crosses the circle (sine-corrected evaluation).
Rule split_circle_rule(complexd center, double radius, double theta_lo, double theta_hi,
                       std::size_t order, std::size_t depth);

/// Tensor double-contour integral
///   K = (1/2pi i)^2 oint_outer du B(u) int_inner dv A(v) / (v - u)
/// with joint refinement: `make_inner`/`make_outer` build rules at level k
/// (each level roughly doubles resolution), stopping on the Cauchy criterion.
KernelValue integrate_double(const std::function<Rule(int)>& make_inner,
                             const std::function<Rule(int)>& make_outer,
                             const Integrand& A, const Integrand& B,
                             const QuadratureSettings& settings, int max_level = 6);

} // namespace biokernel::quadrature

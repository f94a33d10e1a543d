#pragma once

#include "biokernel/quadrature.hpp"
#include "biokernel/types.hpp"

#include <memory>
#include <vector>

namespace biokernel::wcatalog {

/// Vertical strip of analyticity c_minus < Re z < c_plus (either side may be infinite).
struct AnalyticStrip {
    double c_minus = -std::numeric_limits<double>::infinity();
    double c_plus = std::numeric_limits<double>::infinity();

    bool contains(double re, double margin = 0.0) const {
        return re > c_minus + margin && re < c_plus - margin;
    }
    double width_clipped(double cap) const {
        return std::min(c_plus, cap) - std::max(c_minus, -cap);
    }
};

/// Decay model for |W(c + i t)| as |t| grows:
///   |W| <~ C * exp(-gauss_tau t^2 / 2) * exp(-exp_rate |t|) * |t|^{-power_order}.
struct TailInfo {
    double gauss_tau = 0.0;
    double exp_rate = 0.0;
    double power_order = 0.0;
};

/// Catalogue of W-functions (two-sided Laplace transforms of ensemble weights).
/// Immutable value type; Product composes entries.
class WFunction {
public:
    enum class Kind { Gaussian, RationalLUE, GammaLUEstar, BetaJUE, BetaCLUE, PolyaProduct, Product };

    static WFunction gaussian(double tau, double gamma_lin, complexd normalization = 1.0);
    static WFunction rational_lue(int n, double nu, complexd normalization = 1.0);
    static WFunction gamma_lue_star(double nu, complexd normalization = 1.0);
    static WFunction beta_jue(double mu, double nu, complexd normalization = 1.0);
    static WFunction beta_clue(double beta, double gamma_p, complexd normalization = 1.0);
    static WFunction polya_product(double tau, double gamma_lin, std::vector<double> b,
                                   complexd normalization = 1.0);
    static WFunction product(const WFunction& left, const WFunction& right);

    Kind kind() const;
    complexd normalization() const;

    // parameter access (valid for the matching kind)
    double tau() const;
    double gamma_lin() const;
    double nu() const;
    double mu() const;
    int lue_n() const;
    const std::vector<double>& polya_b() const;
    WFunction left() const;
    WFunction right() const;

    AnalyticStrip strip() const;
    complexd log_eval(complexd z) const;
    complexd eval(complexd z) const;
    TailInfo tail(double abscissa) const;

    /// Modulus bound |W(abscissa + i t)| calibrated at a reference height,
    /// monotone in t; feeds choose_truncation.
    std::function<double(double)> decay_bound(double abscissa) const;

private:
    struct Node;
    std::shared_ptr<const Node> node_;
    explicit WFunction(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

// --- spec operations -------------------------------------------------------

complexd w_log_eval(const WFunction& w, complexd z);
AnalyticStrip w_strip(const WFunction& w);

/// w(x) = (1/2pi i) int_{c+iR} e^{-x z} W(z) dz, truncation from the decay bound.
complexd w_inverse_transform(const WFunction& w, double x, double c,
                             const QuadratureSettings& settings);

/// Mellin weight w~(y) = (1/2pi i) int y^{-v} W(v) dv = w(log y).
complexd w_mellin_inverse(const WFunction& w, double y, double c,
                          const QuadratureSettings& settings);

/// Samples |z^{N-1} W(z)| on c + i*heights; passes when the sequence stays below
/// 10x its first value and decreases over the two largest heights.
VerificationReport polya_decay_check(const WFunction& w, int n, double c,
                                     const std::vector<double>& heights);

/// Pointwise product (Fourier transform of the additive convolution of weights).
WFunction convolve(const WFunction& w1, const WFunction& w2);

} // namespace biokernel::wcatalog

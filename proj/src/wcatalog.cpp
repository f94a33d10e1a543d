#include "biokernel/wcatalog.hpp"

#include "biokernel/specfun.hpp"

#include <algorithm>
#include <cmath>

namespace biokernel::wcatalog {

using specfun::log_gamma;

struct WFunction::Node {
    Kind kind;
    complexd norm = 1.0;
    double p1 = 0.0; // tau | - | nu | mu | beta
    double p2 = 0.0; // gamma | nu | - | nu | gamma
    int n = 0;       // RationalLUE N
    std::vector<double> b;
    std::shared_ptr<const Node> left, right;
};

WFunction WFunction::gaussian(double tau, double gamma_lin, complexd normalization) {
    if (tau < 0.0) throw PreconditionViolated("gaussian: tau must be >= 0");
    auto n = std::make_shared<WFunction::Node>();
    n->kind = Kind::Gaussian;
    n->norm = normalization;
    n->p1 = tau;
    n->p2 = gamma_lin;
    return WFunction(std::move(n));
}

WFunction WFunction::rational_lue(int nn, double nu, complexd normalization) {
    if (nn < 1) throw PreconditionViolated("rational_lue: N must be >= 1");
    if (nu < 0.0) throw PreconditionViolated("rational_lue: nu must be >= 0");
    auto n = std::make_shared<WFunction::Node>();
    n->kind = Kind::RationalLUE;
    n->norm = normalization;
    n->n = nn;
    n->p2 = nu;
    return WFunction(std::move(n));
}

WFunction WFunction::gamma_lue_star(double nu, complexd normalization) {
    if (!(nu > -1.0)) throw PreconditionViolated("gamma_lue_star: nu must be > -1");
    auto n = std::make_shared<WFunction::Node>();
    n->kind = Kind::GammaLUEstar;
    n->norm = normalization;
    n->p1 = nu;
    return WFunction(std::move(n));
}

WFunction WFunction::beta_jue(double mu, double nu, complexd normalization) {
    auto n = std::make_shared<WFunction::Node>();
    n->kind = Kind::BetaJUE;
    n->norm = normalization;
    n->p1 = mu;
    n->p2 = nu;
    return WFunction(std::move(n));
}

WFunction WFunction::beta_clue(double beta, double gamma_p, complexd normalization) {
    auto n = std::make_shared<WFunction::Node>();
    n->kind = Kind::BetaCLUE;
    n->norm = normalization;
    n->p1 = beta;
    n->p2 = gamma_p;
    return WFunction(std::move(n));
}

WFunction WFunction::polya_product(double tau, double gamma_lin, std::vector<double> b,
                                   complexd normalization) {
    if (tau < 0.0) throw PreconditionViolated("polya_product: tau must be >= 0");
    double b2 = 0.0;
    for (double bj : b) {
        if (bj == 0.0) throw PreconditionViolated("polya_product: b entries must be nonzero");
        b2 += bj * bj;
    }
    if (!(tau + b2 > 0.0))
        throw PreconditionViolated("polya_product: tau + sum b_j^2 must be positive");
    auto n = std::make_shared<WFunction::Node>();
    n->kind = Kind::PolyaProduct;
    n->norm = normalization;
    n->p1 = tau;
    n->p2 = gamma_lin;
    n->b = std::move(b);
    return WFunction(std::move(n));
}

WFunction WFunction::product(const WFunction& left, const WFunction& right) {
    auto n = std::make_shared<WFunction::Node>();
    n->kind = Kind::Product;
    n->left = left.node_;
    n->right = right.node_;
    WFunction w(std::move(n));
    AnalyticStrip s = w.strip();
    if (!(s.c_minus < s.c_plus)) throw EmptyStrip("product strips do not intersect");
    return w;
}

WFunction::Kind WFunction::kind() const { return node_->kind; }
complexd WFunction::normalization() const { return node_->norm; }
double WFunction::tau() const { return node_->p1; }
double WFunction::gamma_lin() const { return node_->p2; }
double WFunction::nu() const {
    switch (node_->kind) {
        case Kind::GammaLUEstar: return node_->p1;
        case Kind::RationalLUE:
        case Kind::BetaJUE: return node_->p2;
        default: throw PreconditionViolated("nu() not defined for this variant");
    }
}
double WFunction::mu() const { return node_->p1; }
int WFunction::lue_n() const { return node_->n; }
const std::vector<double>& WFunction::polya_b() const { return node_->b; }
WFunction WFunction::left() const {
    if (!node_->left) throw PreconditionViolated("left() only valid for Product");
    return WFunction(node_->left);
}
WFunction WFunction::right() const {
    if (!node_->right) throw PreconditionViolated("right() only valid for Product");
    return WFunction(node_->right);
}

AnalyticStrip WFunction::strip() const {
    const double inf = std::numeric_limits<double>::infinity();
    switch (node_->kind) {
        case Kind::Gaussian: return {-inf, inf};
        case Kind::RationalLUE: return {-inf, 1.0};
        case Kind::GammaLUEstar: return {-node_->p1, inf};
        case Kind::BetaJUE: return {-node_->p1, inf};
        case Kind::BetaCLUE: return {-node_->p1, node_->p2 + 1.0};
        case Kind::PolyaProduct: {
            double cm = -inf, cp = inf;
            for (double bj : node_->b) {
                if (bj < 0.0) cm = std::max(cm, 1.0 / bj);
                else cp = std::min(cp, 1.0 / bj);
            }
            return {cm, cp};
        }
        case Kind::Product: {
            AnalyticStrip l = WFunction(node_->left).strip();
            AnalyticStrip r = WFunction(node_->right).strip();
            AnalyticStrip s{std::max(l.c_minus, r.c_minus), std::min(l.c_plus, r.c_plus)};
            if (!(s.c_minus < s.c_plus)) throw EmptyStrip("empty strip intersection");
            return s;
        }
    }
    throw Error("unreachable");
}

complexd WFunction::log_eval(complexd z) const {
    AnalyticStrip s = strip();
    if (!(z.real() > s.c_minus && z.real() < s.c_plus))
        throw OutsideStrip("z outside the analyticity strip");
    const complexd logn = std::log(node_->norm);
    switch (node_->kind) {
        case Kind::Gaussian:
            return logn + node_->p1 * z * z / 2.0 + node_->p2 * z;
        case Kind::RationalLUE: {
            // Gamma(N+nu) / (1-z)^{N+nu}, principal log(1-z) on C \ [1, inf)
            const double m = node_->n + node_->p2;
            return logn + log_gamma(complexd(m)) - m * std::log(complexd(1.0) - z);
        }
        case Kind::GammaLUEstar:
            return logn + log_gamma(node_->p1 + z);
        case Kind::BetaJUE:
            // B(mu+z, nu+1)
            return logn + log_gamma(node_->p1 + z) + log_gamma(complexd(node_->p2 + 1.0)) -
                   log_gamma(node_->p1 + node_->p2 + 1.0 + z);
        case Kind::BetaCLUE:
            // B(beta+z, gamma+1-z)
            return logn + log_gamma(node_->p1 + z) + log_gamma(node_->p2 + 1.0 - z) -
                   log_gamma(complexd(node_->p1 + node_->p2 + 1.0));
        case Kind::PolyaProduct: {
            complexd acc = logn + node_->p1 * z * z / 2.0 + node_->p2 * z;
            for (double bj : node_->b) acc += -bj * z - std::log(complexd(1.0) - bj * z);
            return acc;
        }
        case Kind::Product:
            return WFunction(node_->left).log_eval(z) + WFunction(node_->right).log_eval(z);
    }
    throw Error("unreachable");
}

complexd WFunction::eval(complexd z) const { return std::exp(log_eval(z)); }

TailInfo WFunction::tail(double abscissa) const {
    switch (node_->kind) {
        case Kind::Gaussian: return {node_->p1, 0.0, 0.0};
        case Kind::RationalLUE: return {0.0, 0.0, double(node_->n) + node_->p2};
        case Kind::GammaLUEstar:
            // |Gamma(sigma+it)| ~ |t|^{sigma-1/2} e^{-pi |t| / 2}
            return {0.0, M_PI / 2.0, 0.5 - (node_->p1 + abscissa)};
        case Kind::BetaJUE: return {0.0, 0.0, node_->p2 + 1.0};
        case Kind::BetaCLUE: return {0.0, M_PI, 0.0};
        case Kind::PolyaProduct:
            return {node_->p1, 0.0, double(node_->b.size())};
        case Kind::Product: {
            TailInfo l = WFunction(node_->left).tail(abscissa);
            TailInfo r = WFunction(node_->right).tail(abscissa);
            return {l.gauss_tau + r.gauss_tau, l.exp_rate + r.exp_rate,
                    l.power_order + r.power_order};
        }
    }
    throw Error("unreachable");
}

std::function<double(double)> WFunction::decay_bound(double abscissa) const {
    TailInfo t = tail(abscissa);
    // |W(c + i h)| is maximal at h = 0 for every catalogue variant (each factor's
    // modulus decreases in |h|); anchor the monotone model there.
    const double ref = std::abs(eval(complexd(abscissa, 0.0)));
    auto model = [t](double h) {
        return -t.gauss_tau * h * h / 2.0 - t.exp_rate * h -
               t.power_order * std::log1p(h);
    };
    return [ref, model](double h) { return 10.0 * ref * std::exp(model(h)); };
}

// --- spec operations -------------------------------------------------------

complexd w_log_eval(const WFunction& w, complexd z) { return w.log_eval(z); }
AnalyticStrip w_strip(const WFunction& w) { return w.strip(); }

complexd w_inverse_transform(const WFunction& w, double x, double c,
                             const QuadratureSettings& settings) {
    AnalyticStrip s = w.strip();
    if (!s.contains(c)) throw OutsideStrip("abscissa c outside the strip");
    auto bound = w.decay_bound(c);
    const double exc = std::exp(-x * c);
    // For x != 0 the e^{-i x t} oscillation cancels the tail at second order
    // (integration by parts twice on the smooth integrand); fold the gain into
    // the truncation bound so power-law W tails stay affordable.
    const double xa = std::abs(x);
    auto eff = [&](double t) {
        double gain = 1.0 + (xa * t / 4.0) * (xa * t / 4.0);
        return bound(t) * exc / gain;
    };
    double T = quadrature::choose_truncation(eff, settings.abs_tol);
    quadrature::VerticalLineContour line{c, T, 256};
    auto f = [&](complexd z) { return std::exp(w.log_eval(z) - x * z); };
    // When the truncation leaned on the oscillation gain, the raw endpoint
    // magnitude may sit above abs_tol; the achievable accuracy is capped by it,
    // so widen the tolerance rather than reject.
    const double edge = std::max(std::abs(f(complexd(c, T))), std::abs(f(complexd(c, -T))));
    QuadratureSettings local = settings;
    local.abs_tol = std::max(settings.abs_tol, edge * 1.05 + 1e-300);
    auto res = quadrature::integrate_vertical(f, line, local);
    return res.value;
}

complexd w_mellin_inverse(const WFunction& w, double y, double c,
                          const QuadratureSettings& settings) {
    if (!(y > 0.0)) throw PreconditionViolated("w_mellin_inverse: y must be > 0");
    return w_inverse_transform(w, std::log(y), c, settings);
}

VerificationReport polya_decay_check(const WFunction& w, int n, double c,
                                     const std::vector<double>& heights) {
    if (w.kind() != WFunction::Kind::PolyaProduct)
        throw PreconditionViolated("polya_decay_check expects a PolyaProduct");
    int nonzero = int(w.polya_b().size());
    if (!(w.tau() > 0.0) && nonzero < n)
        throw PreconditionViolated("needs tau > 0 or at least N nonzero b_j");
    if (heights.size() < 3)
        throw PreconditionViolated("need at least three sample heights");
    std::vector<double> hs = heights;
    std::sort(hs.begin(), hs.end());
    std::vector<double> vals;
    for (double h : hs) {
        complexd z(c, h);
        vals.push_back(std::pow(std::abs(z), n - 1) * std::abs(w.eval(z)));
    }
    const double cap = 10.0 * vals.front();
    double worst = 0.0;
    for (double v : vals) worst = std::max(worst, v / cap);
    bool tail_down = vals[vals.size() - 1] < vals[vals.size() - 2];
    double discrepancy = tail_down ? std::max(0.0, worst - 1.0) : 1.0;
    return VerificationReport::make("polya_decay", discrepancy, 1e-12,
                                    tail_down ? "bounded and decaying"
                                              : "no decay at the largest heights");
}

WFunction convolve(const WFunction& w1, const WFunction& w2) {
    return WFunction::product(w1, w2);
}

} // namespace biokernel::wcatalog

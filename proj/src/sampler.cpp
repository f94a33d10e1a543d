#include "biokernel/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace biokernel::sampler {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t draw) {
    // mix (seed, draw) into one starting state
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = draw ^ 0xd1b54a32d192ed03ULL;
    std::uint64_t b = splitmix64(s);
    state_ = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

std::uint64_t CounterRng::next_u64() { return splitmix64(state_); }

double CounterRng::next_double() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = next_double();
    } while (u1 <= 0.0);
    double u2 = next_double();
    double m = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * M_PI * u2;
    spare_ = m * std::sin(th);
    have_spare_ = true;
    return m * std::cos(th);
}

std::vector<double> hermitian_eigenvalues(std::vector<complexd> a, int n) {
    if (n <= 0 || int(a.size()) != n * n)
        throw PreconditionViolated("hermitian_eigenvalues: bad dimensions");
    auto at = [&](int i, int j) -> complexd& { return a[std::size_t(i) * n + j]; };

    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);

    // Householder reduction to real symmetric tridiagonal form.
    // Column-by-column elimination with complex reflectors; subdiagonals are
    // rotated to real nonnegative values at the end of each step.
    for (int k = 0; k < n - 2; ++k) {
        // x = A[k+1..n-1, k]
        double xnorm = 0.0;
        for (int i = k + 1; i < n; ++i) xnorm += std::norm(at(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm < 1e-300) {
            continue;
        }
        complexd x0 = at(k + 1, k);
        double ax0 = std::abs(x0);
        complexd phase = (ax0 > 0) ? x0 / ax0 : complexd(1.0);
        complexd alpha = -phase * xnorm;
        // v = x - alpha e1, normalized
        std::vector<complexd> v(std::size_t(n), 0.0);
        v[std::size_t(k) + 1] = x0 - alpha;
        for (int i = k + 2; i < n; ++i) v[std::size_t(i)] = at(i, k);
        double vn = 0.0;
        for (int i = k + 1; i < n; ++i) vn += std::norm(v[std::size_t(i)]);
        if (vn < 1e-300) continue;
        vn = std::sqrt(vn);
        for (int i = k + 1; i < n; ++i) v[std::size_t(i)] /= vn;
        // A := (I - 2 v v*) A (I - 2 v v*)
        // w = A v
        std::vector<complexd> w(std::size_t(n), 0.0);
        for (int i = k; i < n; ++i) {
            complexd s = 0.0;
            for (int j = k + 1; j < n; ++j) s += at(i, j) * v[std::size_t(j)];
            w[std::size_t(i)] = s;
        }
        // K = v* w (real for Hermitian A)
        complexd kvw = 0.0;
        for (int i = k + 1; i < n; ++i) kvw += std::conj(v[std::size_t(i)]) * w[std::size_t(i)];
        // A := A - 2 v w* - 2 w v* + 4 (v* w) v v*
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j) {
                complexd vi = (i > k) ? v[std::size_t(i)] : complexd(0.0);
                complexd vj = (j > k) ? v[std::size_t(j)] : complexd(0.0);
                at(i, j) += -2.0 * vi * std::conj(w[std::size_t(j)]) -
                            2.0 * w[std::size_t(i)] * std::conj(vj) +
                            4.0 * kvw * vi * std::conj(vj);
            }
    }
    // remove residual phases from the subdiagonal: D A D* with |D_ii| = 1
    std::vector<complexd> phase(std::size_t(n), 1.0);
    for (int i = 1; i < n; ++i) {
        complexd sub = at(i, i - 1) * std::conj(phase[std::size_t(i) - 1]);
        double m = std::abs(sub);
        phase[std::size_t(i)] = (m > 1e-300) ? std::conj(sub / m) : complexd(1.0);
        e[std::size_t(i) - 1] = m;
        d[std::size_t(i) - 1] = at(i - 1, i - 1).real();
    }
    d[std::size_t(n) - 1] = at(n - 1, n - 1).real();

    // Implicit-shift QL on the real tridiagonal (d, e).
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[std::size_t(m)]) + std::abs(d[std::size_t(m) + 1]);
                if (std::abs(e[std::size_t(m)]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (iter++ == 100) throw Error("QL did not converge");
                double g = (d[std::size_t(l) + 1] - d[std::size_t(l)]) / (2.0 * e[std::size_t(l)]);
                double r = std::hypot(g, 1.0);
                g = d[std::size_t(m)] - d[std::size_t(l)] +
                    e[std::size_t(l)] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[std::size_t(i)];
                    double b = c * e[std::size_t(i)];
                    r = std::hypot(f, g);
                    e[std::size_t(i) + 1] = r;
                    if (r == 0.0) {
                        d[std::size_t(i) + 1] -= p;
                        e[std::size_t(m)] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[std::size_t(i) + 1] - p;
                    r = (d[std::size_t(i)] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[std::size_t(i) + 1] = g + p;
                    g = c * r - b;
                }
                if (underflow) continue;
                d[std::size_t(l)] -= p;
                e[std::size_t(l)] = g;
                e[std::size_t(m)] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

EigenSamples sample_gue_source(int n, const std::vector<double>& a, int count,
                               std::uint64_t seed) {
    if (count < 1) throw PreconditionViolated("count must be >= 1");
    if (int(a.size()) != n) throw PreconditionViolated("need n source values");
    EigenSamples out;
    out.n = n;
    out.count = count;
    out.values.resize(std::size_t(n) * count);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int dr = 0; dr < count; ++dr) {
        CounterRng rng(seed, std::uint64_t(dr));
        std::vector<complexd> m(std::size_t(n) * n);
        for (int i = 0; i < n; ++i) {
            m[std::size_t(i) * n + i] = complexd(rng.next_gaussian() + a[std::size_t(i)], 0.0);
            for (int j = i + 1; j < n; ++j) {
                complexd z(rng.next_gaussian() * inv_sqrt2, rng.next_gaussian() * inv_sqrt2);
                m[std::size_t(i) * n + j] = z;
                m[std::size_t(j) * n + i] = std::conj(z);
            }
        }
        auto ev = hermitian_eigenvalues(std::move(m), n);
        std::copy(ev.begin(), ev.end(), out.values.begin() + std::size_t(dr) * n);
    }
    return out;
}

EigenSamples sample_lue(int n, int nu, int count, std::uint64_t seed) {
    if (count < 1) throw PreconditionViolated("count must be >= 1");
    if (nu < 0) throw PreconditionViolated("nu must be a nonnegative integer");
    EigenSamples out;
    out.n = n;
    out.count = count;
    out.values.resize(std::size_t(n) * count);
    const int m = n + nu;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int dr = 0; dr < count; ++dr) {
        CounterRng rng(seed, std::uint64_t(dr));
        std::vector<complexd> g(std::size_t(n) * m);
        for (auto& z : g)
            z = complexd(rng.next_gaussian() * inv_sqrt2, rng.next_gaussian() * inv_sqrt2);
        std::vector<complexd> w(std::size_t(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                complexd s = 0.0;
                for (int k = 0; k < m; ++k)
                    s += g[std::size_t(i) * m + k] * std::conj(g[std::size_t(j) * m + k]);
                w[std::size_t(i) * n + j] = s;
            }
        auto ev = hermitian_eigenvalues(std::move(w), n);
        std::copy(ev.begin(), ev.end(), out.values.begin() + std::size_t(dr) * n);
    }
    return out;
}

VerificationReport empirical_vs_kernel(const EigenSamples& samples,
                                       const std::function<double(double)>& kernel_diag,
                                       const std::vector<double>& grid) {
    if (samples.values.empty()) throw PreconditionViolated("no samples");
    if (grid.size() < 3) throw GridTooCoarse("grid too small");

    // model CDF: cumulative trapezoid of kernel_diag / N over the grid
    std::vector<double> dens(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        dens[i] = kernel_diag(grid[i]) / double(samples.n);
    std::vector<double> cdf(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double seg = 0.5 * (dens[i] + dens[i - 1]) * (grid[i] - grid[i - 1]);
        if (seg < -1e-9)
            throw GridTooCoarse("kernel CDF is non-monotone on the grid");
        cdf[i] = cdf[i - 1] + std::max(seg, 0.0);
    }
    const double total = cdf.back();
    if (!(total > 0.0)) throw GridTooCoarse("kernel density integrates to zero on the grid");
    for (auto& v : cdf) v /= total;

    std::vector<double> sorted(samples.values);
    std::sort(sorted.begin(), sorted.end());
    const double inv = 1.0 / double(sorted.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), grid[i]);
        double emp = double(it - sorted.begin()) * inv;
        sup = std::max(sup, std::abs(emp - cdf[i]));
    }
    const double tol = 0.02 * std::sqrt(1e5 / double(samples.count));
    return VerificationReport::make("empirical_vs_kernel", sup, tol,
                                    "sup CDF gap over " + std::to_string(grid.size()) +
                                        " grid points");
}

} // namespace biokernel::sampler

#pragma once

#include "biokernel/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace biokernel::sampler {

/// Counter-based deterministic generator: an independent stream per
/// (seed, draw index), so draws can be produced in any order or in parallel.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t draw);
    std::uint64_t next_u64();
    double next_double();   // [0, 1)
    double next_gaussian(); // standard normal, Box-Muller

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Eigenvalues of a complex Hermitian matrix (row-major, n x n) by Householder
/// tridiagonalization and implicit-shift QL; ascending order.
std::vector<double> hermitian_eigenvalues(std::vector<complexd> matrix, int n);

struct EigenSamples {
    int n = 0;
    int count = 0;
    std::vector<double> values; // draw-major, each draw ascending
};

/// GUE with external source: eigenvalues of M + diag(a), density of M
/// proportional to e^{-Tr M^2 / 2}.
EigenSamples sample_gue_source(int n, const std::vector<double>& a, int count,
                               std::uint64_t seed);

/// LUE: eigenvalues of G G* with G an n x (n+nu) complex Gaussian matrix
/// (components of variance 1/2).
EigenSamples sample_lue(int n, int nu, int count, std::uint64_t seed);

/// Compare the empirical eigenvalue CDF against the CDF of kernel_diag(x)/N on
/// the grid; discrepancy is the sup gap.  Tolerance scales like 0.02 at 1e5 draws.
VerificationReport empirical_vs_kernel(const EigenSamples& samples,
                                       const std::function<double(double)>& kernel_diag,
                                       const std::vector<double>& grid);

} // namespace biokernel::sampler

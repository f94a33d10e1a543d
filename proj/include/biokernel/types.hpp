#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace biokernel {

using complexd = std::complex<double>;

// Base for every library error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define BIOKERNEL_ERROR(Name)                       \
    class Name : public Error {                     \
    public:                                         \
        using Error::Error;                         \
    }

BIOKERNEL_ERROR(InvalidContour);
BIOKERNEL_ERROR(TailTooFat);
BIOKERNEL_ERROR(NoDecay);
BIOKERNEL_ERROR(OutsideStrip);
BIOKERNEL_ERROR(AtPoleOrZero);
BIOKERNEL_ERROR(PoleAtNonpositiveInteger);
BIOKERNEL_ERROR(EmptyStrip);
BIOKERNEL_ERROR(PreconditionViolated);
BIOKERNEL_ERROR(ConfluentSources);
BIOKERNEL_ERROR(NoRoom);
BIOKERNEL_ERROR(BranchCutHit);
BIOKERNEL_ERROR(ZeroW);
BIOKERNEL_ERROR(DecayViolation);
BIOKERNEL_ERROR(SeriesNotConverged);
BIOKERNEL_ERROR(GridTooCoarse);
BIOKERNEL_ERROR(ConfigError);

#undef BIOKERNEL_ERROR

struct QuadratureSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t max_nodes = std::size_t(1) << 21;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1.0))
            throw PreconditionViolated("rel_tol must be in (0,1)");
        if (!(abs_tol > 0.0))
            throw PreconditionViolated("abs_tol must be positive");
        if (max_nodes < 64)
            throw PreconditionViolated("max_nodes must be >= 64");
    }

    double tolerance_for(complexd value) const {
        return std::max(abs_tol, rel_tol * std::abs(value));
    }
};

struct QuadratureResult {
    complexd value{};
    double error_estimate = 0.0;
    std::size_t nodes_used = 0;
    bool converged = false;
};

struct KernelValue {
    complexd value{};
    double error_estimate = 0.0;
    std::size_t nodes = 0;
    bool converged = false;
};

struct VerificationReport {
    std::string check_name;
    double discrepancy = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string details;

    static VerificationReport make(std::string name, double discrepancy,
                                   double tolerance, std::string details = "") {
        VerificationReport r;
        r.check_name = std::move(name);
        r.discrepancy = discrepancy;
        r.tolerance = tolerance;
        r.passed = discrepancy <= tolerance;
        r.details = std::move(details);
        return r;
    }
};

} // namespace biokernel

#pragma once

#include <stdexcept>
#include <string>

namespace hs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

// The integrand has a non-integrable singularity at the requested eta.
struct NonIntegrable : Error {
    using Error::Error;
};

struct ToleranceNotMet : Error {
    ToleranceNotMet(const std::string& what, double estimate, double bound)
        : Error(what), estimate(estimate), error_bound(bound) {}
    double estimate;
    double error_bound;
};

struct BlowupProximity : Error {
    using Error::Error;
};

// lambda == 0 or kappa == 0: the representation formulas do not apply.
struct SpecialCase : Error {
    using Error::Error;
};

struct HypothesisViolated : Error {
    using Error::Error;
};

struct OutOfRange : Error {
    using Error::Error;
};

struct TailUncertain : Error {
    TailUncertain(const std::string& what, double lo, double hi) : Error(what), lower(lo), upper(hi) {}
    double lower;
    double upper;
};

struct OmegaOverflow : Error {
    using Error::Error;
};

struct StabilityViolation : Error {
    using Error::Error;
};

struct Overflow : Error {
    using Error::Error;
};

struct FitUnstable : Error {
    FitUnstable(const std::string& what, double residual) : Error(what), residual(residual) {}
    double residual;
};

}  // namespace hs

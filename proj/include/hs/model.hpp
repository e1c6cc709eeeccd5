#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hs {

using Profile = std::function<double(double)>;

enum class BcMode { Periodic, Dirichlet };

struct InitialData {
    Profile u0_prime;
    Profile rho0;
    Profile u0;  // optional antiderivative of u0_prime; empty when unknown
    BcMode bc_mode = BcMode::Periodic;
    std::string family_tag;

    // Builtin identifier and parameters, kept for serialization.
    std::string family;
    std::vector<double> params;

    // Interior points where the profiles may jump. Quadrature never places a
    // panel across one of these.
    std::vector<double> breakpoints;

    // Raw samples for the custom-samples family.
    std::vector<double> sample_alpha, sample_u0_prime, sample_rho0;

    bool has_jumps() const { return !breakpoints.empty(); }
};

struct ToleranceSet {
    double quad_abs = 1e-10;
    double quad_rel = 1e-9;
    double root_tol = 1e-12;
    double eta_cutoff = 1e-6;
    int grid_n = 512;
};

struct ProblemSpec {
    double lambda = 0.0;
    double kappa = 0.0;
    InitialData data;
    ToleranceSet tol;
};

// Builtin families: cos2pi [c, a], sin2pi [b, a], const [c, s], affine [c],
// piecewise_c2 []. Missing trailing parameters take their defaults.
InitialData make_builtin(const std::string& name, const std::vector<double>& params,
                         BcMode bc = BcMode::Periodic);

// Sampled profiles on an increasing alpha grid covering [0, 1], interpolated
// with a monotone cubic.
InitialData make_sampled(const std::vector<double>& alpha, const std::vector<double>& u0_prime,
                         const std::vector<double>& rho0, BcMode bc = BcMode::Periodic);

// Returns one message per violated invariant; empty means valid.
std::vector<std::string> validate(const ProblemSpec& spec);

// Sorted list {0, breakpoints..., 1}.
std::vector<double> data_breaks(const InitialData& data);

const char* to_string(BcMode bc);
BcMode bc_from_string(const std::string& s);

}  // namespace hs

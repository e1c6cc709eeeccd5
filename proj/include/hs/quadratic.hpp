#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hs/model.hpp"

namespace hs {

struct EtaRoot {
    double eta;
    int multiplicity;
};

struct PointAnalysis {
    double alpha = 0.0;
    double c_val = 0.0;
    double disc = 0.0;
    double g1 = 0.0;  // NaN when disc < 0
    double g2 = 0.0;
    std::vector<EtaRoot> roots;  // real roots of Q(alpha, .), ascending
};

enum class Multiplicity { Single, Double, None };
const char* to_string(Multiplicity m);

struct Interval {
    double lo, hi;
};

struct RootReport {
    std::vector<double> omega_set;
    std::optional<double> M, N, N1;
    std::optional<double> eta_star;
    Multiplicity multiplicity = Multiplicity::None;
    // Isolated attaining points followed by the endpoints of any attaining
    // intervals (the latter also listed in alpha_bar_intervals).
    std::vector<double> alpha_bar;
    std::vector<Interval> alpha_bar_intervals;
    bool alpha_bar_interval = false;
    // Zero set of rho0, used by the lambda*kappa < 0 branches.
    std::vector<double> rho0_zeros;
    std::vector<Interval> rho0_zero_intervals;
};

double c_value(const ProblemSpec& spec, double alpha);
double q_value(const ProblemSpec& spec, double alpha, double eta);
// Q from pointwise data in factored form, accurate near double roots.
double q_stable(double lambda, double kappa, double u0p, double rho, double eta);

PointAnalysis analyze_point(const ProblemSpec& spec, double alpha);

// Zeros of C. Throws OmegaOverflow beyond 64 zeros or when C vanishes on an interval.
std::vector<double> find_omega(const ProblemSpec& spec);

RootReport root_report(const ProblemSpec& spec);

// max over [0,1] of |C| on the scan grid, used for the C == 0 special case.
double max_abs_c(const ProblemSpec& spec);

struct ZeroSet {
    std::vector<double> points;
    std::vector<Interval> intervals;
};

struct Extremum {
    double value = 0.0;
    std::vector<double> points;
    std::vector<Interval> intervals;
};

// Scan helpers over the data pieces of `spec`, exposed for testing.
ZeroSet zero_set(const ProblemSpec& spec, const Profile& f, double ztol);
Extremum maximize(const ProblemSpec& spec, const Profile& f, const std::vector<Interval>& domain);

}  // namespace hs

#pragma once

#include <optional>
#include <vector>

#include "hs/model.hpp"
#include "hs/numerics.hpp"
#include "hs/parallel.hpp"
#include "hs/quadratic.hpp"

namespace hs {

// [lo, hi] in alpha split at forced break points and mapped onto
// tau in [0, K], one unit per segment. Segments touching a blow-up point use
// alpha = abar +/- w s^2 so the integrand stays smooth in s.
class AlphaDomain {
public:
    struct Segment {
        double a, b;
        int mode;  // 0 linear, 1 quadratic from a, 2 quadratic from b
    };

    AlphaDomain(const std::vector<double>& breaks, const std::vector<double>& singular, double lo, double hi);

    double alpha(double tau, double& jac) const;
    std::vector<double> tau_points() const;
    const std::vector<Segment>& segments() const { return segs_; }

private:
    std::vector<Segment> segs_;
};

// Sorted forced break list: 0, 1, data breakpoints, Omega points and alpha_bar.
std::vector<double> alpha_breaks(const ProblemSpec& spec, const RootReport& report);

// Integral objects at fixed eta. All of them throw ToleranceNotMet when the
// requested accuracy is not reached.
double pbar0(const ProblemSpec& spec, const RootReport& report, double eta);
double i2(const ProblemSpec& spec, const RootReport& report, double eta);
double p0_partial(const ProblemSpec& spec, const RootReport& report, double alpha, double eta);
// int_a^b Q(y, eta)^{-1/(2 lambda)} dy for 0 <= a <= b <= 1.
double p0_between(const ProblemSpec& spec, const RootReport& report, double a, double b, double eta);
// int_0^1 P0(alpha) int_0^alpha h(y) dy d alpha with P0 = Q^{-1/(2 lambda)} and
// h = (lambda u0' - eta C) Q^{-1-1/(2 lambda)}: the eta-derivative of the
// partial integrals weighted by P0, used by the periodic trajectory gauge.
double nested_moment(const ProblemSpec& spec, const RootReport& report, double eta);
QuadResult pbar0_result(const ProblemSpec& spec, const RootReport& report, double eta);

// Power p in |Q(alpha, eta*)| ~ |alpha - abar|^p near each isolated blow-up
// point (largest over points and sides); +inf when Q vanishes on an interval.
double contact_exponent(const ProblemSpec& spec, const RootReport& report);

struct IntegralCache {
    std::vector<double> eta_knots;
    std::vector<double> pbar_vals;
    std::vector<double> i2_vals;
    std::vector<double> t_vals;
};

// Within eta_star - eta of a root, Q itself carries about
// eps * eta_star / (eta_star - eta) relative rounding error. This returns a
// copy of `spec` whose tolerances are floored at that level.
ProblemSpec with_roundoff_floor(const ProblemSpec& spec, const RootReport& report, double eta);

IntegralCache build_cache(const ProblemSpec& spec, const RootReport& report, Exec exec = Exec::OpenMP);

struct TimeLimit {
    bool finite = false;
    double value = 0.0;
    double error = 0.0;
    bool uncertain = false;  // extrapolated tail and direct quadrature disagreed
};

struct Context {
    ProblemSpec spec;
    RootReport report;
    std::vector<double> breaks;
    IntegralCache cache;
    TimeLimit t_limit;
};

// Root report, time cache and terminal time for a validated spec.
// Throws SpecialCase when lambda == 0.
Context make_context(const ProblemSpec& spec);

double time_of_eta(const Context& ctx, double eta);
double eta_of_time(const Context& ctx, double t);
TimeLimit terminal_time(const ProblemSpec& spec, const RootReport& report, const IntegralCache& cache);

// Largest eta at which fields are evaluated (infinity without eta_star).
double eta_limit(const Context& ctx);

}  // namespace hs

#pragma once

#include <optional>
#include <vector>

#include "hs/parallel.hpp"
#include "hs/quadrature.hpp"

namespace hs {

struct SolutionSample {
    double alpha = 0.0;
    double eta = 0.0;
    double t = 0.0;
    double jac = 1.0;
    double ux = 0.0;
    double rho = 0.0;
    std::optional<double> gamma;
};

// Everything about one eta level that does not depend on alpha.
struct EtaState {
    double eta;
    double t;
    double pbar0;
    double i2;
};

// Throws BlowupProximity past (1 - eta_cutoff) eta_star and SpecialCase for kappa == 0.
EtaState eta_state(const Context& ctx, double eta);
EtaState eta_state_at_time(const Context& ctx, double t);

SolutionSample sample_at(const Context& ctx, const EtaState& st, double alpha);

double jacobian(const Context& ctx, double alpha, double eta);
double eval_ux(const Context& ctx, double alpha, double eta);
double eval_rho(const Context& ctx, double alpha, double eta);

// Mean-zero gauge term of the periodic trajectory (zero in Dirichlet mode).
double gamma0(const Context& ctx, double eta);
// d gamma0 / d eta.
double gamma0_rate(const Context& ctx, double eta);
double trajectory(const Context& ctx, double alpha, double eta);

// Samples on the given increasing alpha grid, with trajectories when requested.
std::vector<SolutionSample> evaluate_grid(const Context& ctx, double eta, const std::vector<double>& alphas,
                                          bool with_gamma, Exec exec = Exec::OpenMP);

struct SliceRow {
    double alpha, x, eta, t, jac, ux, rho;
};

// n characteristics traced at eta and sorted by position.
std::vector<SliceRow> eulerian_slice(const Context& ctx, double eta, int n, Exec exec = Exec::OpenMP);

struct SteadyState {
    double curly_m = 0.0;
    double curly_n = 0.0;
    Profile u_inf;
    Profile p_inf;
};

// Finite-time limits for lambda*kappa < 0 with C > 0 and no admissible rho0 zero.
SteadyState steady_constants(const ProblemSpec& spec);

}  // namespace hs

#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "hs/model.hpp"
#include "hs/quadrature.hpp"

namespace hs {

struct GridState {
    int n = 0;
    double t = 0.0;
    double period = 1.0;
    std::vector<double> v;  // u_x samples at x_j = j * period / n
    std::vector<double> r;  // rho samples
};

struct OracleOptions {
    double cfl = 0.5;        // fraction of the advective bound dx / max|u|
    double ceiling = 1e6;    // blow-up monitor on max|v|
};

// Pseudo-spectral integrator for the two-component system with the nonlocal
// term chosen to keep mean(u_x) = 0. Dirichlet data is evolved on period 2
// through its even extension (u odd), which preserves u(0) = u(1) = 0.
class SpectralOracle {
public:
    SpectralOracle(const ProblemSpec& spec, int n, OracleOptions opt = {});
    ~SpectralOracle();
    SpectralOracle(const SpectralOracle&) = delete;
    SpectralOracle& operator=(const SpectralOracle&) = delete;

    GridState initial() const;
    GridState step(const GridState& s, double dt) const;
    double stable_dt(const GridState& s) const;
    // Velocity u recovered from v with zero mean.
    std::vector<double> velocity(const GridState& s) const;
    // States at each requested output time (ascending, >= 0).
    std::vector<GridState> run_until(const std::vector<double>& times) const;

    // Trigonometric interpolation of the band-limited fields at x.
    double interp_v(const GridState& s, double x) const;
    double interp_r(const GridState& s, double x) const;

    int n() const { return n_; }
    double period() const { return period_; }

private:
    struct Fft;
    void rhs(const std::vector<double>& v, const std::vector<double>& r, std::vector<double>& dv,
             std::vector<double>& dr) const;
    void truncate(std::vector<double>& f) const;
    double interp(const std::vector<double>& f, double x) const;

    double lambda_, kappa_;
    InitialData data_;
    int n_;
    double period_;
    OracleOptions opt_;
    std::unique_ptr<Fft> fft_;
};

// Sup-norm discrepancy of (u_x, rho) between the oracle and the
// representation formulas at time t, sampled along m characteristics.
struct Discrepancy {
    double ux = 0.0;
    double rho = 0.0;
    double sup() const { return ux > rho ? ux : rho; }
};

Discrepancy oracle_discrepancy(const Context& ctx, double t, int n, int m = 64, OracleOptions opt = {});

}  // namespace hs

#include "hs/oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "hs/errors.hpp"
#include "hs/evaluator.hpp"

namespace hs {

namespace {
std::mutex plan_mutex;  // FFTW planning is not thread-safe
}

struct SpectralOracle::Fft {
    int n;
    double* real;
    fftw_complex* spec;
    fftw_plan fwd, bwd;

    explicit Fft(int n) : n(n) {
        real = fftw_alloc_real(n);
        spec = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard<std::mutex> lock(plan_mutex);
        fwd = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
    }
    ~Fft() {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(spec);
    }

    std::vector<std::complex<double>> forward(const std::vector<double>& f) const {
        std::copy(f.begin(), f.end(), real);
        fftw_execute(fwd);
        std::vector<std::complex<double>> c(n / 2 + 1);
        for (int k = 0; k <= n / 2; ++k) c[k] = {spec[k][0] / n, spec[k][1] / n};
        return c;
    }
    std::vector<double> backward(const std::vector<std::complex<double>>& c) const {
        for (int k = 0; k <= n / 2; ++k) {
            spec[k][0] = c[k].real();
            spec[k][1] = c[k].imag();
        }
        fftw_execute(bwd);
        return std::vector<double>(real, real + n);
    }
};

SpectralOracle::SpectralOracle(const ProblemSpec& spec, int n, OracleOptions opt)
    : lambda_(spec.lambda), kappa_(spec.kappa), data_(spec.data), n_(n), opt_(opt) {
    if (n < 8 || (n & (n - 1)) != 0) throw ValidationError("oracle grid size must be a power of two >= 8");
    period_ = data_.bc_mode == BcMode::Dirichlet ? 2.0 : 1.0;
    fft_ = std::make_unique<Fft>(n);
}

SpectralOracle::~SpectralOracle() = default;

void SpectralOracle::truncate(std::vector<double>& f) const {
    auto c = fft_->forward(f);
    const int kmax = n_ / 3;
    for (int k = kmax + 1; k <= n_ / 2; ++k) c[k] = 0.0;
    f = fft_->backward(c);
}

GridState SpectralOracle::initial() const {
    GridState s;
    s.n = n_;
    s.period = period_;
    s.v.resize(n_);
    s.r.resize(n_);
    for (int j = 0; j < n_; ++j) {
        const double x = period_ * j / n_;
        const double a = x <= 1.0 ? x : 2.0 - x;
        s.v[j] = data_.u0_prime(a);
        s.r[j] = data_.rho0(a);
    }
    truncate(s.v);
    truncate(s.r);
    // Remove the mean of the band-limited slope so u is periodic.
    double mean = 0.0;
    for (double x : s.v) mean += x;
    mean /= n_;
    for (double& x : s.v) x -= mean;
    return s;
}

std::vector<double> SpectralOracle::velocity(const GridState& s) const {
    auto c = fft_->forward(s.v);
    const double w = 2.0 * std::numbers::pi / period_;
    c[0] = 0.0;
    for (int k = 1; k <= n_ / 2; ++k) c[k] /= std::complex<double>(0.0, w * k);
    if (n_ % 2 == 0) c[n_ / 2] = 0.0;
    return fft_->backward(c);
}

void SpectralOracle::rhs(const std::vector<double>& v, const std::vector<double>& r, std::vector<double>& dv,
                         std::vector<double>& dr) const {
    const double w = 2.0 * std::numbers::pi / period_;
    const int kmax = n_ / 3;
    auto cv = fft_->forward(v), cr = fft_->forward(r);
    for (int k = kmax + 1; k <= n_ / 2; ++k) cv[k] = cr[k] = 0.0;
    std::vector<std::complex<double>> cu(cv.size()), cvx(cv.size()), crx(cv.size());
    for (int k = 1; k <= kmax; ++k) {
        const std::complex<double> ik(0.0, w * k);
        cu[k] = cv[k] / ik;
        cvx[k] = cv[k] * ik;
        crx[k] = cr[k] * ik;
    }
    const auto u = fft_->backward(cu), vx = fft_->backward(cvx), rx = fft_->backward(crx);
    const auto vf = fft_->backward(cv), rf = fft_->backward(cr);
    dv.resize(n_);
    dr.resize(n_);
    double mean = 0.0;
    for (int j = 0; j < n_; ++j) {
        dv[j] = -u[j] * vx[j] + lambda_ * vf[j] * vf[j] + kappa_ * rf[j] * rf[j];
        dr[j] = -u[j] * rx[j] + 2.0 * lambda_ * rf[j] * vf[j];
        mean += dv[j];
    }
    // The nonlocal term is exactly what keeps the mean of u_x at zero.
    mean /= n_;
    for (double& x : dv) x -= mean;
    truncate(dv);
    truncate(dr);
}

GridState SpectralOracle::step(const GridState& s, double dt) const {
    const std::size_t n = s.v.size();
    std::vector<double> k1v, k1r, k2v, k2r, k3v, k3r, k4v, k4r, tv(n), tr(n);
    rhs(s.v, s.r, k1v, k1r);
    for (std::size_t j = 0; j < n; ++j) {
        tv[j] = s.v[j] + 0.5 * dt * k1v[j];
        tr[j] = s.r[j] + 0.5 * dt * k1r[j];
    }
    rhs(tv, tr, k2v, k2r);
    for (std::size_t j = 0; j < n; ++j) {
        tv[j] = s.v[j] + 0.5 * dt * k2v[j];
        tr[j] = s.r[j] + 0.5 * dt * k2r[j];
    }
    rhs(tv, tr, k3v, k3r);
    for (std::size_t j = 0; j < n; ++j) {
        tv[j] = s.v[j] + dt * k3v[j];
        tr[j] = s.r[j] + dt * k3r[j];
    }
    rhs(tv, tr, k4v, k4r);
    GridState out = s;
    out.t = s.t + dt;
    double vmax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        out.v[j] = s.v[j] + dt / 6.0 * (k1v[j] + 2.0 * k2v[j] + 2.0 * k3v[j] + k4v[j]);
        out.r[j] = s.r[j] + dt / 6.0 * (k1r[j] + 2.0 * k2r[j] + 2.0 * k3r[j] + k4r[j]);
        if (!std::isfinite(out.v[j]) || !std::isfinite(out.r[j])) throw StabilityViolation("non-finite oracle state");
        vmax = std::max(vmax, std::abs(out.v[j]));
    }
    if (vmax > opt_.ceiling) throw Overflow("oracle blow-up monitor tripped: max|u_x| above ceiling");
    return out;
}

double SpectralOracle::stable_dt(const GridState& s) const {
    const auto u = velocity(s);
    double umax = 0.0, vmax = 0.0, rmax = 0.0;
    for (int j = 0; j < n_; ++j) {
        umax = std::max(umax, std::abs(u[j]));
        vmax = std::max(vmax, std::abs(s.v[j]));
        rmax = std::max(rmax, std::abs(s.r[j]));
    }
    const double dx = period_ / n_;
    const double adv = umax > 0.0 ? dx / umax : 1e300;
    const double rate = std::max({2.0 * std::abs(lambda_) * vmax, std::sqrt(std::abs(kappa_)) * rmax, 1e-300});
    return opt_.cfl * std::min(adv, 0.5 / rate);
}

std::vector<GridState> SpectralOracle::run_until(const std::vector<double>& times) const {
    std::vector<GridState> out;
    GridState s = initial();
    for (double target : times) {
        if (target < s.t) throw ValidationError("oracle output times must be ascending");
        while (s.t < target) {
            double dt = stable_dt(s);
            if (!(dt > 1e-12)) throw StabilityViolation("oracle time step collapsed");
            // Land exactly on the output time.
            if (s.t + dt >= target) dt = target - s.t;
            const double before = s.t;
            s = step(s, dt);
            if (s.t + 1e-15 * std::max(1.0, target) >= target) s.t = target;
            if (!(s.t > before)) break;
        }
        out.push_back(s);
    }
    return out;
}

double SpectralOracle::interp(const std::vector<double>& f, double x) const {
    const auto c = fft_->forward(f);
    const double w = 2.0 * std::numbers::pi / period_;
    double sum = c[0].real();
    for (int k = 1; k <= n_ / 3; ++k) sum += 2.0 * (c[k] * std::polar(1.0, w * k * x)).real();
    return sum;
}

double SpectralOracle::interp_v(const GridState& s, double x) const { return interp(s.v, x); }
double SpectralOracle::interp_r(const GridState& s, double x) const { return interp(s.r, x); }

Discrepancy oracle_discrepancy(const Context& ctx, double t, int n, int m, OracleOptions opt) {
    SpectralOracle orc(ctx.spec, n, opt);
    const auto states = orc.run_until({t});
    const auto& st = states.back();
    const double eta = eta_of_time(ctx, t);
    std::vector<double> alphas(m);
    for (int i = 0; i < m; ++i) alphas[i] = (i + 0.5) / m;
    const auto samples = evaluate_grid(ctx, eta, alphas, true, Exec::Serial);
    Discrepancy d;
    for (const auto& s : samples) {
        const double x = std::fmod(*s.gamma + orc.period(), orc.period());
        d.ux = std::max(d.ux, std::abs(orc.interp_v(st, x) - s.ux));
        d.rho = std::max(d.rho, std::abs(orc.interp_r(st, x) - s.rho));
    }
    return d;
}

}  // namespace hs

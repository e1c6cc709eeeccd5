#include "hs/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "hs/errors.hpp"
#include "hs/numerics.hpp"

namespace hs {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double param(const std::vector<double>& p, std::size_t i, double dflt) { return i < p.size() ? p[i] : dflt; }

void check_arity(const std::string& name, const std::vector<double>& p, std::size_t max) {
    if (p.size() > max)
        throw ValidationError(name + " takes at most " + std::to_string(max) + " parameters, got " +
                              std::to_string(p.size()));
}

}  // namespace

InitialData make_builtin(const std::string& name, const std::vector<double>& params, BcMode bc) {
    InitialData d;
    d.family = name;
    d.params = params;
    d.bc_mode = bc;
    if (name == "cos2pi" || name == "sin2pi") {
        check_arity(name, params, 2);
        const double c = param(params, 0, 1.0), a = param(params, 1, 1.0);
        d.u0_prime = [a](double x) { return a * std::cos(two_pi * x); };
        d.u0 = [a](double x) { return a * std::sin(two_pi * x) / two_pi; };
        if (name == "cos2pi")
            d.rho0 = [c](double) { return c; };
        else
            d.rho0 = [c](double x) { return c * std::sin(two_pi * x); };
        d.family_tag = "trig";
    } else if (name == "const") {
        check_arity(name, params, 2);
        const double c = param(params, 0, 1.0), s = param(params, 1, 0.0);
        d.u0_prime = [s](double) { return s; };
        d.u0 = [s](double x) { return s * x; };
        d.rho0 = [c](double) { return c; };
        d.family_tag = "constant";
        if (bc == BcMode::Periodic && s != 0.0)
            throw ValidationError("const: nonzero slope breaks periodicity of u0");
        if (bc == BcMode::Dirichlet && s != 0.0)
            throw ValidationError("const: nonzero slope violates u0(1) = 0");
    } else if (name == "affine") {
        check_arity(name, params, 1);
        const double c = param(params, 0, 1.0);
        d.u0_prime = [](double x) { return 1.0 - 2.0 * x; };
        d.u0 = [](double x) { return x * (1.0 - x); };
        d.rho0 = [c](double) { return c; };
        d.family_tag = "affine";
        if (bc == BcMode::Periodic)
            throw ValidationError("affine: u0' = 1 - 2x takes different values at 0 and 1; use Dirichlet mode");
    } else if (name == "piecewise_c2") {
        check_arity(name, params, 0);
        d.u0_prime = [](double x) { return x < 0.25 ? 0.5 : (x <= 0.75 ? 1.0 : -2.5); };
        d.rho0 = [](double x) { return (x < 0.25 || x > 0.75) ? -0.25 : 0.0; };
        d.u0 = [](double x) {
            if (x < 0.25) return 0.5 * x;
            if (x <= 0.75) return 0.125 + (x - 0.25);
            return 0.625 - 2.5 * (x - 0.75);
        };
        d.breakpoints = {0.25, 0.75};
        d.family_tag = "piecewise-constant";
    } else {
        throw ValidationError("unknown initial-data family '" + name + "'");
    }
    return d;
}

InitialData make_sampled(const std::vector<double>& alpha, const std::vector<double>& u0_prime,
                         const std::vector<double>& rho0, BcMode bc) {
    if (alpha.size() < 2 || u0_prime.size() != alpha.size() || rho0.size() != alpha.size())
        throw ValidationError("samples: alpha, u0_prime and rho0 must have equal length >= 2");
    if (std::abs(alpha.front()) > 1e-12 || std::abs(alpha.back() - 1.0) > 1e-12)
        throw ValidationError("samples: alpha grid must span [0, 1]");
    InitialData d;
    d.family = "samples";
    d.family_tag = "custom-samples";
    d.bc_mode = bc;
    d.sample_alpha = alpha;
    d.sample_u0_prime = u0_prime;
    d.sample_rho0 = rho0;
    try {
        Pchip pu(alpha, u0_prime), pr(alpha, rho0);
        d.u0_prime = [pu](double x) { return pu(x); };
        d.rho0 = [pr](double x) { return pr(x); };
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("samples: ") + e.what());
    }
    return d;
}

std::vector<double> data_breaks(const InitialData& data) {
    std::vector<double> b{0.0};
    for (double x : data.breakpoints)
        if (x > 0.0 && x < 1.0) b.push_back(x);
    b.push_back(1.0);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

std::vector<std::string> validate(const ProblemSpec& spec) {
    std::vector<std::string> diag;
    if (!std::isfinite(spec.lambda)) diag.push_back("lambda is not finite");
    if (!std::isfinite(spec.kappa)) diag.push_back("kappa is not finite");
    const auto& t = spec.tol;
    if (!(t.quad_abs > 0)) diag.push_back("tol.quad_abs must be positive");
    if (!(t.quad_rel > 0)) diag.push_back("tol.quad_rel must be positive");
    if (!(t.root_tol > 0)) diag.push_back("tol.root_tol must be positive");
    if (!(t.eta_cutoff > 0 && t.eta_cutoff < 1)) diag.push_back("tol.eta_cutoff must lie in (0, 1)");
    if (t.grid_n < 8) diag.push_back("tol.grid_n must be at least 8");

    const auto& d = spec.data;
    if (!d.u0_prime || !d.rho0) {
        diag.push_back("initial data profiles are missing");
        return diag;
    }

    const int n = std::max(t.grid_n, 8) * 4;
    bool bounded = true;
    for (int i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) / n;
        if (!std::isfinite(d.u0_prime(x)) || !std::isfinite(d.rho0(x))) bounded = false;
    }
    if (!bounded) diag.push_back("profiles are not bounded on [0, 1]");

    if (d.bc_mode == BcMode::Periodic) {
        // Jumps are admitted, and the wrap-around at 0 ~ 1 is one of them.
        if (!d.has_jumps()) {
            if (std::abs(d.u0_prime(0.0) - d.u0_prime(1.0)) > 1e-12)
                diag.push_back("periodicity violated: u0_prime(0) != u0_prime(1)");
            if (std::abs(d.rho0(0.0) - d.rho0(1.0)) > 1e-12)
                diag.push_back("periodicity violated: rho0(0) != rho0(1)");
        }
        if (bounded) {
            const auto q = integrate(d.u0_prime, data_breaks(d), 0.1 * t.quad_abs, 0.0);
            if (std::abs(q.value) > 100 * t.quad_abs)
            {
                char buf[96];
                std::snprintf(buf, sizeof buf, "mean-zero violated: integral of u0_prime is %.3g", q.value);
                diag.push_back(buf);
            }
        }
    } else if (d.u0) {
        if (std::abs(d.u0(0.0)) > 1e-12) diag.push_back("Dirichlet condition violated: u0(0) != 0");
        if (std::abs(d.u0(1.0)) > 1e-12) diag.push_back("Dirichlet condition violated: u0(1) != 0");
    }
    return diag;
}

const char* to_string(BcMode bc) { return bc == BcMode::Periodic ? "periodic" : "dirichlet"; }

BcMode bc_from_string(const std::string& s) {
    if (s == "periodic") return BcMode::Periodic;
    if (s == "dirichlet") return BcMode::Dirichlet;
    throw ValidationError("unknown boundary mode '" + s + "'");
}

}  // namespace hs

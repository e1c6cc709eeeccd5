#include "hs/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hs/errors.hpp"

namespace hs {

EtaState eta_state(const Context& ctx, double eta) {
    if (ctx.spec.kappa == 0.0)
        throw SpecialCase("kappa = 0: the system reduces to the giPJ equation; see the classifier verdict");
    if (!(eta >= 0.0)) throw OutOfRange("eta must be non-negative");
    if (eta > eta_limit(ctx)) throw BlowupProximity("eta within the blow-up cutoff of eta_star");
    return {eta, time_of_eta(ctx, eta), pbar0(ctx.spec, ctx.report, eta), i2(ctx.spec, ctx.report, eta)};
}

EtaState eta_state_at_time(const Context& ctx, double t) { return eta_state(ctx, eta_of_time(ctx, t)); }

SolutionSample sample_at(const Context& ctx, const EtaState& st, double alpha) {
    const auto& spec = ctx.spec;
    const double lam = spec.lambda, kap = spec.kappa, eta = st.eta;
    const double u = spec.data.u0_prime(alpha), r = spec.data.rho0(alpha);
    const double c = lam * (lam * u * u - kap * r * r);
    const double q = q_stable(lam, kap, u, r, eta);
    const double p = 1.0 / (2.0 * lam);
    const double pb_pow = std::pow(st.pbar0, -2.0 * lam);
    SolutionSample s;
    s.alpha = alpha;
    s.eta = eta;
    s.t = st.t;
    s.jac = std::pow(q, -p) / st.pbar0;
    s.ux = pb_pow / lam * ((lam * u - eta * c) / q - st.i2 / st.pbar0);
    s.rho = r / q * pb_pow;
    return s;
}

double jacobian(const Context& ctx, double alpha, double eta) { return sample_at(ctx, eta_state(ctx, eta), alpha).jac; }

double eval_ux(const Context& ctx, double alpha, double eta) { return sample_at(ctx, eta_state(ctx, eta), alpha).ux; }

double eval_rho(const Context& ctx, double alpha, double eta) { return sample_at(ctx, eta_state(ctx, eta), alpha).rho; }

double gamma0_rate(const Context& ctx, double eta) {
    if (ctx.spec.data.bc_mode == BcMode::Dirichlet) return 0.0;
    const auto& spec = ctx.spec;
    const double lam = spec.lambda;
    const double pb = pbar0(spec, ctx.report, eta);
    const double dpb = i2(spec, ctx.report, eta) / lam;
    const double w = nested_moment(spec, ctx.report, eta) / lam;
    return -(w / (pb * pb) - dpb / (2.0 * pb));
}

double gamma0(const Context& ctx, double eta) {
    if (ctx.spec.data.bc_mode == BcMode::Dirichlet || eta == 0.0) return 0.0;
    if (eta > eta_limit(ctx)) throw BlowupProximity("eta within the blow-up cutoff of eta_star");
    std::vector<double> pts{0.0};
    for (double k : ctx.cache.eta_knots)
        if (k > 0.0 && k < eta) pts.push_back(k);
    pts.push_back(eta);
    auto f = [&](double s) { return gamma0_rate(ctx, s); };
    const auto r = integrate(f, pts, 1e-12, 1e-10, 2000);
    if (!r.converged) throw ToleranceNotMet("gamma0: tolerance not met", r.value, r.error);
    return r.value;
}

double trajectory(const Context& ctx, double alpha, double eta) {
    if (eta > eta_limit(ctx)) throw BlowupProximity("eta within the blow-up cutoff of eta_star");
    const double g = p0_partial(ctx.spec, ctx.report, alpha, eta) / pbar0(ctx.spec, ctx.report, eta);
    return gamma0(ctx, eta) + g;
}

std::vector<SolutionSample> evaluate_grid(const Context& ctx, double eta, const std::vector<double>& alphas,
                                          bool with_gamma, Exec exec) {
    const EtaState st = eta_state(ctx, eta);
    auto out = parallel_map(exec, alphas.size(), [&](std::size_t i) { return sample_at(ctx, st, alphas[i]); });
    if (!with_gamma || alphas.empty()) return out;
    const double g0 = gamma0(ctx, eta);
    auto seg = parallel_map(exec, alphas.size(), [&](std::size_t i) {
        const double a = i == 0 ? 0.0 : alphas[i - 1];
        return p0_between(ctx.spec, ctx.report, a, alphas[i], eta);
    });
    double cum = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        cum += seg[i];
        out[i].gamma = g0 + cum / st.pbar0;
    }
    return out;
}

std::vector<SliceRow> eulerian_slice(const Context& ctx, double eta, int n, Exec exec) {
    if (n < 2) throw OutOfRange("eulerian_slice needs at least two characteristics");
    std::vector<double> alphas(n);
    for (int i = 0; i < n; ++i) alphas[i] = static_cast<double>(i) / (n - 1);
    const auto samples = evaluate_grid(ctx, eta, alphas, true, exec);
    std::vector<SliceRow> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) rows.push_back({s.alpha, *s.gamma, s.eta, s.t, s.jac, s.ux, s.rho});
    std::stable_sort(rows.begin(), rows.end(), [](const SliceRow& a, const SliceRow& b) { return a.x < b.x; });
    return rows;
}

SteadyState steady_constants(const ProblemSpec& spec) {
    const double lam = spec.lambda, kap = spec.kappa;
    if (!(lam * kap < 0.0)) throw HypothesisViolated("steady state requires lambda * kappa < 0");
    const int n = std::max(spec.tol.grid_n, 8) * 4;
    for (int i = 0; i <= n; ++i)
        if (!(c_value(spec, static_cast<double>(i) / n) > 0.0))
            throw HypothesisViolated("steady state requires C > 0 on [0, 1]");
    const auto rep = root_report(spec);
    if (rep.eta_star) throw HypothesisViolated("rho0 vanishes where lambda u0' > 0");

    const double p = 1.0 / (2.0 * lam);
    const auto br = data_breaks(spec.data);
    auto fm = [&](double a) { return std::pow(c_value(spec, a), -p); };
    auto fn = [&](double a) { return spec.data.u0_prime(a) * std::pow(c_value(spec, a), -1.0 - p); };
    const auto m = integrate(fm, br, 0.1 * spec.tol.quad_abs, 0.1 * spec.tol.quad_rel);
    const auto nn = integrate(fn, br, 0.1 * spec.tol.quad_abs, 0.1 * spec.tol.quad_rel);
    if (!m.converged) throw ToleranceNotMet("steady constant M: tolerance not met", m.value, m.error);
    if (!nn.converged) throw ToleranceNotMet("steady constant N: tolerance not met", nn.value, nn.error);

    SteadyState ss;
    ss.curly_m = m.value;
    ss.curly_n = nn.value;
    const double m2l = std::pow(ss.curly_m, 2.0 * lam);
    const double shift = ss.curly_n / std::pow(ss.curly_m, 1.0 + 2.0 * lam);
    ss.u_inf = [spec, m2l, shift](double a) { return -spec.data.u0_prime(a) / (c_value(spec, a) * m2l) + shift; };
    ss.p_inf = [spec, m2l](double a) { return spec.data.rho0(a) / (c_value(spec, a) * m2l); };
    return ss;
}

}  // namespace hs

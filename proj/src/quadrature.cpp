#include "hs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hs/errors.hpp"
#include "hs/parallel.hpp"

namespace hs {

namespace {

constexpr int kMaxPanels = 20000;
constexpr int kTerminalPanels = 28;

struct Point {
    double p0;  // Q^{-1/(2 lambda)}
    double h;   // (lambda u0' - eta C) Q^{-1-1/(2 lambda)}
};

Point kernel(const ProblemSpec& spec, double alpha, double eta) {
    const double lam = spec.lambda, kap = spec.kappa;
    const double u = spec.data.u0_prime(alpha), r = spec.data.rho0(alpha);
    const double c = lam * (lam * u * u - kap * r * r);
    double q = q_stable(lam, kap, u, r, eta);
    if (q < 0.0) q = 0.0;
    const double p = 1.0 / (2.0 * lam);
    return {std::pow(q, -p), (lam * u - eta * c) * std::pow(q, -1.0 - p)};
}

std::vector<double> singular_points(const RootReport& rep) {
    std::vector<double> s;
    for (double x : rep.alpha_bar) {
        bool in_iv = false;
        for (const auto& iv : rep.alpha_bar_intervals)
            if (x >= iv.lo && x <= iv.hi) in_iv = true;
        if (!in_iv) s.push_back(x);
    }
    return s;
}

void check_eta(const RootReport& rep, double eta) {
    if (!(eta >= 0.0)) throw OutOfRange("eta must be non-negative");
    if (rep.eta_star && eta > *rep.eta_star) throw OutOfRange("eta beyond eta_star");
}

template <class G>
QuadResult integrate_alpha(const ProblemSpec& spec, const RootReport& rep, double lo, double hi, G g,
                           double abs_tol, double rel_tol, std::vector<Panel>* panels = nullptr) {
    const AlphaDomain dom(alpha_breaks(spec, rep), singular_points(rep), lo, hi);
    auto f = [&](double tau) {
        double jac;
        const double a = dom.alpha(tau, jac);
        return jac == 0.0 ? 0.0 : g(a) * jac;
    };
    return integrate(f, dom.tau_points(), abs_tol, rel_tol, kMaxPanels, panels);
}

double require(const QuadResult& r, const char* what) {
    if (!r.converged) throw ToleranceNotMet(std::string(what) + ": tolerance not met", r.value, r.error);
    return r.value;
}

void check_integrable(const ProblemSpec& spec, const RootReport& rep, double eta) {
    if (!rep.eta_star || eta < *rep.eta_star || spec.lambda < 0.0) return;
    const double p = 1.0 / (2.0 * spec.lambda);
    if (p * contact_exponent(spec, rep) >= 1.0)
        throw NonIntegrable("Q^{-1/(2 lambda)} is not integrable at eta_star");
}

double pbar_pow(const ProblemSpec& spec, const RootReport& rep, double eta) {
    return std::pow(pbar0(spec, rep, eta), 2.0 * spec.lambda);
}

double time_panel(const ProblemSpec& spec, const RootReport& rep, double a, double b) {
    if (!(b > a)) return 0.0;
    auto f = [&](double s) { return pbar_pow(spec, rep, s); };
    return require(integrate(f, a, b, spec.tol.quad_abs, spec.tol.quad_rel, kMaxPanels), "time map");
}

std::vector<double> knot_list(const RootReport& rep, double cutoff) {
    std::vector<double> k{0.0};
    if (rep.eta_star) {
        const double es = *rep.eta_star;
        const int kmax = std::max(1, static_cast<int>(std::ceil(std::log2(1.0 / cutoff))));
        for (double f : {0.125, 0.25, 0.375}) k.push_back(f * es);
        for (int j = 1; j <= kmax; ++j) k.push_back(es * (1.0 - std::ldexp(1.0, -j)));
    } else {
        for (int j = -3; j <= 20; ++j) k.push_back(std::ldexp(1.0, j));
    }
    return k;
}

double time_at(const ProblemSpec& spec, const RootReport& rep, const IntegralCache& cache, double eta) {
    const auto& kn = cache.eta_knots;
    const std::size_t i = static_cast<std::size_t>(std::upper_bound(kn.begin(), kn.end(), eta) - kn.begin()) - 1;
    if (eta == kn[i]) return cache.t_vals[i];
    return cache.t_vals[i] + time_panel(spec, rep, kn[i], eta);
}

// integral over u in [0, 1] of (int_0^1 (u^2 Q(alpha, 1/u))^{-1/(2 lambda)} d alpha)^{2 lambda}
double reciprocal_tail(const ProblemSpec& spec, const RootReport& rep) {
    const double lam = spec.lambda, kap = spec.kappa, lk = lam * kap, p = 1.0 / (2.0 * lam);
    auto inner = [&](double u) {
        auto g = [&](double a) {
            const double up = spec.data.u0_prime(a), r = spec.data.rho0(a);
            double w;
            if (lk >= 0.0) {
                const double s = std::sqrt(lk) * std::abs(r);
                w = (u - (lam * up + s)) * (u - (lam * up - s));
            } else {
                const double d = u - lam * up;
                w = d * d - lk * r * r;
            }
            return std::pow(std::max(w, 0.0), -p);
        };
        const double v = require(integrate_alpha(spec, rep, 0.0, 1.0, g, spec.tol.quad_abs, spec.tol.quad_rel),
                                 "steady tail");
        return std::pow(v, 2.0 * lam);
    };
    return require(integrate(inner, 0.0, 1.0, spec.tol.quad_abs, spec.tol.quad_rel, kMaxPanels), "steady tail");
}

}  // namespace

AlphaDomain::AlphaDomain(const std::vector<double>& breaks, const std::vector<double>& singular, double lo,
                         double hi) {
    std::vector<double> pts{lo};
    for (double b : breaks)
        if (b > lo && b < hi) pts.push_back(b);
    pts.push_back(hi);
    auto is_sing = [&](double x) {
        for (double s : singular)
            if (std::abs(x - s) <= 1e-15) return true;
        return false;
    };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        if (!(b > a)) continue;
        const bool sa = is_sing(a), sb = is_sing(b);
        if (sa && sb) {
            const double m = 0.5 * (a + b);
            segs_.push_back({a, m, 1});
            segs_.push_back({m, b, 2});
        } else {
            segs_.push_back({a, b, sa ? 1 : (sb ? 2 : 0)});
        }
    }
}

double AlphaDomain::alpha(double tau, double& jac) const {
    const int k = static_cast<int>(segs_.size());
    int i = static_cast<int>(std::floor(tau));
    i = std::clamp(i, 0, k - 1);
    const double s = std::clamp(tau - i, 0.0, 1.0);
    const auto& g = segs_[i];
    const double w = g.b - g.a;
    switch (g.mode) {
        case 1:
            jac = 2.0 * w * s;
            return g.a + w * s * s;
        case 2: {
            const double r = 1.0 - s;
            jac = 2.0 * w * r;
            return g.b - w * r * r;
        }
        default:
            jac = w;
            return g.a + w * s;
    }
}

std::vector<double> AlphaDomain::tau_points() const {
    std::vector<double> t(segs_.size() + 1);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
    return t;
}

std::vector<double> alpha_breaks(const ProblemSpec& spec, const RootReport& report) {
    std::vector<double> b = data_breaks(spec.data);
    b.insert(b.end(), report.omega_set.begin(), report.omega_set.end());
    b.insert(b.end(), report.alpha_bar.begin(), report.alpha_bar.end());
    std::erase_if(b, [](double x) { return x < 0.0 || x > 1.0; });
    std::sort(b.begin(), b.end());
    std::vector<double> out;
    for (double x : b)
        if (out.empty() || x - out.back() > 1e-14) out.push_back(x);
    return out;
}

QuadResult pbar0_result(const ProblemSpec& spec, const RootReport& report, double eta) {
    check_eta(report, eta);
    if (eta == 0.0) return {1.0, 0.0, true, 1};
    check_integrable(spec, report, eta);
    auto g = [&](double a) { return kernel(spec, a, eta).p0; };
    return integrate_alpha(spec, report, 0.0, 1.0, g, spec.tol.quad_abs, spec.tol.quad_rel);
}

double pbar0(const ProblemSpec& spec, const RootReport& report, double eta) {
    return require(pbar0_result(spec, report, eta), "pbar0");
}

double i2(const ProblemSpec& spec, const RootReport& report, double eta) {
    check_eta(report, eta);
    if (report.eta_star && eta >= *report.eta_star && spec.lambda > 0.0)
        throw NonIntegrable("companion integral diverges at eta_star");
    auto g = [&](double a) { return kernel(spec, a, eta).h; };
    return require(integrate_alpha(spec, report, 0.0, 1.0, g, spec.tol.quad_abs, spec.tol.quad_rel), "i2");
}

double p0_partial(const ProblemSpec& spec, const RootReport& report, double alpha, double eta) {
    check_eta(report, eta);
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw OutOfRange("alpha outside [0, 1]");
    if (alpha == 0.0) return 0.0;
    if (eta == 0.0) return alpha;
    check_integrable(spec, report, eta);
    auto g = [&](double a) { return kernel(spec, a, eta).p0; };
    return require(integrate_alpha(spec, report, 0.0, alpha, g, spec.tol.quad_abs, spec.tol.quad_rel),
                   "p0_partial");
}

double p0_between(const ProblemSpec& spec, const RootReport& report, double a, double b, double eta) {
    check_eta(report, eta);
    if (!(a >= 0.0 && b <= 1.0 && a <= b)) throw OutOfRange("p0_between: need 0 <= a <= b <= 1");
    if (a == b) return 0.0;
    if (eta == 0.0) return b - a;
    check_integrable(spec, report, eta);
    auto g = [&](double x) { return kernel(spec, x, eta).p0; };
    return require(integrate_alpha(spec, report, a, b, g, spec.tol.quad_abs, spec.tol.quad_rel), "p0_between");
}

double nested_moment(const ProblemSpec& spec, const RootReport& report, double eta) {
    check_eta(report, eta);
    check_integrable(spec, report, eta);
    const AlphaDomain dom(alpha_breaks(spec, report), singular_points(report), 0.0, 1.0);
    auto pt = [&](double tau) {
        double jac;
        const double a = dom.alpha(tau, jac);
        if (jac == 0.0) return Point{0.0, 0.0};
        const auto k = kernel(spec, a, eta);
        return Point{k.p0 * jac, k.h * jac};
    };
    auto fp = [&](double tau) { return pt(tau).p0; };
    auto fh = [&](double tau) { return pt(tau).h; };
    std::vector<Panel> pp, ph;
    const auto tp = dom.tau_points();
    const double tol_a = spec.tol.quad_abs, tol_r = spec.tol.quad_rel;
    require(integrate(fp, tp, tol_a, tol_r, kMaxPanels, &pp), "nested moment");
    require(integrate(fh, tp, tol_a, tol_r, kMaxPanels, &ph), "nested moment");
    // Common refinement of both partitions.
    std::vector<double> cuts;
    for (const auto& p : pp) cuts.push_back(p.a);
    for (const auto& p : ph) cuts.push_back(p.a);
    cuts.push_back(tp.back());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double h_acc = 0.0, total = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        const double a = cuts[j], b = cuts[j + 1];
        const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
        // Kronrod nodes of the panel, each carrying H at that node.
        double sum = 0.0;
        for (int m = -7; m <= 7; ++m) {
            const double x = m < 0 ? -gk::xgk[7 + m] : gk::xgk[7 - m];
            const double w = gk::wgk[m < 0 ? 7 + m : 7 - m];
            const double node = c + hw * x;
            const double hin = node > a ? gk15(fh, a, node).value : 0.0;
            sum += w * fp(node) * (h_acc + hin);
        }
        total += sum * hw;
        h_acc += gk15(fh, a, b).value;
    }
    return total;
}

double contact_exponent(const ProblemSpec& spec, const RootReport& report) {
    if (!report.eta_star) return 0.0;
    if (!report.alpha_bar_intervals.empty()) return std::numeric_limits<double>::infinity();
    const double es = *report.eta_star;
    double worst = 0.0;
    for (double x : singular_points(report)) {
        for (int side : {-1, 1}) {
            std::vector<double> lh, lq;
            for (int j = 2; j <= 8; ++j) {
                const double h = 0.05 * std::ldexp(1.0, -j);
                const double a = x + side * h;
                if (a < 0.0 || a > 1.0) break;
                const double q = std::abs(q_value(spec, a, es));
                if (q <= 0.0) continue;
                lh.push_back(std::log(h));
                lq.push_back(std::log(q));
            }
            if (lh.size() >= 3) worst = std::max(worst, fit_line(lh, lq).slope);
        }
    }
    return worst;
}

ProblemSpec with_roundoff_floor(const ProblemSpec& spec, const RootReport& report, double eta) {
    ProblemSpec s = spec;
    if (!report.eta_star || !(eta < *report.eta_star)) return s;
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * *report.eta_star / (*report.eta_star - eta);
    s.tol.quad_rel = std::max(s.tol.quad_rel, floor);
    s.tol.quad_abs = std::max(s.tol.quad_abs, floor * 1e-3);
    return s;
}

IntegralCache build_cache(const ProblemSpec& spec, const RootReport& report, Exec exec) {
    IntegralCache c;
    c.eta_knots = knot_list(report, spec.tol.eta_cutoff);
    const std::size_t n = c.eta_knots.size();
    struct Row {
        double pbar, i2, dt;
    };
    auto rows = parallel_map(exec, n, [&](std::size_t i) {
        const double e = c.eta_knots[i];
        const ProblemSpec s = with_roundoff_floor(spec, report, e);
        const double dt = i == 0 ? 0.0 : time_panel(s, report, c.eta_knots[i - 1], e);
        return Row{pbar0(s, report, e), i2(s, report, e), dt};
    });
    c.pbar_vals.resize(n);
    c.i2_vals.resize(n);
    c.t_vals.resize(n);
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t += rows[i].dt;
        c.pbar_vals[i] = rows[i].pbar;
        c.i2_vals[i] = rows[i].i2;
        c.t_vals[i] = t;
    }
    return c;
}

TimeLimit terminal_time(const ProblemSpec& spec, const RootReport& report, const IntegralCache& cache) {
    TimeLimit tl;
    if (report.eta_star) {
        const double es = *report.eta_star;
        auto knot = [&](int k) { return es * (1.0 - std::ldexp(1.0, -k)); };
        // Panels [knot(k), knot(k+1)]; those inside the cache come for free.
        std::vector<double> panel(kTerminalPanels);
        const double last_cached = cache.eta_knots.back();
        int first_new = 0;
        double sum = 0.0;
        for (int k = 0; k < kTerminalPanels; ++k) {
            if (knot(k + 1) <= last_cached) {
                first_new = k + 1;
                continue;
            }
        }
        sum = time_at(spec, report, cache, knot(first_new));

        auto extra = parallel_map(Exec::OpenMP, static_cast<std::size_t>(kTerminalPanels - first_new),
                                  [&](std::size_t j) {
                                      const int k = first_new + static_cast<int>(j);
                                      return time_panel(with_roundoff_floor(spec, report, knot(k + 1)), report,
                                                        knot(k), knot(k + 1));
                                  });
        for (int k = 0; k < first_new; ++k)
            panel[k] = time_at(spec, report, cache, knot(k + 1)) - time_at(spec, report, cache, knot(k));
        for (std::size_t j = 0; j < extra.size(); ++j) {
            panel[first_new + j] = extra[j];
            sum += extra[j];
        }
        const double i1 = panel[kTerminalPanels - 3], i2v = panel[kTerminalPanels - 2],
                     i3 = panel[kTerminalPanels - 1];
        const double r = std::sqrt((i2v / i1) * (i3 / i2v));
        if (!(r < 0.99) || i3 > i2v) {
            tl.finite = false;
            tl.value = std::numeric_limits<double>::infinity();
            return tl;
        }
        const double tail = i3 * r / (1.0 - r);
        const double total = sum + tail;
        if (tail > 0.01 * total)
            throw TailUncertain("terminal time tail exceeds 1% of the total", sum, sum + 2.0 * tail);
        tl.finite = true;
        tl.value = total;
        tl.error = std::abs(tail) * std::abs(r - i2v / i1) + spec.tol.quad_rel * total;
        return tl;
    }
    // No eta_star: t = t(1) + int_0^1 F(u)^{2 lambda} du with sigma = 1/u.
    const double t1 = time_at(spec, report, cache, 1.0);
    double tail;
    try {
        tail = reciprocal_tail(spec, report);
    } catch (const ToleranceNotMet& e) {
        throw TailUncertain("terminal time tail integral did not converge", t1,
                            std::numeric_limits<double>::infinity());
    }
    const double total = t1 + tail;
    const double t3 = time_at(spec, report, cache, 1e3), t4 = time_at(spec, report, cache, 1e4);
    // Leading tail beyond eta: M^{2 lambda} / eta, where M = int C^{-1/(2 lambda)}.
    auto cm = [&](double a) { return std::pow(std::max(c_value(spec, a), 0.0), -1.0 / (2.0 * spec.lambda)); };
    const auto mq = integrate_alpha(spec, report, 0.0, 1.0, cm, spec.tol.quad_abs, spec.tol.quad_rel);
    const double lead = std::pow(mq.value, 2.0 * spec.lambda) * 1e-4;
    const bool ordered = t3 < t4 && t4 < total;
    const bool tail_ok = mq.converged && std::abs((total - t4) - lead) <= 0.01 * lead + 1e-8;
    if (!ordered || !tail_ok) throw TailUncertain("direct quadrature does not bracket the extrapolated t", t4, total);
    tl.finite = true;
    tl.value = total;
    tl.error = std::abs((total - t4) - lead) + spec.tol.quad_rel * total;
    return tl;
}

Context make_context(const ProblemSpec& spec) {
    if (spec.lambda == 0.0) throw SpecialCase("lambda = 0: representation formulas do not apply");
    Context ctx;
    ctx.spec = spec;
    ctx.report = root_report(spec);
    ctx.breaks = alpha_breaks(spec, ctx.report);
    ctx.cache = build_cache(spec, ctx.report);
    try {
        ctx.t_limit = terminal_time(spec, ctx.report, ctx.cache);
    } catch (const TailUncertain& e) {
        ctx.t_limit.finite = std::isfinite(e.upper);
        ctx.t_limit.value = std::isfinite(e.upper) ? 0.5 * (e.lower + e.upper) : e.upper;
        ctx.t_limit.error = std::isfinite(e.upper) ? 0.5 * (e.upper - e.lower) : e.upper;
        ctx.t_limit.uncertain = true;
    }
    return ctx;
}

double eta_limit(const Context& ctx) {
    if (!ctx.report.eta_star) return std::numeric_limits<double>::infinity();
    return *ctx.report.eta_star * (1.0 - ctx.spec.tol.eta_cutoff);
}

double time_of_eta(const Context& ctx, double eta) {
    check_eta(ctx.report, eta);
    if (ctx.report.eta_star && eta == *ctx.report.eta_star) {
        if (ctx.t_limit.finite) return ctx.t_limit.value;
        return std::numeric_limits<double>::infinity();
    }
    return time_at(ctx.spec, ctx.report, ctx.cache, eta);
}

double eta_of_time(const Context& ctx, double t) {
    if (!(t >= 0.0)) throw OutOfRange("t must be non-negative");
    if (ctx.t_limit.finite && t >= ctx.t_limit.value) throw OutOfRange("t at or beyond the terminal time");
    if (t == 0.0) return 0.0;
    const auto& kn = ctx.cache.eta_knots;
    const auto& tv = ctx.cache.t_vals;
    std::size_t i = static_cast<std::size_t>(std::upper_bound(tv.begin(), tv.end(), t) - tv.begin()) - 1;
    double lo = kn[i], hi;
    if (i + 1 < kn.size()) {
        hi = kn[i + 1];
    } else if (ctx.report.eta_star) {
        throw BlowupProximity("t lies within the blow-up cutoff of the terminal time");
    } else {
        hi = 2.0 * lo;
        while (time_at(ctx.spec, ctx.report, ctx.cache, hi) < t) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300) throw OutOfRange("t not reached by the time map");
        }
    }
    const double base_eta = kn[i], base_t = tv[i];
    auto F = [&](double e) { return base_t + time_panel(ctx.spec, ctx.report, base_eta, e) - t; };
    double x = 0.5 * (lo + hi);
    const double ttol = 1e-12 * std::max(1.0, t);
    for (int it = 0; it < 100; ++it) {
        const double fx = F(x);
        if (std::abs(fx) <= ttol) return x;
        if (fx > 0)
            hi = x;
        else
            lo = x;
        if (hi - lo <= ctx.spec.tol.root_tol * std::max(1.0, x)) return x;
        const double d = pbar_pow(ctx.spec, ctx.report, x);
        double nx = x - fx / d;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        x = nx;
    }
    return x;
}

}  // namespace hs

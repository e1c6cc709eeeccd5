#include "hs/classifier.hpp"

#include <cmath>
#include <limits>

#include "hs/errors.hpp"

namespace hs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TimeLimit infinite() { return {false, kInf, 0.0, false}; }

bool rho_identically_zero(const RootReport& rep) {
    for (const auto& iv : rep.rho0_zero_intervals)
        if (iv.lo <= 1e-12 && iv.hi >= 1.0 - 1e-12) return true;
    return false;
}

RhoFate blowup_sign(const ProblemSpec& spec, const RootReport& rep) {
    double r = 0.0;
    for (double a : rep.alpha_bar) {
        const double v = spec.data.rho0(a);
        if (std::abs(v) > std::abs(r)) r = v;
    }
    return r >= 0.0 ? RhoFate::BlowsUpPlus : RhoFate::BlowsUpMinus;
}

void fill_exponents(const ProblemSpec& spec, RegimeVerdict& v) {
    if (!v.eta_star && v.regime != Regime::SteadyStateFiniteTime) return;
    const auto rt = predicted_rates(spec, v);
    if (rt.pbar0_exp) v.predicted_exponents["pbar0"] = *rt.pbar0_exp;
    if (rt.i2_exp) v.predicted_exponents["i2"] = *rt.i2_exp;
    v.predicted_exponents["ux_at_abar"] = rt.ux_at_abar_exp;
}

// Double-root branches, shared by lambda*kappa > 0 and rho0 == 0 data.
void double_branch(double lam, RegimeVerdict& v) {
    if (lam < 0.0) {
        v.theorem_tag = "Cor C.1(1)";
        v.regime = lam > -2.0 ? Regime::OneSidedBlowup : Regime::TwoSidedEverywhereBlowup;
        v.rho_fate = v.rho_fate_elsewhere = RhoFate::Bounded;
        return;
    }
    v.theorem_tag = "Cor C.2(1)";
    v.rho_fate = RhoFate::IdenticallyZeroAtPoints;
    if (lam < 1.0) {
        v.regime = Regime::GlobalDecay;
        v.rho_fate_elsewhere = RhoFate::VanishesAtTstar;
    } else if (lam == 1.0) {
        v.regime = Regime::GlobalNontrivialSteady;
        v.rho_fate_elsewhere = RhoFate::VanishesAtTstar;
    } else {
        v.regime = Regime::InvertedTwoSided;
        v.rho_fate_elsewhere = lam <= 2.0 ? RhoFate::VanishesAtTstar : RhoFate::ConvergesNontrivial;
    }
}

double fit_residual_limit() { return 0.05; }

struct Measured {
    double exp;
    bool log;
};

// Exponent of V ~ delta^a from differences of consecutive values on a
// halving delta sequence. Differencing removes additive constants. When the
// local slopes still drift geometrically (a subleading power), the last
// ones are Aitken-extrapolated. A positive exponent is reported only when
// the value itself vanishes; otherwise the quantity converges to a nonzero
// limit and its exponent is 0.
Measured measure(const std::vector<double>& delta, const std::vector<double>& v, const char* what) {
    std::vector<double> lx, ly;
    double scale = 0.0, dmax = 0.0;
    int sign_changes = 0;
    double prev = 0.0;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double d = v[k + 1] - v[k];
        scale = std::max(scale, std::abs(v[k]));
        dmax = std::max(dmax, std::abs(d));
        if (k > 0 && (d > 0) != (prev > 0)) ++sign_changes;
        prev = d;
        if (d != 0.0) {
            lx.push_back(std::log(delta[k]));
            ly.push_back(std::log(std::abs(d)));
        }
    }
    scale = std::max(scale, 1.0);
    // Differences at rounding level: the quantity is constant.
    if (dmax <= 1e-9 * scale || lx.size() < 3) return {0.0, false};
    const auto fit = fit_line(lx, ly);
    // Shrinking but ragged differences: converged to rounding level.
    if (fit.slope > 0.05 && fit.rms > fit_residual_limit()) return {0.0, false};
    if (fit.rms > fit_residual_limit()) throw FitUnstable(std::string("rate fit for ") + what + " is unstable", fit.rms);

    double a = fit.slope;
    const std::size_t n = lx.size();
    if (n >= 5 && sign_changes == 0) {
        std::vector<double> s;
        for (std::size_t k = n - 4; k + 1 < n; ++k) s.push_back((ly[k + 1] - ly[k]) / (lx[k + 1] - lx[k]));
        const double d1 = s[1] - s[0], d2 = s[2] - s[1];
        const double r = d1 != 0.0 ? d2 / d1 : 0.0;
        if (r > 0.0 && r < 0.95 && std::abs(d2) > 1e-4) {
            const double ext = s[2] + d2 * r / (1.0 - r);
            if (std::abs(ext - a) < 0.3) a = ext;
        } else {
            a = s[2];
            if (std::abs(a - fit.slope) > 0.3) a = fit.slope;
        }
    }
    if (a > 0.05) {
        // Converging: report the power only if the values head to zero.
        const double first = std::abs(v.front()), last = std::abs(v.back());
        const double expected_drop = std::exp(a * (std::log(delta.back()) - std::log(delta.front())));
        if (first > 0.0 && last / first < 4.0 * expected_drop && last < 0.5 * first) return {a, false};
        return {0.0, false};
    }
    if (std::abs(a) <= 0.05 && sign_changes == 0) return {0.0, true};
    return {a, false};
}

}  // namespace

const char* to_string(Regime r) {
    switch (r) {
        case Regime::SteadyStateFiniteTime: return "SteadyStateFiniteTime";
        case Regime::GlobalDecay: return "GlobalDecay";
        case Regime::GlobalNontrivialSteady: return "GlobalNontrivialSteady";
        case Regime::OneSidedBlowup: return "OneSidedBlowup";
        case Regime::TwoSidedEverywhereBlowup: return "TwoSidedEverywhereBlowup";
        case Regime::InvertedTwoSided: return "InvertedTwoSided";
        case Regime::RhoBlowup: return "RhoBlowup";
        case Regime::Trivial: return "Trivial";
        case Regime::GiPJReduction: return "GiPJReduction";
        case Regime::SpecialLambdaZero: return "SpecialLambdaZero";
        default: return "Unclassified";
    }
}

const char* to_string(RhoFate f) {
    switch (f) {
        case RhoFate::Bounded: return "Bounded";
        case RhoFate::BlowsUpPlus: return "BlowsUpPlus";
        case RhoFate::BlowsUpMinus: return "BlowsUpMinus";
        case RhoFate::VanishesAtTstar: return "VanishesAtTstar";
        case RhoFate::ConvergesNontrivial: return "ConvergesNontrivial";
        default: return "IdenticallyZeroAtPoints";
    }
}

RegimeVerdict classify(const ProblemSpec& spec) {
    RegimeVerdict v;
    const double lam = spec.lambda, kap = spec.kappa;
    if (lam == 0.0) {
        v.regime = Regime::SpecialLambdaZero;
        v.theorem_tag = "App A.4";
        v.t_limit = infinite();
        v.explanation = "lambda = 0: solutions persist globally in time";
        return v;
    }
    const bool c_zero = max_abs_c(spec) <= spec.tol.root_tol;
    if (kap == 0.0) {
        v.t_limit = infinite();
        if (c_zero) {
            v.regime = Regime::Trivial;
            v.theorem_tag = "App A.2";
            v.explanation = "kappa = 0 and C == 0: u0' == 0 and (u_x, rho) = (0, rho0) for all time";
        } else {
            v.regime = Regime::GiPJReduction;
            v.theorem_tag = "App A.1";
            v.explanation = "kappa = 0: the first equation decouples into the giPJ equation";
        }
        return v;
    }
    if (c_zero) {
        v.theorem_tag = "App A.3";
        v.t_limit = infinite();
        if (lam * kap > 0.0) {
            v.regime = Regime::GiPJReduction;
            v.explanation = "C == 0 with lambda*kappa > 0: u0'^2 = (kappa/lambda) rho0^2, giPJ-type formulas";
        } else {
            v.regime = Regime::Trivial;
            v.explanation = "C == 0 with lambda*kappa < 0 forces the trivial solution";
        }
        return v;
    }
    try {
        return classify(make_context(spec));
    } catch (const OmegaOverflow& e) {
        v.regime = Regime::Unclassified;
        v.theorem_tag = "HypothesisGap";
        v.explanation = e.what();
        return v;
    }
}

RegimeVerdict classify(const Context& ctx) {
    const auto& spec = ctx.spec;
    const auto& rep = ctx.report;
    const double lam = spec.lambda, kap = spec.kappa;
    RegimeVerdict v;
    v.t_limit = ctx.t_limit;
    v.eta_star = rep.eta_star;
    v.multiplicity = rep.multiplicity;
    v.blowup_locations = rep.alpha_bar;

    if (rep.rho0_zeros.size() > 64) {
        v.theorem_tag = "HypothesisGap";
        v.explanation = "rho0 has more than 64 isolated zeros";
        return v;
    }

    if (rho_identically_zero(rep) && rep.eta_star) {
        double_branch(lam, v);
        v.explanation = "rho0 == 0: double-root (giPJ) behaviour";
        fill_exponents(spec, v);
        return v;
    }

    if (lam * kap < 0.0) {
        if (!rep.eta_star) {
            v.regime = Regime::SteadyStateFiniteTime;
            v.theorem_tag = "Thm 4.1";
            v.rho_fate = v.rho_fate_elsewhere = RhoFate::ConvergesNontrivial;
            v.explanation = rep.rho0_zeros.empty() && rep.rho0_zero_intervals.empty()
                                ? "rho0 never vanishes: convergence to a steady state in finite time"
                                : "lambda u0' <= 0 at every zero of rho0: convergence to a steady state in finite time";
            try {
                const auto ss = steady_constants(spec);
                v.curly_m = ss.curly_m;
                v.curly_n = ss.curly_n;
            } catch (const HypothesisViolated& e) {
                v.explanation += std::string("; steady constants unavailable: ") + e.what();
            }
            fill_exponents(spec, v);
            return v;
        }
        v.explanation = "rho0 vanishes where lambda u0' > 0";
        v.rho_fate = RhoFate::Bounded;
        v.rho_fate_elsewhere = RhoFate::Bounded;
        if (lam < 0.0) {
            if (lam > -2.0) {
                v.regime = Regime::OneSidedBlowup;
                v.theorem_tag = "Thm 4.2(1)";
            } else {
                v.regime = Regime::TwoSidedEverywhereBlowup;
                v.theorem_tag = "Thm 4.2(2)";
            }
        } else if (lam > 1.0) {
            v.regime = Regime::InvertedTwoSided;
            v.theorem_tag = "Thm 4.2(3)";
            v.rho_fate = RhoFate::IdenticallyZeroAtPoints;
            v.rho_fate_elsewhere = lam < 2.0 ? RhoFate::VanishesAtTstar : RhoFate::ConvergesNontrivial;
        } else {
            v.regime = lam < 1.0 ? Regime::GlobalDecay : Regime::GlobalNontrivialSteady;
            v.theorem_tag = "Thm 4.2(4)";
            v.rho_fate = RhoFate::IdenticallyZeroAtPoints;
            v.rho_fate_elsewhere = RhoFate::VanishesAtTstar;
        }
        fill_exponents(spec, v);
        return v;
    }

    // lambda * kappa > 0
    if (!rep.eta_star) {
        v.theorem_tag = "HypothesisGap";
        v.explanation = "lambda*kappa > 0 but Q has no positive root";
        return v;
    }
    if (rep.multiplicity == Multiplicity::Double) {
        double_branch(lam, v);
        v.explanation = "earliest root of Q has double multiplicity";
        fill_exponents(spec, v);
        return v;
    }
    v.explanation = "earliest root of Q is simple";
    v.rho_fate = blowup_sign(spec, rep);
    if (lam < 0.0) {
        v.theorem_tag = "Thm 4.3(1-2)";
        v.regime = lam > -1.0 ? Regime::OneSidedBlowup : Regime::TwoSidedEverywhereBlowup;
        v.rho_fate_elsewhere = RhoFate::Bounded;
    } else {
        v.theorem_tag = "Thm 4.4";
        v.regime = Regime::InvertedTwoSided;
        v.rho_fate_elsewhere = lam <= 1.0 ? RhoFate::VanishesAtTstar : RhoFate::ConvergesNontrivial;
    }
    fill_exponents(spec, v);
    return v;
}

RateTable predicted_rates(const ProblemSpec& spec, const RegimeVerdict& verdict) {
    RateTable rt;
    const double lam = spec.lambda;
    if (verdict.regime == Regime::SteadyStateFiniteTime) {
        rt.large_eta = true;
        rt.pbar0_exp = -1.0 / lam;
        rt.i2_exp = -1.0 - 1.0 / lam;
        rt.ux_at_abar_exp = 0.0;
        return rt;
    }
    if (!verdict.eta_star) return rt;
    const auto rep = root_report(spec);
    if (!rep.alpha_bar_intervals.empty()) {
        double covered = 0.0;
        for (const auto& iv : rep.alpha_bar_intervals) covered += iv.hi - iv.lo;
        if (covered < 1.0 - 1e-9) return rt;
        // Q vanishes everywhere at once: the data is spatially uniform, so
        // Q = Q_eta (eta - eta*) exactly up to second order and u_x stays 0.
        rt.pbar0_exp = -0.5 / lam;
        rt.i2_exp = -1.0 - 0.5 / lam;
        rt.ux_at_abar_exp = 0.0;
        return rt;
    }
    if (verdict.multiplicity == Multiplicity::Single) {
        if (lam > 0.0) {
            if (lam < 1.0) {
                rt.pbar0_exp = 0.5 - 0.5 / lam;
                rt.ux_at_abar_exp = -lam;
            } else if (lam == 1.0) {
                rt.pbar0_exp = 0.0;
                rt.pbar0_log = 1;
                rt.ux_at_abar_exp = -1.0;
                rt.ux_log = -2;
            } else {
                rt.pbar0_exp = 0.0;
                rt.ux_at_abar_exp = -1.0;
            }
            rt.i2_exp = -0.5 * (1.0 + 1.0 / lam);
        } else {
            rt.pbar0_exp = 0.0;
            if (lam > -1.0) {
                rt.i2_exp = 0.0;
            } else if (lam == -1.0) {
                rt.i2_exp = 0.0;
                rt.i2_log = 1;
            } else {
                rt.i2_exp = -0.5 * (1.0 + 1.0 / lam);
            }
            rt.ux_at_abar_exp = -1.0;
        }
    } else {
        if (lam > 0.0) {
            if (lam < 2.0) {
                rt.pbar0_exp = 0.5 - 1.0 / lam;
                rt.ux_at_abar_exp = 1.0 - lam;
            } else if (lam == 2.0) {
                rt.pbar0_exp = 0.0;
                rt.pbar0_log = 1;
                rt.ux_at_abar_exp = -1.0;
                rt.ux_log = -4;
            } else {
                rt.pbar0_exp = 0.0;
                rt.ux_at_abar_exp = -1.0;
            }
            rt.i2_exp = -0.5 - 1.0 / lam;
        } else {
            rt.pbar0_exp = 0.0;
            if (lam > -2.0) {
                rt.i2_exp = 0.0;
            } else if (lam == -2.0) {
                rt.i2_exp = 0.0;
                rt.i2_log = 1;
            } else {
                rt.i2_exp = -0.5 - 1.0 / lam;
            }
            rt.ux_at_abar_exp = -1.0;
        }
    }
    rt.log_flag = rt.pbar0_log > 0 || rt.i2_log > 0;
    return rt;
}

RateTable fit_rates(const Context& ctx, const RegimeVerdict& verdict) {
    RateTable out;
    const auto pred = predicted_rates(ctx.spec, verdict);
    ProblemSpec spec = ctx.spec;
    spec.tol.quad_abs = std::min(spec.tol.quad_abs, 1e-13);
    spec.tol.quad_rel = std::min(spec.tol.quad_rel, 1e-12);
    const auto& rep = ctx.report;

    if (!rep.eta_star) {
        // Large-eta regime: log-log slopes over eta in [1e2, 1e4].
        out.large_eta = true;
        // P0bar decays like eta^(-1/lambda); only a relative target makes sense.
        spec.tol.quad_abs = std::numeric_limits<double>::min();
        std::vector<double> le, lp, li, ux;
        const double alpha0 = 0.0;
        for (int j = 0; j <= 8; ++j) {
            const double eta = std::pow(10.0, 2.0 + 0.25 * j);
            const double pb = pbar0(spec, rep, eta), iv = i2(spec, rep, eta);
            le.push_back(std::log(eta));
            lp.push_back(std::log(pb));
            li.push_back(std::log(std::abs(iv)));
            const EtaState st{eta, 0.0, pb, iv};
            ux.push_back(sample_at(ctx, st, alpha0).ux);
        }
        const auto fp = fit_line(le, lp), fi = fit_line(le, li);
        if (fp.rms > fit_residual_limit()) throw FitUnstable("large-eta fit for pbar0 is unstable", fp.rms);
        if (fi.rms > fit_residual_limit()) throw FitUnstable("large-eta fit for i2 is unstable", fi.rms);
        out.pbar0_exp = fp.slope;
        out.i2_exp = fi.slope;
        // u_x converges when successive differences decay.
        std::vector<double> inv;
        for (double l : le) inv.push_back(std::exp(-l));
        out.ux_at_abar_exp = measure(inv, ux, "u_x").exp;
        return out;
    }

    const double es = *rep.eta_star;
    spec.tol.eta_cutoff = 1e-9;
    double abar;
    if (!rep.alpha_bar_intervals.empty())
        abar = 0.5 * (rep.alpha_bar_intervals[0].lo + rep.alpha_bar_intervals[0].hi);
    else
        abar = rep.alpha_bar.front();

    std::vector<double> delta, vp, vi, vu;
    for (int k = 8; k <= 20; ++k) {
        const double d = es * std::ldexp(1.0, -k);
        const double eta = es - d;
        const ProblemSpec sk = with_roundoff_floor(spec, rep, eta);
        double pb, iv;
        try {
            pb = pbar0(sk, rep, eta);
            iv = i2(sk, rep, eta);
        } catch (const ToleranceNotMet&) {
            // Keep the shallower levels when enough of them are available.
            if (delta.size() >= 7) break;
            throw;
        }
        const EtaState st{eta, 0.0, pb, iv};
        const double u = sample_at(ctx, st, abar).ux;
        const double lg = std::log(es / d);
        delta.push_back(d);
        vp.push_back(pred.pbar0_log > 0 ? pb : pb / std::pow(lg, pred.pbar0_log));
        vi.push_back(pred.i2_log > 0 ? iv : iv / std::pow(lg, pred.i2_log));
        vu.push_back(u / std::pow(lg, pred.ux_log));
    }
    const auto mp = measure(delta, vp, "pbar0");
    const auto mi = measure(delta, vi, "i2");
    const auto mu = measure(delta, vu, "u_x");
    out.pbar0_exp = mp.exp;
    out.i2_exp = mi.exp;
    out.ux_at_abar_exp = mu.exp;
    out.pbar0_log = mp.log ? 1 : 0;
    out.i2_log = mi.log ? 1 : 0;
    out.ux_log = pred.ux_log;
    out.log_flag = mp.log || mi.log;
    return out;
}

bool rates_agree(const RateTable& p, const RateTable& m, double tol) {
    if (p.pbar0_exp && m.pbar0_exp && std::abs(*p.pbar0_exp - *m.pbar0_exp) > tol) return false;
    if (p.i2_exp && m.i2_exp && std::abs(*p.i2_exp - *m.i2_exp) > tol) return false;
    if (std::abs(p.ux_at_abar_exp - m.ux_at_abar_exp) > tol) return false;
    return p.log_flag == m.log_flag;
}

}  // namespace hs

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hs/classifier.hpp"
#include "hs/cli.hpp"
#include "hs/errors.hpp"
#include "hs/evaluator.hpp"
#include "hs/numerics.hpp"
#include "hs/oracle.hpp"
#include "hs/quadratic.hpp"
#include "hs/quadrature.hpp"

using namespace hs;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs > budget_s) {
        o.pass = false;
        o.detail += " [over time budget]";
    }
    failures += !o.pass;
    std::printf("[%s] criterion %d: %s (%.2fs / %.0fs) %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, budget_s,
                o.detail.c_str());
    std::fflush(stdout);
}

// Runs golden checks, keeping those accepted by `keep`, and reports failures.
Outcome golden(int example, const std::function<bool(const std::string&)>& keep) {
    const auto ctx = make_context(example_spec(example));
    Outcome o{true, ""};
    int n = 0;
    for (const auto& c : golden_checks(example, ctx)) {
        if (!keep(c.name)) continue;
        ++n;
        if (!c.pass) {
            o.pass = false;
            char buf[256];
            std::snprintf(buf, sizeof buf, " %s=%.10g (expected %.10g +/- %.2g);", c.name.c_str(), c.value,
                          c.expected, c.tolerance);
            o.detail += buf;
        }
    }
    if (o.pass) o.detail = std::to_string(n) + " checks";
    return o;
}

bool near(const std::optional<double>& a, double b, double tol) { return a && std::abs(*a - b) <= tol; }

bool same_set(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

Outcome taxonomy() {
    Outcome o{true, ""};
    auto check = [&](const char* name, bool ok) {
        if (!ok) {
            o.pass = false;
            o.detail += std::string(" ") + name + ";";
        }
    };
    const double tol = 1e-9;
    {
        const ProblemSpec s{1.0, 1.0, make_builtin("cos2pi", {1.0}), {}};
        const auto r = root_report(s);
        check("ex1.omega", same_set(r.omega_set, {0.0, 0.5, 1.0}, tol));
        check("ex1.M", near(r.M, 2.0, tol));
        check("ex1.N", !r.N);
        check("ex1.eta_star", near(r.eta_star, 0.5, tol));
        check("ex1.alpha_bar", same_set(r.alpha_bar, {0.0, 1.0}, tol));
        check("ex1.single", r.multiplicity == Multiplicity::Single);
    }
    {
        const ProblemSpec s{1.0, 1.0, make_builtin("cos2pi", {0.5}), {}};
        const auto r = root_report(s);
        check("ex2.omega", same_set(r.omega_set, {1.0 / 6, 1.0 / 3, 2.0 / 3, 5.0 / 6}, tol));
        check("ex2.M", near(r.M, 1.0, tol));
        check("ex2.N", near(r.N, 1.5, tol));
        check("ex2.eta_star", near(r.eta_star, 2.0 / 3, tol));
        check("ex2.alpha_bar", same_set(r.alpha_bar, {0.0, 1.0}, tol));
        check("ex2.single", r.multiplicity == Multiplicity::Single);
    }
    if (o.pass) o.detail = "Omega, M, N, eta*, alpha_bar for both examples";
    return o;
}

Outcome rate_suite() {
    struct Family {
        const char* name;
        std::vector<double> params;
    };
    const std::vector<Family> families = {{"cos2pi", {1.0}}, {"cos2pi", {0.5}}, {"cos2pi", {0.0}}, {"const", {1.0}}};
    const std::vector<double> lambdas = {-3, -1.5, -1, -0.5, -0.25, 0.25, 0.5, 1, 1.5, 3};
    struct Cell {
        Family f;
        double lambda, kappa;
    };
    std::vector<Cell> cells;
    for (const auto& f : families)
        for (double l : lambdas)
            for (double k : {-1.0, 1.0}) cells.push_back({f, l, k});
    // Logarithmic double-root case.
    for (double k : {-1.0, 1.0}) cells.push_back({{"cos2pi", {0.0}}, 2.0, k});

    Outcome o{true, ""};
    int checked = 0, logs_single = 0, logs_double = 0;
    for (const auto& c : cells) {
        const ProblemSpec s{c.lambda, c.kappa, make_builtin(c.f.name, c.f.params), {}};
        const auto ctx = make_context(s);
        const auto v = classify(ctx);
        const auto pred = predicted_rates(s, v);
        char tag[96];
        std::snprintf(tag, sizeof tag, " %s[%g] (%g,%g)", c.f.name, c.f.params[0], c.lambda, c.kappa);
        if (v.regime == Regime::Unclassified) {
            o.pass = false;
            o.detail += std::string(tag) + " unclassified;";
            continue;
        }
        RateTable meas;
        try {
            meas = fit_rates(ctx, v);
        } catch (const FitUnstable& e) {
            o.pass = false;
            o.detail += std::string(tag) + " fit unstable;";
            continue;
        }
        ++checked;
        if (!rates_agree(pred, meas)) {
            o.pass = false;
            o.detail += std::string(tag) + " disagree;";
        }
        if (pred.log_flag && meas.log_flag) {
            if (v.multiplicity == Multiplicity::Single && c.lambda == 1.0) ++logs_single;
            if (v.multiplicity == Multiplicity::Double && c.lambda == 2.0) ++logs_double;
        }
    }
    if (logs_single == 0 || logs_double == 0) {
        o.pass = false;
        o.detail += " log cases not detected;";
    }
    o.detail = std::to_string(checked) + " cells, log single/double " + std::to_string(logs_single) + "/" +
               std::to_string(logs_double) + o.detail;
    return o;
}

ProblemSpec piecewise_spec() { return {1.0, 1.0, make_builtin("piecewise_c2", {}), {}}; }

Outcome properties() {
    std::vector<std::pair<std::string, ProblemSpec>> specs;
    for (int id = 1; id <= 4; ++id) specs.push_back({"example " + std::to_string(id), example_spec(id)});
    specs.push_back({"piecewise", piecewise_spec()});

    std::mt19937_64 rng(20240611);
    Outcome o{true, ""};
    double worst_mean = 0, worst_ux = 0, worst_rho = 0, worst_trip = 0;
    for (const auto& [name, spec] : specs) {
        const auto ctx = make_context(spec);
        const double top = ctx.report.eta_star ? 0.9 * *ctx.report.eta_star : 10.0;
        std::uniform_real_distribution<double> dist(0.0, top);
        std::vector<double> etas(20);
        for (auto& e : etas) e = dist(rng);
        std::sort(etas.begin(), etas.end());

        auto fail = [&](const std::string& what) {
            o.pass = false;
            o.detail += " " + name + ": " + what + ";";
        };
        double prev_t = -1.0;
        for (double eta : etas) {
            const auto st = eta_state(ctx, eta);
            auto f_jac = [&](double a) { return sample_at(ctx, st, a).jac; };
            auto f_flux = [&](double a) {
                const auto s = sample_at(ctx, st, a);
                return s.ux * s.jac;
            };
            const double mean = integrate(f_jac, ctx.breaks, 1e-12, 1e-11).value;
            const double flux = integrate(f_flux, ctx.breaks, 1e-12, 1e-11).value;
            worst_mean = std::max(worst_mean, std::abs(mean - 1.0));
            worst_ux = std::max(worst_ux, std::abs(flux));
            if (std::abs(mean - 1.0) > 1e-8) fail("mean jacobian");
            if (std::abs(flux) > 1e-8) fail("mean u_x");

            for (int i = 0; i <= 64; ++i) {
                const double a = i / 64.0;
                const auto s = sample_at(ctx, st, a);
                const double r0 = spec.data.rho0(a);
                const double law = r0 * std::pow(s.jac, 2.0 * spec.lambda);
                const double err = std::abs(s.rho - law) / std::max(1.0, std::abs(law));
                worst_rho = std::max(worst_rho, err);
                if (err > 1e-8) fail("rho transport");
                const int sg = (s.rho > 0) - (s.rho < 0), sg0 = (r0 > 0) - (r0 < 0);
                if (sg != sg0) fail("sign transport");
            }

            if (!(st.t > prev_t)) fail("t(eta) not increasing");
            prev_t = st.t;
            const double back = eta_of_time(ctx, st.t);
            const double trip = std::abs(back - eta) / std::max(1.0, eta);
            worst_trip = std::max(worst_trip, trip);
            if (trip > 1e-8) fail("eta round trip");
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "worst |mean jac-1| %.2e, |mean u_x| %.2e, rho law %.2e, round trip %.2e",
                  worst_mean, worst_ux, worst_rho, worst_trip);
    o.detail = buf + o.detail;
    return o;
}

Outcome oracle_case(int id) {
    ProblemSpec spec = example_spec(id);
    spec.tol.quad_abs = 1e-12;
    spec.tol.quad_rel = 1e-11;
    const auto ctx = make_context(spec);
    const double t = 0.5 * ctx.t_limit.value;
    const auto d256 = oracle_discrepancy(ctx, t, 256);
    const auto d512 = oracle_discrepancy(ctx, t, 512);
    const double ratio = d256.sup() / std::max(d512.sup(), 1e-300);
    char buf[160];
    std::snprintf(buf, sizeof buf, "t=%.6g n=256 %.3e, n=512 %.3e, ratio %.1f", t, d256.sup(), d512.sup(), ratio);
    return {d256.sup() <= 1e-3 && ratio >= 4.0, buf};
}

Outcome exhaustiveness() {
    Outcome o{true, ""};
    auto expect = [&](const std::string& name, const ProblemSpec& s, Regime regime, const std::string& tag,
                      std::function<bool(const RegimeVerdict&)> extra = {}) {
        const auto v = classify(s);
        const bool ok = v.regime == regime && v.theorem_tag == tag && (!extra || extra(v));
        if (!ok) {
            o.pass = false;
            o.detail += " " + name + " -> " + to_string(v.regime) + " [" + v.theorem_tag + "];";
        }
    };
    expect("example 1", example_spec(1), Regime::OneSidedBlowup, "Thm 4.3(1-2)");
    expect("example 2", example_spec(2), Regime::OneSidedBlowup, "Thm 4.2(1)");
    expect("example 3", example_spec(3), Regime::InvertedTwoSided, "Thm 4.4");
    expect("example 4", example_spec(4), Regime::SteadyStateFiniteTime, "Thm 4.1");
    expect("piecewise", piecewise_spec(), Regime::GlobalNontrivialSteady, "Cor C.2(1)", [](const RegimeVerdict& v) {
        return v.multiplicity == Multiplicity::Double && v.eta_star && std::abs(*v.eta_star - 1.0) <= 1e-9;
    });
    expect("lambda=0", {0.0, 1.0, make_builtin("cos2pi", {1.0}), {}}, Regime::SpecialLambdaZero, "App A.4");
    expect("kappa=0", {1.0, 0.0, make_builtin("cos2pi", {1.0}), {}}, Regime::GiPJReduction, "App A.1");
    expect("kappa=0, C=0", {1.0, 0.0, make_builtin("const", {1.0}), {}}, Regime::Trivial, "App A.2");
    expect("C=0, lambda*kappa<0", {1.0, -1.0, make_builtin("const", {0.0}), {}}, Regime::Trivial, "App A.3");
    expect("C=0, lambda*kappa>0", {1.0, 1.0, make_builtin("const", {0.0}), {}}, Regime::GiPJReduction, "App A.3");
    if (o.pass) o.detail = "10 specs";
    return o;
}

}  // namespace

int main() {
    run(1, "example 1 golden values", 10, [] { return golden(1, [](const std::string&) { return true; }); });
    run(2, "example 4 golden values", 30, [] { return golden(4, [](const std::string&) { return true; }); });
    run(3, "examples 2-3 terminal times", 60, [] {
        auto a = golden(2, [](const std::string& n) { return n == "t_star_reported"; });
        auto b = golden(3, [](const std::string& n) { return n == "t_star_reported"; });
        return Outcome{a.pass && b.pass, "example 2:" + a.detail + " example 3:" + b.detail};
    });
    run(4, "root taxonomy examples", 10, taxonomy);
    run(5, "rate exponent suite", 300, rate_suite);
    run(6, "property suite", 300, properties);
    for (int id = 1; id <= 3; ++id) {
        const std::string title = "oracle equivalence, example " + std::to_string(id);
        run(7, title.c_str(), 180, [id] { return oracle_case(id); });
    }
    run(8, "classifier exhaustiveness", 60, exhaustiveness);
    std::printf("%d criterion line(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}

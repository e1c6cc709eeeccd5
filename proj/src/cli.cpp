#include "hs/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>

#include "hs/classifier.hpp"
#include "hs/errors.hpp"
#include "hs/evaluator.hpp"
#include "hs/io.hpp"
#include "hs/oracle.hpp"

namespace hs {

namespace fs = std::filesystem;

ProblemSpec example_spec(int id) {
    ProblemSpec s;
    switch (id) {
        case 1:
            s.lambda = -0.5;
            s.kappa = -1.0;
            s.data = make_builtin("cos2pi", {0.5});
            break;
        case 2:
            s.lambda = -1.0;
            s.kappa = 1.0;
            s.data = make_builtin("sin2pi", {});
            break;
        case 3:
            s.lambda = 1.0;
            s.kappa = 1.0;
            s.data = make_builtin("cos2pi", {1.0});
            break;
        case 4:
            s.lambda = -0.5;
            s.kappa = 1.0;
            s.data = make_builtin("affine", {}, BcMode::Dirichlet);
            break;
        default:
            throw ValidationError("example id must be 1, 2, 3 or 4");
    }
    return s;
}

namespace {

GoldenCheck check_abs(std::string name, double value, double expected, double tol) {
    return {std::move(name), std::abs(value - expected) <= tol, value, expected, tol};
}

// Worst error of `err` over a sample set, reported against zero.
GoldenCheck check_max(std::string name, double worst, double tol) {
    return {std::move(name), worst <= tol, worst, 0.0, tol};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<GoldenCheck> golden_example1(const Context& ctx) {
    std::vector<GoldenCheck> out;
    const double es = 2.0 * std::numbers::sqrt2 / (1.0 + std::numbers::sqrt2);
    out.push_back(check_abs("eta_star", ctx.report.eta_star.value_or(NAN), es, 1e-9));
    // eta(t) = t here, so t* = eta*.
    out.push_back(check_abs("t_star", ctx.t_limit.value, es, 1e-6));
    out.push_back(check_abs("t_star_reported", ctx.t_limit.value, 1.17, 0.01));
    double wp = 0.0, wi = 0.0;
    for (int k = 1; k <= 11; ++k) {
        const double eta = 0.1 * k;
        wp = std::max(wp, std::abs(pbar0(ctx.spec, ctx.report, eta) - 1.0));
        wi = std::max(wi, std::abs(i2(ctx.spec, ctx.report, eta)));
    }
    out.push_back(check_max("pbar0_identically_one", wp, 1e-8));
    out.push_back(check_max("i2_identically_zero", wi, 1e-8));
    std::vector<double> alphas(64);
    for (int i = 0; i < 64; ++i) alphas[i] = (i + 0.5) / 64.0;
    double wu = 0.0, wr = 0.0, weta = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const double t = 0.11 * k;
        const double eta = eta_of_time(ctx, t);
        weta = std::max(weta, std::abs(eta - t));
        for (const auto& s : evaluate_grid(ctx, eta, alphas, false)) {
            const double c1 = std::cos(2.0 * std::numbers::pi * s.alpha), c2 = std::cos(4.0 * std::numbers::pi * s.alpha);
            const double den = 8.0 + 8.0 * t * c1 + t * t * c2;
            wu = std::max(wu, rel_err(s.ux, (8.0 * c1 + 2.0 * t * c2) / den));
            wr = std::max(wr, rel_err(s.rho, 4.0 / den));
        }
    }
    out.push_back(check_max("eta_equals_t", weta, 1e-8));
    out.push_back(check_max("ux_closed_form", wu, 1e-7));
    out.push_back(check_max("rho_closed_form", wr, 1e-7));
    return out;
}

std::vector<GoldenCheck> golden_example3(const Context& ctx) {
    std::vector<GoldenCheck> out;
    out.push_back(check_abs("eta_star", ctx.report.eta_star.value_or(NAN), 0.5, 1e-9));
    // Complete elliptic integral form of the mean: P0bar = 2 K(2 eta) / pi (modulus form).
    double wp = 0.0;
    for (int k = 1; k <= 9; ++k) {
        const double eta = 0.05 * k;
        wp = std::max(wp, rel_err(pbar0(ctx.spec, ctx.report, eta), 2.0 * std::comp_ellint_1(2.0 * eta) / std::numbers::pi));
    }
    out.push_back(check_max("pbar0_elliptic_closed_form", wp, 1e-8));
    out.push_back(check_abs("t_star_reported", ctx.t_limit.value, 0.4, 0.02));
    return out;
}

std::vector<GoldenCheck> golden_example4(const Context& ctx) {
    std::vector<GoldenCheck> out;
    const double r712 = std::sqrt(7.0 / 12.0);
    double wp = 0.0, wi = 0.0, wt = 0.0;
    for (int k = 0; k <= 20; ++k) {
        const double eta = 0.5 * k;
        wp = std::max(wp, std::abs(pbar0(ctx.spec, ctx.report, eta) - (1.0 + 7.0 * eta * eta / 12.0)));
        wi = std::max(wi, std::abs(i2(ctx.spec, ctx.report, eta) + 7.0 * eta / 12.0));
        wt = std::max(wt, std::abs(time_of_eta(ctx, eta) - std::atan(r712 * eta) / r712));
    }
    out.push_back(check_max("pbar0_closed_form", wp, 1e-8));
    out.push_back(check_max("i2_closed_form", wi, 1e-8));
    out.push_back(check_max("time_map_closed_form", wt, 1e-8));
    out.push_back(check_abs("t_infinity", ctx.t_limit.value, 0.5 * std::numbers::pi / r712, 1e-4));

    std::vector<double> alphas(64);
    for (int i = 0; i < 64; ++i) alphas[i] = (i + 0.5) / 64.0;
    double wu = 0.0, wr = 0.0;
    for (double eta : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        for (const auto& s : evaluate_grid(ctx, eta, alphas, false)) {
            const double a = s.alpha;
            const double den = 3.0 * (4.0 + eta * (4.0 + 3.0 * eta + 4.0 * a * (eta * (a - 1.0) - 2.0)));
            const double ux = (12.0 - 24.0 * a + 4.0 * eta * (1.0 + 6.0 * a * (a - 1.0)) + 7.0 * (2.0 * a - 1.0) * eta * eta) / den;
            wu = std::max(wu, rel_err(s.ux, ux));
            wr = std::max(wr, rel_err(s.rho, (12.0 + 7.0 * eta * eta) / den));
        }
    }
    out.push_back(check_max("ux_closed_form", wu, 1e-7));
    out.push_back(check_max("rho_closed_form", wr, 1e-7));

    const SteadyState ss = steady_constants(ctx.spec);
    double wri = 0.0, wui = 0.0;
    for (double a : alphas) {
        const double rinf = 7.0 / (3.0 * (4.0 * a * a - 4.0 * a + 3.0));
        wri = std::max(wri, std::abs(ss.p_inf(a) - rinf));
        wui = std::max(wui, std::abs(ss.u_inf(a) + (1.0 - 2.0 * a) * rinf));
    }
    out.push_back(check_max("rho_infinity_profile", wri, 1e-6));
    out.push_back(check_max("ux_infinity_profile", wui, 1e-6));

    ProblemSpec sw = ctx.spec;
    sw.lambda = 0.5;
    sw.kappa = -1.0;
    const Context cs = make_context(sw);
    out.push_back(check_abs("swapped_t_infinity", cs.t_limit.value, 2.22, 0.01));
    const SteadyState s2 = steady_constants(sw);
    const double acot = std::atan(1.0 / std::numbers::sqrt2);
    double wr2 = 0.0;
    for (double a : alphas)
        wr2 = std::max(wr2, std::abs(s2.p_inf(a) - std::numbers::sqrt2 / ((4.0 * a * a - 4.0 * a + 3.0) * acot)));
    out.push_back(check_max("swapped_rho_infinity_profile", wr2, 1e-6));
    return out;
}

}  // namespace

std::vector<GoldenCheck> golden_checks(int id, const Context& ctx) {
    switch (id) {
        case 1: return golden_example1(ctx);
        case 2:
            return {check_abs("eta_star", ctx.report.eta_star.value_or(NAN), 1.0, 1e-9),
                    check_abs("t_star_reported", ctx.t_limit.value, 0.86, 0.02)};
        case 3: return golden_example3(ctx);
        case 4: return golden_example4(ctx);
        default: throw ValidationError("example id must be 1, 2, 3 or 4");
    }
}

namespace {

struct Options {
    std::string config;
    std::string out = "hs_out";
    int example = 0;
    std::vector<double> lambdas, kappas;
    std::string family;
    std::vector<double> params;
    std::string bc = "periodic";
    int grid = 0;
    std::vector<double> etas, times;
};

struct Failure {
    int code;
    std::string message;
};

ProblemSpec resolve_problem(const Options& o) {
    ProblemSpec spec;
    const int sources = (!o.config.empty()) + (o.example != 0) + (!o.family.empty());
    if (sources != 1) throw ValidationError("give exactly one of --config, --example or --family");
    if (!o.config.empty())
        spec = load_problem(o.config);
    else if (o.example != 0)
        spec = example_spec(o.example);
    else
        spec.data = make_builtin(o.family, o.params, bc_from_string(o.bc));
    if (o.lambdas.size() > 1 || o.kappas.size() > 1)
        throw ValidationError("lists for --lambda/--kappa are only accepted by sweep");
    if (!o.lambdas.empty()) spec.lambda = o.lambdas[0];
    if (!o.kappas.empty()) spec.kappa = o.kappas[0];
    if (!o.family.empty() && (o.lambdas.empty() || o.kappas.empty()))
        throw ValidationError("--family needs --lambda and --kappa");
    const auto diag = validate(spec);
    if (!diag.empty()) {
        std::string msg = "invalid problem:";
        for (const auto& d : diag) msg += "\n  " + d;
        throw ValidationError(msg);
    }
    return spec;
}

bool has_representation(const RegimeVerdict& v) {
    switch (v.regime) {
        case Regime::SpecialLambdaZero:
        case Regime::Trivial:
        case Regime::GiPJReduction: return false;
        case Regime::Unclassified: return v.eta_star.has_value() || v.t_limit.finite;
        default: return true;
    }
}

fs::path prepare_out(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw Error("output directory not writable: " + dir);
    return p;
}

json header(const char* command) { return {{"schema", 1}, {"command", command}}; }

// Output times: explicit --time, else --eta mapped through the time map,
// else fractions of the terminal time.
std::vector<double> slice_etas(const Context& ctx, const Options& o) {
    std::vector<double> etas;
    if (!o.etas.empty()) return o.etas;
    if (!o.times.empty()) {
        for (double t : o.times) etas.push_back(eta_of_time(ctx, t));
        return etas;
    }
    if (ctx.t_limit.finite) {
        for (double f : {0.0, 0.25, 0.5, 0.75, 0.9, 0.99}) etas.push_back(eta_of_time(ctx, f * ctx.t_limit.value));
    } else {
        for (double t : {0.0, 0.25, 0.5, 1.0, 2.0}) etas.push_back(eta_of_time(ctx, t));
    }
    return etas;
}

json rates_json(const Context& ctx, const RegimeVerdict& v, RateTable& predicted, bool& agree) {
    predicted = predicted_rates(ctx.spec, v);
    agree = false;
    try {
        const RateTable m = fit_rates(ctx, v);
        agree = rates_agree(predicted, m);
        json j = to_json(m);
        j["agree"] = agree;
        return j;
    } catch (const FitUnstable& e) {
        return {{"error", e.what()}, {"residual", e.residual}};
    } catch (const Error& e) {
        return {{"error", e.what()}};
    }
}

int cmd_analyze(const Options& o) {
    const ProblemSpec spec = resolve_problem(o);
    const auto out = prepare_out(o.out);
    const RegimeVerdict v = classify(spec);
    json j = header("analyze");
    j["problem"] = problem_to_json(spec);
    if (spec.lambda != 0.0) {
        try {
            j["root_report"] = to_json(root_report(spec));
        } catch (const OmegaOverflow& e) {
            j["root_report"] = {{"error", e.what()}};
        }
    }
    RateTable pred;
    if (v.eta_star || v.regime == Regime::SteadyStateFiniteTime) pred = predicted_rates(spec, v);
    j["verdict"] = to_json(v, pred, nullptr);
    write_json_file((out / "verdict.json").string(), j);
    std::cout << to_string(v.regime) << " [" << v.theorem_tag << "] t_limit=" << fmt17(v.t_limit.value) << '\n';
    return v.regime == Regime::Unclassified ? 2 : 0;
}

int cmd_solve(const Options& o) {
    const ProblemSpec spec = resolve_problem(o);
    const auto out = prepare_out(o.out);
    const RegimeVerdict v0 = classify(spec);
    if (!has_representation(v0))
        throw SpecialCase(std::string("no representation-formula solve for regime ") + to_string(v0.regime) + " (" +
                          v0.theorem_tag + ")");
    const Context ctx = make_context(spec);
    const int n = o.grid > 0 ? o.grid : 129;
    std::ofstream slices(out / "slices.csv");
    bool first = true;
    for (double eta : slice_etas(ctx, o)) {
        write_slices_csv(slices, eulerian_slice(ctx, eta, n), first);
        first = false;
    }
    std::ofstream cache(out / "cache.csv");
    write_cache_csv(cache, ctx.cache);
    std::cout << "wrote slices.csv and cache.csv to " << out.string() << '\n';
    return 0;
}

int cmd_rates(const Options& o) {
    const ProblemSpec spec = resolve_problem(o);
    const auto out = prepare_out(o.out);
    const Context ctx = make_context(spec);
    const RegimeVerdict v = classify(ctx);
    RateTable pred;
    bool agree;
    const json measured = rates_json(ctx, v, pred, agree);
    json j = header("rates");
    j["problem"] = problem_to_json(spec);
    j["verdict"] = to_json(v, pred, measured);
    write_json_file((out / "rates.json").string(), j);
    std::cout << "rates " << (agree ? "agree" : "disagree") << " with the predicted table\n";
    return 0;
}

int cmd_oracle(const Options& o) {
    const ProblemSpec spec = resolve_problem(o);
    const auto out = prepare_out(o.out);
    const Context ctx = make_context(spec);
    const int n = o.grid > 0 ? o.grid : 256;
    std::vector<double> times = o.times;
    if (times.empty()) times.push_back(ctx.t_limit.finite ? 0.5 * ctx.t_limit.value : 1.0);
    SpectralOracle orc(spec, n);
    const auto states = orc.run_until(times);
    std::vector<TraceRow> rows;
    for (const auto& s : states)
        for (int j = 0; j < n; ++j) rows.push_back({s.t, s.period * j / n, s.v[j], s.r[j]});
    std::ofstream trace(out / "trace.csv");
    write_trace_csv(trace, rows);
    json j = header("oracle-check");
    j["problem"] = problem_to_json(spec);
    j["n"] = n;
    json arr = json::array();
    for (double t : times) {
        const Discrepancy d = oracle_discrepancy(ctx, t, n);
        arr.push_back({{"t", t}, {"ux", d.ux}, {"rho", d.rho}, {"sup", d.sup()}});
        std::cout << "t=" << fmt17(t) << " sup discrepancy " << fmt17(d.sup()) << '\n';
    }
    j["discrepancy"] = arr;
    write_json_file((out / "oracle.json").string(), j);
    return 0;
}

int cmd_example(const Options& o) {
    if (o.example < 1 || o.example > 4) throw ValidationError("--example must be 1, 2, 3 or 4");
    const auto out = prepare_out(o.out);
    json manifest = header("example");
    manifest["example"] = o.example;
    manifest["files"] = json::array();
    auto flush = [&] { write_json_file((out / "manifest.json").string(), manifest); };
    try {
        const ProblemSpec spec = example_spec(o.example);
        const Context ctx = make_context(spec);
        const RegimeVerdict v = classify(ctx);
        RateTable pred;
        bool agree;
        const json measured = rates_json(ctx, v, pred, agree);
        json rep = header("example");
        rep["problem"] = problem_to_json(spec);
        rep["root_report"] = to_json(ctx.report);
        rep["verdict"] = to_json(v, pred, measured);
        write_json_file((out / "report.json").string(), rep);
        manifest["files"].push_back("report.json");

        std::ofstream slices(out / "slices.csv");
        bool first = true;
        for (double eta : slice_etas(ctx, o)) {
            write_slices_csv(slices, eulerian_slice(ctx, eta, o.grid > 0 ? o.grid : 129), first);
            first = false;
        }
        manifest["files"].push_back("slices.csv");
        std::ofstream cache(out / "cache.csv");
        write_cache_csv(cache, ctx.cache);
        manifest["files"].push_back("cache.csv");

        json checks = json::array();
        int failed = 0;
        for (const auto& c : golden_checks(o.example, ctx)) {
            checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"expected", c.expected},
                              {"tolerance", c.tolerance}});
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << fmt17(c.value)
                      << " expected=" << fmt17(c.expected) << " tol=" << fmt17(c.tolerance) << '\n';
            failed += !c.pass;
        }
        manifest["golden"] = checks;
        manifest["rates_agree"] = agree;
        manifest["regime"] = to_string(v.regime);
        manifest["theorem_tag"] = v.theorem_tag;
        manifest["status"] = failed == 0 ? "ok" : "golden_mismatch";
        flush();
        std::cout << to_string(v.regime) << " [" << v.theorem_tag << "], " << failed << " golden check(s) failed\n";
        return 0;
    } catch (const std::exception& e) {
        manifest["status"] = "error";
        manifest["error"] = e.what();
        flush();
        throw;
    }
}

int cmd_sweep(const Options& o) {
    if (o.lambdas.empty() || o.kappas.empty()) throw ValidationError("sweep needs --lambda and --kappa lists");
    const std::string family = o.family.empty() ? "cos2pi" : o.family;
    const BcMode bc = bc_from_string(o.bc);
    const InitialData data = make_builtin(family, o.params, bc);
    const auto out = prepare_out(o.out);
    std::vector<std::pair<double, double>> cells;
    for (double l : o.lambdas)
        for (double k : o.kappas) cells.emplace_back(l, k);
    const auto rows = parallel_map(Exec::OpenMP, cells.size(), [&](std::size_t i) {
        AtlasRow r{cells[i].first, cells[i].second, "", "", NAN, NAN, "", ""};
        try {
            ProblemSpec spec;
            spec.lambda = r.lambda;
            spec.kappa = r.kappa;
            spec.data = data;
            if (o.grid > 0) spec.tol.grid_n = o.grid;
            const auto diag = validate(spec);
            if (!diag.empty()) throw ValidationError(diag.front());
            const RegimeVerdict v = classify(spec);
            r.regime = to_string(v.regime);
            r.theorem_tag = v.theorem_tag;
            r.t_limit = v.t_limit.value;
            r.eta_star = v.eta_star.value_or(NAN);
            r.multiplicity = to_string(v.multiplicity);
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        return r;
    });
    std::ofstream atlas(out / "atlas.csv");
    write_atlas_csv(atlas, rows);
    std::cout << "wrote " << rows.size() << " rows to " << (out / "atlas.csv").string() << '\n';
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Semi-analytic solver and regularity classifier for the generalized two-component Hunter-Saxton system"};
    app.require_subcommand(1);
    Options o;
    auto add_problem = [&](CLI::App* c) {
        c->add_option("--config", o.config, "JSON problem file");
        c->add_option("--example", o.example, "worked example id (1-4)");
        c->add_option("--family", o.family, "builtin data family");
        c->add_option("--params", o.params, "family parameters")->delimiter(',');
        c->add_option("--bc", o.bc, "periodic or dirichlet");
        c->add_option("--lambda", o.lambdas, "lambda (list for sweep)")->delimiter(',');
        c->add_option("--kappa", o.kappas, "kappa (list for sweep)")->delimiter(',');
        c->add_option("--out", o.out, "output directory");
        c->add_option("--grid", o.grid, "number of characteristics / oracle grid size");
        c->add_option("--eta", o.etas, "eta values")->delimiter(',');
        c->add_option("--time", o.times, "output times")->delimiter(',');
    };
    std::vector<std::pair<CLI::App*, int (*)(const Options&)>> cmds{
        {app.add_subcommand("analyze", "root report and regime verdict"), cmd_analyze},
        {app.add_subcommand("solve", "Eulerian slices and the time-map cache"), cmd_solve},
        {app.add_subcommand("example", "reproduce a worked example with golden checks"), cmd_example},
        {app.add_subcommand("sweep", "regime atlas over a lambda x kappa grid"), cmd_sweep},
        {app.add_subcommand("rates", "predicted and measured rate exponents"), cmd_rates},
        {app.add_subcommand("oracle-check", "compare against the direct spectral integrator"), cmd_oracle},
    };
    for (auto& [c, f] : cmds) add_problem(c);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    try {
        for (auto& [c, f] : cmds)
            if (c->parsed()) return f(o);
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace hs

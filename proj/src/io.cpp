#include "hs/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "hs/errors.hpp"

namespace hs {

namespace {

json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json num(double x) { return std::isfinite(x) ? json(x) : json(fmt17(x)); }

json intervals(const std::vector<Interval>& v) {
    json a = json::array();
    for (const auto& iv : v) a.push_back({iv.lo, iv.hi});
    return a;
}

std::vector<double> doubles(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    if (!j.at(key).is_array()) throw ValidationError(std::string("field '") + key + "' must be an array");
    return j.at(key).get<std::vector<double>>();
}

}  // namespace

std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ProblemSpec parse_problem(const json& j) {
    try {
        ProblemSpec spec;
        spec.lambda = j.at("lambda").get<double>();
        spec.kappa = j.at("kappa").get<double>();
        const json& d = j.at("data");
        const std::string family = d.at("family").get<std::string>();
        const BcMode bc = d.contains("bc") ? bc_from_string(d.at("bc").get<std::string>()) : BcMode::Periodic;
        if (family == "samples")
            spec.data = make_sampled(doubles(d, "alpha"), doubles(d, "u0_prime"), doubles(d, "rho0"), bc);
        else
            spec.data = make_builtin(family, doubles(d, "params"), bc);
        if (j.contains("tol")) {
            const json& t = j.at("tol");
            spec.tol.quad_abs = t.value("quad_abs", spec.tol.quad_abs);
            spec.tol.quad_rel = t.value("quad_rel", spec.tol.quad_rel);
            spec.tol.root_tol = t.value("root_tol", spec.tol.root_tol);
            spec.tol.eta_cutoff = t.value("eta_cutoff", spec.tol.eta_cutoff);
            spec.tol.grid_n = t.value("grid_n", spec.tol.grid_n);
        }
        return spec;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("problem file: ") + e.what());
    }
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open problem file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("problem file: ") + e.what());
    }
    return parse_problem(j);
}

json problem_to_json(const ProblemSpec& spec) {
    json d;
    d["family"] = spec.data.family;
    if (spec.data.family == "samples") {
        d["alpha"] = spec.data.sample_alpha;
        d["u0_prime"] = spec.data.sample_u0_prime;
        d["rho0"] = spec.data.sample_rho0;
    } else {
        d["params"] = spec.data.params;
    }
    d["bc"] = to_string(spec.data.bc_mode);
    json j;
    j["lambda"] = spec.lambda;
    j["kappa"] = spec.kappa;
    j["data"] = d;
    j["tol"] = {{"quad_abs", spec.tol.quad_abs},
                {"quad_rel", spec.tol.quad_rel},
                {"root_tol", spec.tol.root_tol},
                {"eta_cutoff", spec.tol.eta_cutoff},
                {"grid_n", spec.tol.grid_n}};
    return j;
}

json to_json(const RootReport& r) {
    json j;
    j["omega_set"] = r.omega_set;
    j["M"] = opt(r.M);
    j["N"] = opt(r.N);
    j["N1"] = opt(r.N1);
    j["eta_star"] = opt(r.eta_star);
    j["multiplicity"] = to_string(r.multiplicity);
    j["alpha_bar"] = r.alpha_bar;
    j["alpha_bar_interval"] = r.alpha_bar_interval;
    j["alpha_bar_intervals"] = intervals(r.alpha_bar_intervals);
    j["rho0_zeros"] = r.rho0_zeros;
    j["rho0_zero_intervals"] = intervals(r.rho0_zero_intervals);
    return j;
}

json to_json(const RateTable& r) {
    json j;
    j["pbar0_exp"] = opt(r.pbar0_exp);
    j["i2_exp"] = opt(r.i2_exp);
    j["ux_at_abar_exp"] = r.ux_at_abar_exp;
    j["log_flag"] = r.log_flag;
    j["pbar0_log"] = r.pbar0_log;
    j["i2_log"] = r.i2_log;
    j["ux_log"] = r.ux_log;
    j["large_eta"] = r.large_eta;
    return j;
}

json to_json(const TimeLimit& t) {
    return {{"finite", t.finite}, {"value", num(t.value)}, {"error", num(t.error)}, {"uncertain", t.uncertain}};
}

json to_json(const RegimeVerdict& v, const RateTable& predicted, const json& measured) {
    json j;
    j["regime"] = to_string(v.regime);
    j["theorem_tag"] = v.theorem_tag;
    j["t_limit"] = to_json(v.t_limit);
    j["blowup_locations"] = v.blowup_locations;
    j["rho_fate"] = to_string(v.rho_fate);
    j["rho_fate_elsewhere"] = to_string(v.rho_fate_elsewhere);
    json pe = json::object();
    for (const auto& [k, x] : v.predicted_exponents) pe[k] = num(x);
    j["predicted_exponents"] = pe;
    j["multiplicity"] = to_string(v.multiplicity);
    j["eta_star"] = opt(v.eta_star);
    j["curly_m"] = opt(v.curly_m);
    j["curly_n"] = opt(v.curly_n);
    j["explanation"] = v.explanation;
    j["rates"] = {{"predicted", to_json(predicted)}, {"measured", measured}};
    return j;
}

void write_slices_csv(std::ostream& os, const std::vector<SliceRow>& rows, bool header) {
    if (header) os << "alpha,x,eta,t,jac,ux,rho\n";
    for (const auto& r : rows)
        os << fmt17(r.alpha) << ',' << fmt17(r.x) << ',' << fmt17(r.eta) << ',' << fmt17(r.t) << ','
           << fmt17(r.jac) << ',' << fmt17(r.ux) << ',' << fmt17(r.rho) << '\n';
}

void write_cache_csv(std::ostream& os, const IntegralCache& c) {
    os << "eta,pbar0,i2,t\n";
    for (std::size_t i = 0; i < c.eta_knots.size(); ++i)
        os << fmt17(c.eta_knots[i]) << ',' << fmt17(c.pbar_vals[i]) << ',' << fmt17(c.i2_vals[i]) << ','
           << fmt17(c.t_vals[i]) << '\n';
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
    os << "t,x,ux,rho\n";
    for (const auto& r : rows)
        os << fmt17(r.t) << ',' << fmt17(r.x) << ',' << fmt17(r.ux) << ',' << fmt17(r.rho) << '\n';
}

void write_atlas_csv(std::ostream& os, const std::vector<AtlasRow>& rows) {
    os << "lambda,kappa,regime,theorem_tag,t_limit,eta_star,multiplicity,error\n";
    for (const auto& r : rows) {
        std::string err = r.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        os << fmt17(r.lambda) << ',' << fmt17(r.kappa) << ',' << r.regime << ',' << r.theorem_tag << ','
           << fmt17(r.t_limit) << ',' << fmt17(r.eta_star) << ',' << r.multiplicity << ',' << err << '\n';
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace hs

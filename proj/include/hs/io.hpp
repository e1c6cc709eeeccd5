#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hs/classifier.hpp"
#include "hs/evaluator.hpp"
#include "hs/quadratic.hpp"

namespace hs {

using json = nlohmann::ordered_json;

// Problem file: {"lambda", "kappa", "data": {"family", "params", "bc"}, "tol": {...}}.
// The "samples" family takes data.alpha, data.u0_prime and data.rho0 arrays.
ProblemSpec parse_problem(const json& j);
ProblemSpec load_problem(const std::string& path);
json problem_to_json(const ProblemSpec& spec);

json to_json(const RootReport& r);
json to_json(const RateTable& r);
json to_json(const TimeLimit& t);
// Verdict with both rate tables; `measured` may be null.
json to_json(const RegimeVerdict& v, const RateTable& predicted, const json& measured);

// printf("%.17g"), with inf/nan spelled out.
std::string fmt17(double x);

void write_slices_csv(std::ostream& os, const std::vector<SliceRow>& rows, bool header = true);
void write_cache_csv(std::ostream& os, const IntegralCache& cache);

struct TraceRow {
    double t, x, ux, rho;
};
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

struct AtlasRow {
    double lambda, kappa;
    std::string regime, theorem_tag;
    double t_limit;  // inf when infinite, nan when the cell failed
    double eta_star;  // nan when absent
    std::string multiplicity;
    std::string error;
};
void write_atlas_csv(std::ostream& os, const std::vector<AtlasRow>& rows);

void write_json_file(const std::string& path, const json& j);

}  // namespace hs

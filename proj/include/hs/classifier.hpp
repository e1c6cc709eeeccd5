#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hs/evaluator.hpp"
#include "hs/quadrature.hpp"

namespace hs {

enum class Regime {
    SteadyStateFiniteTime,
    GlobalDecay,
    GlobalNontrivialSteady,
    OneSidedBlowup,
    TwoSidedEverywhereBlowup,
    InvertedTwoSided,
    RhoBlowup,
    Trivial,
    GiPJReduction,
    SpecialLambdaZero,
    Unclassified
};

enum class RhoFate { Bounded, BlowsUpPlus, BlowsUpMinus, VanishesAtTstar, ConvergesNontrivial, IdenticallyZeroAtPoints };

const char* to_string(Regime r);
const char* to_string(RhoFate f);

// Exponents are powers of (eta* - eta) near a blow-up root, or of eta for
// the large-eta steady regime. 0 means the quantity stays bounded.
// The *_log fields give the accompanying power of log(1/(eta* - eta)).
struct RateTable {
    std::optional<double> pbar0_exp;
    std::optional<double> i2_exp;
    double ux_at_abar_exp = 0.0;
    bool log_flag = false;
    int pbar0_log = 0;
    int i2_log = 0;
    int ux_log = 0;
    bool large_eta = false;
};

struct RegimeVerdict {
    Regime regime = Regime::Unclassified;
    std::string theorem_tag;
    TimeLimit t_limit;
    std::vector<double> blowup_locations;
    RhoFate rho_fate = RhoFate::Bounded;            // at the blow-up locations
    RhoFate rho_fate_elsewhere = RhoFate::Bounded;  // away from them
    std::map<std::string, double> predicted_exponents;
    Multiplicity multiplicity = Multiplicity::None;
    std::optional<double> eta_star;
    std::optional<double> curly_m, curly_n;
    std::string explanation;
};

RegimeVerdict classify(const ProblemSpec& spec);
// Same decision tree reusing an existing context (lambda != 0).
RegimeVerdict classify(const Context& ctx);

RateTable predicted_rates(const ProblemSpec& spec, const RegimeVerdict& verdict);

// Measured exponents from geometric eta sequences. Throws FitUnstable when a
// fit residual exceeds 0.05.
RateTable fit_rates(const Context& ctx, const RegimeVerdict& verdict);

// |measured - predicted| <= tol on every exponent present in both, and equal log flags.
bool rates_agree(const RateTable& predicted, const RateTable& measured, double tol = 0.05);

}  // namespace hs

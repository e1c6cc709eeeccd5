#pragma once

#include <string>
#include <vector>

#include "hs/quadrature.hpp"

namespace hs {

// Worked examples 1-4. Throws ValidationError for any other id.
ProblemSpec example_spec(int id);

struct GoldenCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;     // worst observed value or error
    double expected = 0.0;
    double tolerance = 0.0;
};

// Closed-form and reported-value comparisons for example `id` on its context.
std::vector<GoldenCheck> golden_checks(int id, const Context& ctx);

// Exit codes: 0 success, 1 validation failure, 2 Unclassified, 3 numerical failure.
int run_cli(int argc, char** argv);

}  // namespace hs

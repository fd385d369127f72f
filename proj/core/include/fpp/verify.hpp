#pragma once

#include <string>
#include <vector>

namespace fpp::verify {

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Exhaustive engine-vs-enumeration equivalence: every configuration of the
/// radius-1 two-point box plus sampled radius-2 configurations.
std::vector<CheckLine> oracle_suite();

/// Exact martingale identities on the radius-1 two-point box: telescoping,
/// orthogonality, the variance identity and the increment bound.
std::vector<CheckLine> martingale_suite();

/// Detour construction: disjointness and the length multiset over random
/// edges in dimensions 2 and 3.
std::vector<CheckLine> detour_suite();

/// Exponent and constant checks: closed-form exponents for d = 2, 3, the
/// constructive Chernoff rate on reference models with its Monte Carlo tail
/// check, and the box radius formula.
std::vector<CheckLine> constants_suite();

bool all_pass(const std::vector<CheckLine>& lines);

}  // namespace fpp::verify

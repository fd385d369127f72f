#pragma once

#include <cstdint>
#include <string>

#include "fpp/weights.hpp"

namespace fpp {

/// Verdict per moment/regularity condition on a weight model. `known` is
/// false when some assigned family is not analytically understood.
struct ConditionReport {
    bool known = true;
    bool no_fast_edges = false;      // small-ball probabilities vanish near 0
    bool second_moment = false;      // sup E t^2 finite
    bool uniform_square_int = false; // squares uniformly integrable
    bool higher_moment = false;      // sup E t^p finite for some p > 2
    double higher_moment_p = 0.0;    // largest safe p when higher_moment holds
    std::string detail;

    bool accept() const { return known && no_fast_edges && second_moment; }
};

ConditionReport validate_conditions(const WeightModel& model);

struct Beta1Result {
    double beta1 = 0;
    double s_star = 0;
    double eps_star = 0;
};

/// Constructive lower Chernoff rate: any fixed m-edge path satisfies
/// P(T(path) <= beta1 * m) <= exp(-2 d m). Built by choosing eps with
/// sup_e P(t(e) < eps) < exp(-6d)/2, then s = (6d + log 2)/eps, then
/// beta1 = min(0.99 * 4d / s, 0.99 * mu). Throws if no usable eps exists
/// above 1e-12.
Beta1Result compute_beta1(const WeightModel& model, int dim);

/// Worst-case closed-form constants of a model, echoed into reports.
struct ModelConstants {
    double mu = 0;                 // sup of edge means
    double sup_second_moment = 0;  // sup of edge second moments
    double beta1 = 0;
    double s_star = 0;
    double eps_star = 0;
    double beta2 = 0;  // diagnostic tail rate for long-path events
    double c2 = 0;     // diagnostic tail prefactor
    double alpha = 0;  // truncation exponent 1/2 - 1/(16 d)
    double eps0 = 0;   // containment-box exponent 1/(4 d)
    double delta = 0;  // truncation-event decay exponent 1/(2 d)
    double essinf = 0; // min over edges of the essential infimum

    static ModelConstants compute(const WeightModel& model);
    std::string to_key_values() const;
};

double default_alpha(int dim);

struct BoxRadiusResult {
    std::int64_t radius = 0;
    bool capped = false;
};

/// ceil(8 mu / beta1 * n^(1+eps)), clipped to `cap` with an explicit flag.
BoxRadiusResult box_radius(std::int64_t n, double eps, const ModelConstants& c, std::int64_t cap);

struct TailCheckResult {
    double frequency = 0;   // empirical P(T(path) <= beta1 * m)
    double stderr_freq = 0;
    double bound = 0;       // exp(-2 d m)
    std::int64_t paths = 0;
    bool pass = false;
};

/// Monte Carlo check of the Chernoff rate on random m-edge monotone lattice
/// paths from the origin.
TailCheckResult mc_tail_check(const WeightModel& model, double beta1, int m, std::int64_t paths,
                              std::uint64_t seed);

}  // namespace fpp

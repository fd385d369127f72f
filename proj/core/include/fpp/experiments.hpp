#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fpp/theory.hpp"
#include "fpp/weights.hpp"

namespace fpp {

struct BoxPolicy {
    double eps = 0.25;
    // Cap on the 8*mu/beta1 growth constant; 0 keeps plain 4n boxes and
    // the proxy quality is then read off the certificate columns.
    double c_cap = 0.0;
    std::int64_t radius_cap = 100000;  // absolute computational budget
};

struct EventSelection {
    bool a = true;
    bool v = true;
    bool w = true;
    bool g = true;
    static EventSelection parse(const std::string& text);
    std::string to_string() const;
};

struct ExperimentPlan {
    WeightModel model;
    std::vector<std::int64_t> n_list;   // strictly increasing
    std::vector<std::int64_t> squares;  // subset of n_list; perfect squares
    std::int64_t replications = 2000;
    std::optional<double> alpha;        // truncation exponent; default 1/2 - 1/(16 d)
    BoxPolicy box;
    EventSelection events;
    int workers = 0;                    // 0 = hardware concurrency

    void validate() const;  // throws with every problem aggregated
};

struct RowStats {
    std::int64_t n = 0;
    std::int64_t reps = 0;
    double mean_T = 0, se_T = 0, var_T = 0;
    double mean_That = 0, var_That = 0;
    double freq_Ac = 0;
    double freq_Vnc = 0;
    double vnc_certified_share = 0;  // certified fraction of the V-failures
    double freq_Wnc = 0;             // square rows only
    bool has_w = false;
    double freq_Gnc = 0;
    double mean_len = 0, se_len = 0;
    double cert_rate = 0;

    // summary extras
    std::int64_t box_radius = 0;
    bool box_capped = false;
    double se_var_T = 0;             // standard error of var_T
    double mean_len_trunc = 0;
    double max_len = 0;
    double em_witness_freq = 0;
    double second_moment_emp = 0;    // E (T/n)^2, empirical
    double second_moment_bound = 0;  // straight-line closed form / n^2
    std::array<double, 5> t_over_n_quantiles{};  // min, q25, med, q75, max
};

struct SquareDiagnostics {
    std::int64_t n = 0;          // the square distance
    std::int64_t level_hi = 0;   // (sqrt(n)+1)^2
    std::int64_t k_mid = 0;      // interpolation point in [n, level_hi)
    double freq_I_pos = 0;       // I > 0 frequency (equals the W failure rate)
    double mean_I = 0;
    double max_I = 0;
    std::int64_t i_negative = 0;         // must stay 0
    std::int64_t lipschitz_violations = 0;  // must stay 0
    double lipschitz_max_ratio = 0;      // max |gap| / bound, <= 1
    double d_proxy_mean = 0;             // mean |S_k - S_n| / n
    double d_proxy_max = 0;
    std::array<double, 5> s_over_n_quantiles{};
};

struct MuFEstimate {
    bool available = false;  // iid models only
    double estimate = 0;
    double se = 0;
    double ci_lo = 0, ci_hi = 0;
    std::vector<double> per_n_means;  // mean T_n / n, the Fekete certificate
    bool bracket_ok = false;          // beta1/4 <= estimate <= mu + 3 se
};

struct ExperimentReport {
    std::vector<RowStats> rows;
    std::vector<SquareDiagnostics> diagnostics;
    MuFEstimate mu_f;
    ModelConstants constants;
    std::uint64_t seed = 0;
    std::string config_hash;   // filled by the CLI layer when available
    std::string config_echo;   // ditto
    std::string model_desc;
    int dim = 0;
    EventSelection events;
    std::int64_t replications = 0;
};

/// Runs the full per-n Monte Carlo pass. Deterministic for a fixed plan
/// and seed regardless of worker count.
ExperimentReport run_plan(const ExperimentPlan& plan);

/// mu_F estimate from a finished iid run; throws for non-iid models.
MuFEstimate estimate_mu_f(const ExperimentPlan& plan, const std::vector<RowStats>& rows,
                          const ModelConstants& constants);

void write_table_csv(const ExperimentReport& rep, std::ostream& os);
void write_summary(const ExperimentReport& rep, std::ostream& os);

/// Deterministic pairwise summation.
double pairwise_sum(std::span<const double> xs);

}  // namespace fpp

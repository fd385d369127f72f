#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fpp/geodesic.hpp"
#include "fpp/lattice.hpp"
#include "fpp/weights.hpp"

namespace fpp::oracle {

/// Hard refusal when an exact-enumeration request is too large.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BruteForceOptions {
    bool override_guard = false;       // allow boxes beyond d=2, m<=2
    std::uint64_t max_extensions = 200'000'000;  // DFS step budget
};

struct BruteForceResult {
    double value = 0;
    LatticePath path;                       // canonical under the iterative rule
    std::vector<LatticePath> optimal_set;   // every tied optimal path
};

/// Exact minimum passage time over every self-avoiding path between two
/// box vertices, by DFS enumeration in lexicographic neighbor order, with
/// the canonical path chosen by literally filtering the optimal set on
/// successive edge centers.
BruteForceResult brute_force_passage(const LatticeBox& box, VertexId source, VertexId target,
                                     std::span<const double> raw_weights,
                                     const std::optional<Truncation>& truncation,
                                     const BruteForceOptions& opts = {});

/// Finite product space over per-edge discrete weights (point mass or two
/// point), indexed by box edge id. Configurations enumerate the full
/// product; probabilities sum to one.
class DiscreteProductSpace {
public:
    struct Atom {
        double value;
        double prob;
    };

    DiscreteProductSpace(const LatticeBox& box, std::vector<std::vector<Atom>> per_edge);

    /// All edges share one spec; PointMass and TwoPoint supported.
    static DiscreteProductSpace homogeneous(const LatticeBox& box, const DistributionSpec& spec);

    const LatticeBox& box() const { return *box_; }
    std::size_t edge_count() const { return per_edge_.size(); }
    const std::vector<std::vector<Atom>>& atoms() const { return per_edge_; }

    std::uint64_t config_count() const { return config_count_; }

    /// Weight vector and probability of configuration `index` (mixed-radix
    /// over edge atoms, edge 0 most significant).
    void config(std::uint64_t index, std::vector<double>& weights, double& prob) const;

    /// Compensated total probability; |total - 1| <= 1e-12 by construction.
    double total_probability() const;

private:
    const LatticeBox* box_;
    std::vector<std::vector<Atom>> per_edge_;
    std::uint64_t config_count_;
};

struct MartingaleReport {
    std::vector<double> increment_second_moments;  // E X_l^2 per edge index
    std::vector<double> geodesic_membership;       // P(edge l on the canonical geodesic)
    std::vector<double> increment_bound_slack;     // C1 * membership - E X_l^2
    double max_cross_moment = 0;                   // max |E X_i X_j|, i != j
    double telescoping_residual = 0;               // max |sum X_l - (U - E U)|
    double variance_direct = 0;                    // Var(U) over the product space
    double variance_from_increments = 0;           // sum of E X_l^2
    double c1 = 0;                                 // 4 * sup E[(truncated weight)^2]
    double mean_value = 0;                         // E U
    bool increment_bound_ok = false;
};

/// Exact conditional-expectation sweep over the product space: builds the
/// martingale increments of the boxed minimum passage time along the edge
/// filtration (conditioning on the first l coordinates) and verifies the
/// telescoping, orthogonality and variance identities.
MartingaleReport exact_martingale(const DiscreteProductSpace& space, VertexId source,
                                  VertexId target, const std::optional<Truncation>& truncation);

/// Exact probability of a configuration predicate.
double exact_event_probability(const DiscreteProductSpace& space,
                               const std::function<bool(std::span<const double>)>& predicate);

}  // namespace fpp::oracle

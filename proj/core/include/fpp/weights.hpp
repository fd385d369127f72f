#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fpp/lattice.hpp"

namespace fpp {

/// Edge passage-time distribution. All supports lie in [0, inf).
class DistributionSpec {
public:
    enum class Family { PointMass, Uniform, Exponential, Pareto, TwoPoint };

    static DistributionSpec point_mass(double c);
    static DistributionSpec uniform(double a, double b);
    static DistributionSpec exponential(double rate);
    static DistributionSpec pareto(double shape, double scale);
    static DistributionSpec two_point(double v1, double v2, double p);

    Family family() const { return family_; }
    double param(int i) const { return params_[static_cast<std::size_t>(i)]; }

    double mean() const;
    double second_moment() const;
    double variance() const { return second_moment() - mean() * mean(); }

    /// Largest exponent q (with a 0.1 safety margin for heavy tails) such
    /// that the q-th moment is finite; infinity for light-tailed families.
    double safe_moment_order() const;

    /// E exp(-s T) for s > 0. Closed form everywhere except Pareto, which
    /// uses adaptive quadrature to relative error <= 1e-8.
    double laplace_transform(double s) const;

    /// P(T < eps), exact.
    double small_ball(double eps) const;

    /// Largest w with P(T < w) = 0.
    double essinf() const;

    /// Inverse CDF at u in [0, 1); the single entry point for sampling.
    double quantile(double u) const;

    std::string to_string() const;
    static DistributionSpec parse(const std::string& text);

    bool operator==(const DistributionSpec&) const = default;

private:
    DistributionSpec(Family f, double p0, double p1, double p2)
        : family_(f), params_{p0, p1, p2} {}

    Family family_;
    std::array<double, 3> params_;
};

/// min(t, k^alpha), the per-edge truncation.
double truncate_weight(double t, std::int64_t k, double alpha);

/// Truncation level k with its exponent alpha; threshold() = k^alpha.
struct Truncation {
    std::int64_t k = 1;
    double alpha = 0.5;
    double threshold() const;
};

/// How distributions are assigned to edges. Assignment depends only on an
/// edge's canonical lattice coordinates, never on the box or query.
struct AssignIid {
    DistributionSpec dist;
};
struct AssignAxis {
    std::vector<DistributionSpec> per_axis;  // size d
};
struct AssignParity {
    DistributionSpec even;  // parity of the lower endpoint coordinate sum
    DistributionSpec odd;
};
struct AssignTable {
    // indexed [axis][parity]
    std::vector<std::array<DistributionSpec, 2>> table;
};
using AssignmentRule = std::variant<AssignIid, AssignAxis, AssignParity, AssignTable>;

/// Independent, non-identically distributed edge weights with
/// deterministic counter-based sampling keyed by (seed, replication, edge).
class WeightModel {
public:
    WeightModel(int dim, AssignmentRule rule, std::uint64_t master_seed);

    int dim() const { return dim_; }
    std::uint64_t master_seed() const { return master_seed_; }
    const AssignmentRule& rule() const { return rule_; }
    bool is_iid() const { return std::holds_alternative<AssignIid>(rule_); }

    const DistributionSpec& spec_for(const EdgeRef& e) const;

    /// Every distinct distribution the rule can assign; used for the
    /// worst-case constants and condition checks.
    const std::vector<DistributionSpec>& distinct_specs() const { return distinct_; }

    /// Deterministic weight of `e` under replication `r`: a pure function
    /// of (master seed, r, canonical edge coordinates).
    double sample(const EdgeRef& e, std::uint32_t replication) const;

    /// Max coordinate magnitude the seeding scheme can address at this
    /// dimension; boxes beyond it are rejected.
    std::int64_t max_coordinate() const;

    std::string rule_to_string() const;

private:
    int dim_;
    AssignmentRule rule_;
    std::uint64_t master_seed_;
    std::vector<DistributionSpec> distinct_;
};

/// One sampled weight configuration: (model, replication). Values are
/// recomputed on demand from the counter-based generator, so reads are
/// trivially thread-safe and order-independent.
class Realization {
public:
    Realization(const WeightModel& model, std::uint32_t replication)
        : model_(&model), replication_(replication) {}

    const WeightModel& model() const { return *model_; }
    std::uint32_t replication() const { return replication_; }

    double weight(const EdgeRef& e) const { return model_->sample(e, replication_); }

    /// Raw weights of every edge of `box`, indexed by edge id.
    std::vector<double> materialize(const LatticeBox& box) const;
    void materialize_into(const LatticeBox& box, std::vector<double>& out) const;

private:
    const WeightModel* model_;
    std::uint32_t replication_;
};

}  // namespace fpp

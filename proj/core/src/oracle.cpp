#include "fpp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fpp::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tie_tol(double v) { return kTieRelTol * std::max(1.0, std::abs(v)); }

struct Enumerator {
    const LatticeBox& box;
    VertexId target = 0;
    std::span<const double> weights;  // already truncated
    std::uint64_t budget = 0;
    std::uint64_t steps = 0;

    double best = kInf;
    std::vector<std::pair<double, std::vector<VertexId>>> hits{};  // values within tol of best

    std::vector<VertexId> walk{};
    std::vector<char> on_walk{};

    void dfs(VertexId cur, double sum) {
        if (++steps > budget) {
            throw BudgetExceeded("brute_force_passage: enumeration budget exceeded");
        }
        if (cur == target) {
            if (sum < best - tie_tol(best)) {
                best = sum;
                hits.clear();
            }
            if (sum <= best + tie_tol(best)) {
                best = std::min(best, sum);
                hits.emplace_back(sum, walk);
            }
            return;
        }
        const int d = box.dim();
        const Coords c = box.decode_vertex(cur);
        // Neighbors in lexicographic coordinate order: axis 0 descending
        // side first would break it, so enumerate -1 then +1 per axis with
        // axis-major significance, i.e. sort by neighbor vertex id.
        std::array<std::pair<VertexId, double>, 2 * kMaxDim> next{};
        int count = 0;
        for (int axis = 0; axis < d; ++axis) {
            for (int dir : {-1, +1}) {
                Coords nc = c;
                nc[static_cast<std::size_t>(axis)] += dir;
                if (nc[static_cast<std::size_t>(axis)] < -box.radius() ||
                    nc[static_cast<std::size_t>(axis)] > box.radius()) {
                    continue;
                }
                const VertexId nid = box.encode_vertex(nc);
                if (on_walk[static_cast<std::size_t>(nid)]) continue;
                EdgeRef e;
                e.dim = d;
                e.axis = axis;
                e.lower = (dir > 0) ? c : nc;
                next[static_cast<std::size_t>(count++)] = {
                    nid, weights[static_cast<std::size_t>(box.encode_edge(e))]};
            }
        }
        std::sort(next.begin(), next.begin() + count,
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (int i = 0; i < count; ++i) {
            const auto [nid, we] = next[static_cast<std::size_t>(i)];
            const double nsum = sum + we;
            if (nsum > best + tie_tol(best)) continue;  // cannot improve or tie
            walk.push_back(nid);
            on_walk[static_cast<std::size_t>(nid)] = 1;
            dfs(nid, nsum);
            on_walk[static_cast<std::size_t>(nid)] = 0;
            walk.pop_back();
        }
    }
};

LatticePath walk_to_path(const LatticeBox& box, const std::vector<VertexId>& walk) {
    std::vector<Coords> verts;
    verts.reserve(walk.size());
    for (VertexId v : walk) verts.push_back(box.decode_vertex(v));
    return LatticePath::from_vertices(verts, box.dim());
}

// Edge-center key compared as (c_d, ..., c_2, c_1).
bool key_less(const EdgeRef& a, const EdgeRef& b) {
    const int d = a.dim;
    for (int i = d - 1; i >= 0; --i) {
        const double ka =
            a.lower[static_cast<std::size_t>(i)] + (i == a.axis ? 0.5 : 0.0);
        const double kb =
            b.lower[static_cast<std::size_t>(i)] + (i == b.axis ? 0.5 : 0.0);
        if (ka != kb) return ka < kb;
    }
    return false;
}

// The iterative selection rule: filter the set on the first edge center,
// then the second, and so on until one path remains. Paths in the set are
// distinct and share endpoints, so while several survive none has ended
// yet (a strict prefix would revisit the target).
std::size_t canonical_index(const std::vector<LatticePath>& set) {
    std::vector<std::size_t> alive(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) alive[i] = i;
    for (std::size_t depth = 0; alive.size() > 1; ++depth) {
        for (std::size_t cand : alive) {
            if (depth >= set[cand].length()) {
                throw std::logic_error("canonical_index: duplicate optimal paths");
            }
        }
        std::size_t best = alive[0];
        for (std::size_t k = 1; k < alive.size(); ++k) {
            if (key_less(set[alive[k]].edges()[depth], set[best].edges()[depth])) {
                best = alive[k];
            }
        }
        std::vector<std::size_t> next;
        for (std::size_t cand : alive) {
            if (set[cand].edges()[depth] == set[best].edges()[depth]) next.push_back(cand);
        }
        alive = std::move(next);
    }
    return alive[0];
}

}  // namespace

BruteForceResult brute_force_passage(const LatticeBox& box, VertexId source, VertexId target,
                                     std::span<const double> raw_weights,
                                     const std::optional<Truncation>& truncation,
                                     const BruteForceOptions& opts) {
    if (!opts.override_guard && !(box.dim() == 2 && box.radius() <= 2)) {
        throw BudgetExceeded("brute_force_passage: box too large (set override_guard to force)");
    }
    if (source == target) throw std::invalid_argument("brute_force_passage: source equals target");

    std::vector<double> w(raw_weights.begin(), raw_weights.end());
    if (truncation) {
        const double thr = truncation->threshold();
        for (double& x : w) x = std::min(x, thr);
    }

    Enumerator en{.box = box, .target = target, .weights = w, .budget = opts.max_extensions};
    en.on_walk.assign(static_cast<std::size_t>(box.vertex_count()), 0);
    en.walk.push_back(source);
    en.on_walk[static_cast<std::size_t>(source)] = 1;
    en.dfs(source, 0.0);
    if (en.hits.empty()) throw std::logic_error("brute_force_passage: no path found");

    BruteForceResult res;
    res.value = en.best;
    for (const auto& [v, walk] : en.hits) {
        if (v <= en.best + tie_tol(en.best)) {
            res.optimal_set.push_back(walk_to_path(box, walk));
        }
    }
    res.path = res.optimal_set[canonical_index(res.optimal_set)];
    return res;
}

DiscreteProductSpace::DiscreteProductSpace(const LatticeBox& box,
                                           std::vector<std::vector<Atom>> per_edge)
    : box_(&box), per_edge_(std::move(per_edge)) {
    if (static_cast<std::int64_t>(per_edge_.size()) != box.edge_count()) {
        throw std::invalid_argument("DiscreteProductSpace: need one atom list per box edge");
    }
    std::uint64_t count = 1;
    for (const auto& atoms : per_edge_) {
        if (atoms.empty() || atoms.size() > 2) {
            throw std::invalid_argument("DiscreteProductSpace: one or two atoms per edge");
        }
        double total = 0;
        for (const auto& a : atoms) {
            if (!(a.value > 0) || !(a.prob > 0)) {
                throw std::invalid_argument("DiscreteProductSpace: atoms need positive value and probability");
            }
            total += a.prob;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("DiscreteProductSpace: edge probabilities must sum to 1");
        }
        if (count > (std::uint64_t{1} << 20) / atoms.size()) {
            throw BudgetExceeded("DiscreteProductSpace: configuration count exceeds 2^20");
        }
        count *= atoms.size();
    }
    config_count_ = count;
}

DiscreteProductSpace DiscreteProductSpace::homogeneous(const LatticeBox& box,
                                                       const DistributionSpec& spec) {
    std::vector<Atom> atoms;
    switch (spec.family()) {
        case DistributionSpec::Family::PointMass:
            atoms = {{spec.param(0), 1.0}};
            break;
        case DistributionSpec::Family::TwoPoint:
            atoms = {{spec.param(0), spec.param(2)}, {spec.param(1), 1.0 - spec.param(2)}};
            break;
        default:
            throw std::invalid_argument("DiscreteProductSpace: spec must be discrete");
    }
    std::vector<std::vector<Atom>> per_edge(static_cast<std::size_t>(box.edge_count()), atoms);
    return DiscreteProductSpace(box, std::move(per_edge));
}

void DiscreteProductSpace::config(std::uint64_t index, std::vector<double>& weights,
                                  double& prob) const {
    const std::size_t n = per_edge_.size();
    weights.resize(n);
    prob = 1.0;
    // edge 0 most significant
    for (std::size_t i = n; i-- > 0;) {
        const auto& atoms = per_edge_[i];
        const std::uint64_t digit = index % atoms.size();
        index /= atoms.size();
        weights[i] = atoms[static_cast<std::size_t>(digit)].value;
        prob *= atoms[static_cast<std::size_t>(digit)].prob;
    }
}

double DiscreteProductSpace::total_probability() const {
    double sum = 0, comp = 0;
    std::vector<double> w;
    double p;
    for (std::uint64_t i = 0; i < config_count_; ++i) {
        config(i, w, p);
        const double y = p - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

MartingaleReport exact_martingale(const DiscreteProductSpace& space, VertexId source,
                                  VertexId target, const std::optional<Truncation>& truncation) {
    const LatticeBox& box = space.box();
    const std::size_t n_edges = space.edge_count();
    const std::uint64_t n_cfg = space.config_count();

    // Radix and prefix-space layout; prefix level l ranges over the first l
    // edge coordinates.
    std::vector<std::uint64_t> radix(n_edges);
    std::vector<std::uint64_t> level_size(n_edges + 1);
    level_size[0] = 1;
    for (std::size_t i = 0; i < n_edges; ++i) {
        radix[i] = space.atoms()[i].size();
        level_size[i + 1] = level_size[i] * radix[i];
    }

    // Pass 1: minimum passage value and canonical geodesic per configuration.
    std::vector<double> value(n_cfg);
    std::vector<double> cfg_prob(n_cfg);
    std::vector<double> membership(n_edges, 0.0);
    BruteForceOptions opts;
    opts.override_guard = true;  // the 2^20 budget is the real guard here
    std::vector<double> w;
    double p;
    double mean = 0;
    for (std::uint64_t i = 0; i < n_cfg; ++i) {
        space.config(i, w, p);
        const BruteForceResult r = brute_force_passage(box, source, target, w, truncation, opts);
        value[i] = r.value;
        cfg_prob[i] = p;
        mean += p * r.value;
        for (const auto& e : r.path.edges()) {
            membership[static_cast<std::size_t>(box.encode_edge(e))] += p;
        }
    }

    // Pass 2: conditional expectations by exact summation over completions.
    // levels[l][prefix] = E(value | first l coordinates).
    std::vector<std::vector<double>> levels(n_edges + 1);
    std::vector<std::vector<double>> level_prob(n_edges + 1);
    levels[n_edges] = value;
    level_prob[n_edges] = cfg_prob;
    for (std::size_t l = n_edges; l-- > 0;) {
        const std::uint64_t sz = level_size[l];
        levels[l].assign(sz, 0.0);
        level_prob[l].assign(sz, 0.0);
        const auto& atoms = space.atoms()[l];
        for (std::uint64_t prefix = 0; prefix < sz; ++prefix) {
            double acc = 0, pacc = 0;
            for (std::uint64_t digit = 0; digit < radix[l]; ++digit) {
                const std::uint64_t child = prefix * radix[l] + digit;
                acc += atoms[static_cast<std::size_t>(digit)].prob * levels[l + 1][child];
                pacc += level_prob[l + 1][child];
            }
            levels[l][prefix] = acc;
            level_prob[l][prefix] = pacc;
        }
    }

    MartingaleReport rep;
    rep.mean_value = levels[0][0];

    // Increment second moments E X_l^2 (X_l lives on prefix level l).
    rep.increment_second_moments.assign(n_edges, 0.0);
    for (std::size_t l = 1; l <= n_edges; ++l) {
        double acc = 0;
        for (std::uint64_t prefix = 0; prefix < level_size[l]; ++prefix) {
            const double x = levels[l][prefix] - levels[l - 1][prefix / radix[l - 1]];
            acc += level_prob[l][prefix] * x * x;
        }
        rep.increment_second_moments[l - 1] = acc;
    }

    // Cross moments E X_i X_j for i < j, evaluated on prefix level j.
    rep.max_cross_moment = 0;
    for (std::size_t j = 2; j <= n_edges; ++j) {
        const std::uint64_t sz = level_size[j];
        for (std::size_t i = 1; i < j; ++i) {
            double acc = 0;
            const std::uint64_t shrink_i = level_size[j] / level_size[i];
            const std::uint64_t shrink_i1 = level_size[j] / level_size[i - 1];
            const std::uint64_t shrink_j1 = radix[j - 1];
            for (std::uint64_t prefix = 0; prefix < sz; ++prefix) {
                const double xi =
                    levels[i][prefix / shrink_i] - levels[i - 1][prefix / shrink_i1];
                const double xj = levels[j][prefix] - levels[j - 1][prefix / shrink_j1];
                acc += level_prob[j][prefix] * xi * xj;
            }
            rep.max_cross_moment = std::max(rep.max_cross_moment, std::abs(acc));
        }
    }

    // Telescoping residual: sum of increments against the centered value.
    rep.telescoping_residual = 0;
    {
        std::vector<std::uint64_t> digits(n_edges, 0);
        for (std::uint64_t idx = 0; idx < n_cfg; ++idx) {
            std::uint64_t rem = idx;
            for (std::size_t i = n_edges; i-- > 0;) {
                digits[i] = rem % radix[i];
                rem /= radix[i];
            }
            double sum = 0;
            std::uint64_t prefix = 0;
            for (std::size_t l = 1; l <= n_edges; ++l) {
                const std::uint64_t parent = prefix;
                prefix = prefix * radix[l - 1] + digits[l - 1];
                sum += levels[l][prefix] - levels[l - 1][parent];
            }
            rep.telescoping_residual = std::max(
                rep.telescoping_residual, std::abs(sum - (value[idx] - rep.mean_value)));
        }
    }

    double var_direct = 0;
    for (std::uint64_t i = 0; i < n_cfg; ++i) {
        const double dev = value[i] - rep.mean_value;
        var_direct += cfg_prob[i] * dev * dev;
    }
    rep.variance_direct = var_direct;
    double var_inc = 0;
    for (double m2 : rep.increment_second_moments) var_inc += m2;
    rep.variance_from_increments = var_inc;

    // Increment bound with the constant 4 * sup E[(truncated weight)^2].
    const double thr = truncation ? truncation->threshold() : kInf;
    double sup_m2 = 0;
    for (const auto& atoms : space.atoms()) {
        double m2 = 0;
        for (const auto& a : atoms) {
            const double v = std::min(a.value, thr);
            m2 += a.prob * v * v;
        }
        sup_m2 = std::max(sup_m2, m2);
    }
    rep.c1 = 4.0 * sup_m2;
    rep.geodesic_membership = membership;
    rep.increment_bound_slack.assign(n_edges, 0.0);
    rep.increment_bound_ok = true;
    for (std::size_t l = 0; l < n_edges; ++l) {
        const double slack = rep.c1 * membership[l] - rep.increment_second_moments[l];
        rep.increment_bound_slack[l] = slack;
        if (slack < -1e-12) rep.increment_bound_ok = false;
    }
    return rep;
}

double exact_event_probability(const DiscreteProductSpace& space,
                               const std::function<bool(std::span<const double>)>& predicate) {
    double sum = 0, comp = 0;
    std::vector<double> w;
    double p;
    for (std::uint64_t i = 0; i < space.config_count(); ++i) {
        space.config(i, w, p);
        if (predicate(w)) {
            const double y = p - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    return sum;
}

}  // namespace fpp::oracle

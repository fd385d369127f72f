#include "fpp/verify.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "fpp/geodesic.hpp"
#include "fpp/oracle.hpp"
#include "fpp/philox.hpp"
#include "fpp/theory.hpp"

namespace fpp::verify {

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

CheckLine check(const std::string& name, bool pass, const std::string& detail = {}) {
    return {name, pass, detail};
}

}  // namespace

bool all_pass(const std::vector<CheckLine>& lines) {
    for (const auto& l : lines) {
        if (!l.pass) return false;
    }
    return true;
}

std::vector<CheckLine> oracle_suite() {
    std::vector<CheckLine> out;
    const DistributionSpec two = DistributionSpec::two_point(1.0, 4.0, 0.5);

    // Radius-1 box: the full product space.
    {
        const LatticeBox box(2, 1);
        const auto space = oracle::DiscreteProductSpace::homogeneous(box, two);
        const VertexId src = box.encode_vertex(origin_coords(2));
        Coords t{};
        t[0] = 1;
        const VertexId tgt = box.encode_vertex(t);
        std::uint64_t value_mismatch = 0, path_mismatch = 0;
        std::vector<double> w;
        double p;
        for (std::uint64_t i = 0; i < space.config_count(); ++i) {
            space.config(i, w, p);
            const auto engine = shortest_passage(box, src, tgt, w, std::nullopt);
            const auto exact = oracle::brute_force_passage(box, src, tgt, w, std::nullopt);
            if (engine.value != exact.value) ++value_mismatch;
            if (!(engine.path == exact.path)) ++path_mismatch;
        }
        out.push_back(check("oracle.m1.exhaustive_values", value_mismatch == 0,
                            std::to_string(space.config_count()) + " configurations, " +
                                std::to_string(value_mismatch) + " value mismatches"));
        out.push_back(check("oracle.m1.exhaustive_paths", path_mismatch == 0,
                            std::to_string(path_mismatch) + " canonical-path mismatches"));
    }

    // Radius-2 box: sampled configurations.
    {
        const LatticeBox box(2, 2);
        const WeightModel model(2, AssignIid{two}, 0x5eedf00dULL);
        const VertexId src = box.encode_vertex(origin_coords(2));
        Coords t{};
        t[0] = 2;
        const VertexId tgt = box.encode_vertex(t);
        std::uint64_t value_mismatch = 0, path_mismatch = 0;
        const int samples = 200;
        for (int r = 0; r < samples; ++r) {
            const Realization real(model, static_cast<std::uint32_t>(r));
            const std::vector<double> w = real.materialize(box);
            const auto engine = shortest_passage(box, src, tgt, w, std::nullopt);
            const auto exact = oracle::brute_force_passage(box, src, tgt, w, std::nullopt);
            if (engine.value != exact.value) ++value_mismatch;
            if (!(engine.path == exact.path)) ++path_mismatch;
        }
        out.push_back(check("oracle.m2.sampled_values", value_mismatch == 0,
                            std::to_string(samples) + " realizations, " +
                                std::to_string(value_mismatch) + " value mismatches"));
        out.push_back(check("oracle.m2.sampled_paths", path_mismatch == 0,
                            std::to_string(path_mismatch) + " canonical-path mismatches"));
    }
    return out;
}

std::vector<CheckLine> martingale_suite() {
    std::vector<CheckLine> out;
    const LatticeBox box(2, 1);
    const VertexId src = box.encode_vertex(origin_coords(2));
    Coords t{};
    t[0] = 1;
    const VertexId tgt = box.encode_vertex(t);

    const auto space =
        oracle::DiscreteProductSpace::homogeneous(box, DistributionSpec::two_point(1.0, 4.0, 0.5));
    out.push_back(check("martingale.space_probability",
                        std::abs(space.total_probability() - 1.0) <= 1e-12,
                        "total probability " + fmt(space.total_probability())));

    struct Variant {
        const char* name;
        std::optional<Truncation> trunc;
    };
    // Truncation level 9 with exponent 1/2 puts the threshold at 3, strictly
    // between the two atom values.
    const Variant variants[] = {{"plain", std::nullopt}, {"truncated", Truncation{9, 0.5}}};
    for (const auto& variant : variants) {
        const auto repmc = oracle::exact_martingale(space, src, tgt, variant.trunc);
        const std::string p = std::string("martingale.") + variant.name + ".";
        out.push_back(check(p + "telescoping", repmc.telescoping_residual <= 1e-9,
                            "residual " + fmt(repmc.telescoping_residual)));
        out.push_back(check(p + "orthogonality", repmc.max_cross_moment <= 1e-9,
                            "max |E Xi Xj| " + fmt(repmc.max_cross_moment)));
        out.push_back(check(
            p + "variance_identity",
            std::abs(repmc.variance_direct - repmc.variance_from_increments) <= 1e-9,
            "direct " + fmt(repmc.variance_direct) + " vs increments " +
                fmt(repmc.variance_from_increments)));
        double min_slack = 0;
        for (double s : repmc.increment_bound_slack) min_slack = std::min(min_slack, s);
        out.push_back(check(p + "increment_bound", repmc.increment_bound_ok,
                            "C1 " + fmt(repmc.c1) + ", min slack " + fmt(min_slack)));
    }

    // Degenerate space: deterministic value, every increment vanishes.
    {
        const auto pm = oracle::DiscreteProductSpace::homogeneous(box, DistributionSpec::point_mass(1.0));
        const auto repmc = oracle::exact_martingale(pm, src, tgt, std::nullopt);
        double max_m2 = 0;
        for (double m2 : repmc.increment_second_moments) max_m2 = std::max(max_m2, m2);
        out.push_back(check("martingale.pointmass_increments_vanish", max_m2 <= 1e-18,
                            "max E Xl^2 " + fmt(max_m2)));
    }
    return out;
}

std::vector<CheckLine> detour_suite() {
    std::vector<CheckLine> out;
    for (int d : {2, 3}) {
        const LatticeBox box(d, 8);
        std::uint64_t bad_count = 0, bad_disjoint = 0, bad_lengths = 0, bad_endpoints = 0;
        const int trials = 100;
        for (int trial = 0; trial < trials; ++trial) {
            // Deterministic pseudo-random edge well inside the box.
            EdgeRef e;
            e.dim = d;
            Philox4x32::Counter ctr = {static_cast<std::uint32_t>(trial), 0, 0,
                                       static_cast<std::uint32_t>(d)};
            const Philox4x32::Counter words = Philox4x32::block(ctr, {0xdecafu, 0xc0ffeeu});
            e.axis = static_cast<int>(words[0] % static_cast<std::uint32_t>(d));
            for (int i = 0; i < d; ++i) {
                const std::uint32_t wrd = Philox4x32::block(
                    {static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(i + 1), 0,
                     static_cast<std::uint32_t>(d)},
                    {0xdecafu, 0xc0ffeeu})[0];
                e.lower[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(wrd % 9) - 4;
            }
            const auto paths = detour_paths(e, box);
            if (static_cast<int>(paths.size()) != 2 * d) ++bad_count;

            std::multiset<std::size_t> lengths;
            for (const auto& p : paths) lengths.insert(p.length());
            std::multiset<std::size_t> want = {1, 9};
            for (int i = 0; i < 2 * d - 2; ++i) want.insert(3);
            if (lengths != want) ++bad_lengths;

            // Pairwise edge-set intersection must be empty.
            std::vector<std::set<std::pair<std::array<std::int32_t, kMaxDim>, int>>> sets;
            for (const auto& p : paths) {
                std::set<std::pair<std::array<std::int32_t, kMaxDim>, int>> s;
                for (const auto& pe : p.edges()) s.insert({pe.lower, pe.axis});
                sets.push_back(std::move(s));
            }
            for (std::size_t i = 0; i < sets.size(); ++i) {
                for (std::size_t j = i + 1; j < sets.size(); ++j) {
                    for (const auto& item : sets[i]) {
                        if (sets[j].count(item)) {
                            ++bad_disjoint;
                            break;
                        }
                    }
                }
            }

            const Coords x = e.lower, y = e.upper();
            for (const auto& p : paths) {
                const bool fwd = p.endpoint_a() == x && p.endpoint_b() == y;
                const bool rev = p.endpoint_a() == y && p.endpoint_b() == x;
                if (!fwd && !rev) ++bad_endpoints;
            }
        }
        const std::string p = "detour.d" + std::to_string(d) + ".";
        out.push_back(check(p + "count", bad_count == 0,
                            std::to_string(trials) + " edges, " + std::to_string(bad_count) +
                                " with wrong path count"));
        out.push_back(check(p + "lengths", bad_lengths == 0,
                            std::to_string(bad_lengths) + " wrong length multisets"));
        out.push_back(check(p + "disjoint", bad_disjoint == 0,
                            std::to_string(bad_disjoint) + " intersecting pairs"));
        out.push_back(check(p + "endpoints", bad_endpoints == 0,
                            std::to_string(bad_endpoints) + " endpoint mismatches"));
    }
    return out;
}

std::vector<CheckLine> constants_suite() {
    std::vector<CheckLine> out;

    {
        const WeightModel m2(2, AssignIid{DistributionSpec::exponential(1.0)}, 1);
        const ModelConstants c2 = ModelConstants::compute(m2);
        out.push_back(check("constants.d2.exponents",
                            c2.alpha == 15.0 / 32.0 && c2.eps0 == 0.125 && c2.delta == 0.25,
                            "alpha " + fmt(c2.alpha) + ", eps0 " + fmt(c2.eps0) + ", delta " +
                                fmt(c2.delta)));
        const WeightModel m3(3, AssignIid{DistributionSpec::exponential(1.0)}, 1);
        const ModelConstants c3 = ModelConstants::compute(m3);
        out.push_back(check("constants.d3.exponents",
                            std::abs(c3.alpha * 48.0 - 23.0) <= 1e-9 &&
                                std::abs(c3.eps0 * 12.0 - 1.0) <= 1e-9 &&
                                std::abs(c3.delta * 6.0 - 1.0) <= 1e-9,
                            "alpha " + fmt(c3.alpha) + ", eps0 " + fmt(c3.eps0) + ", delta " +
                                fmt(c3.delta)));
    }

    {
        const WeightModel pm(2, AssignIid{DistributionSpec::point_mass(1.0)}, 2);
        const Beta1Result b = compute_beta1(pm, 2);
        const double s_expected = (12.0 + std::log(2.0)) / b.eps_star;
        out.push_back(check("constants.pointmass.recipe",
                            std::abs(b.eps_star - 1.0) <= 1e-6 &&
                                std::abs(b.s_star - s_expected) <= 1e-9 &&
                                b.beta1 < 1.0 && b.beta1 > 0,
                            "eps* " + fmt(b.eps_star) + ", s* " + fmt(b.s_star) + ", beta1 " +
                                fmt(b.beta1)));
        const TailCheckResult tail = mc_tail_check(pm, b.beta1, 10, 10000, 99);
        out.push_back(check("constants.pointmass.tail", tail.pass && tail.frequency == 0.0,
                            "frequency " + fmt(tail.frequency)));
    }

    {
        const WeightModel ex(2, AssignIid{DistributionSpec::exponential(1.0)}, 3);
        const Beta1Result b = compute_beta1(ex, 2);
        // Root of 1 - e^{-eps} = e^{-12}/2.
        const double eps_expected = -std::log1p(-std::exp(-12.0) / 2.0);
        out.push_back(check("constants.exponential.recipe",
                            std::abs(b.eps_star - eps_expected) <= 1e-3 * eps_expected &&
                                b.beta1 < 1.0 && b.beta1 > 0 &&
                                std::abs(b.beta1 - 0.99 * 8.0 / b.s_star) <= 1e-12,
                            "eps* " + fmt(b.eps_star) + ", beta1 " + fmt(b.beta1)));
        const TailCheckResult tail = mc_tail_check(ex, b.beta1, 20, 10000, 99);
        out.push_back(check("constants.exponential.tail", tail.pass,
                            "frequency " + fmt(tail.frequency) + " vs bound " + fmt(tail.bound)));
    }

    {
        ModelConstants c;
        c.mu = 1.0;
        c.beta1 = 0.5;
        const auto r1 = box_radius(4, 0.0, c, 1000000);
        ModelConstants unit = c;
        unit.beta1 = 1.0;
        const auto r2 = box_radius(1, 0.0, unit, 1000000);
        const auto r3 = box_radius(8, 3.0, c, 1000);
        out.push_back(check("constants.box_radius",
                            r1.radius == 64 && !r1.capped && r2.radius == 8 && r3.capped &&
                                r3.radius == 1000,
                            "r(4)=" + std::to_string(r1.radius) + " r(1)=" + std::to_string(r2.radius) +
                                " r(8,eps=3) capped=" + (r3.capped ? "true" : "false")));
    }

    {
        const WeightModel mixed(
            2, AssignParity{DistributionSpec::uniform(0.5, 1.5), DistributionSpec::exponential(1.0)}, 4);
        const ModelConstants c = ModelConstants::compute(mixed);
        out.push_back(check("constants.mixed.mu",
                            c.mu == 1.0 && c.sup_second_moment == 2.0 && c.beta1 < c.mu,
                            "mu " + fmt(c.mu) + ", sup m2 " + fmt(c.sup_second_moment) +
                                ", beta1 " + fmt(c.beta1)));
    }
    return out;
}

}  // namespace fpp::verify

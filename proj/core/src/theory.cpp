#include "fpp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fpp/philox.hpp"

namespace fpp {

namespace {

double sup_small_ball(const WeightModel& model, double eps) {
    double s = 0;
    for (const auto& spec : model.distinct_specs()) s = std::max(s, spec.small_ball(eps));
    return s;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace

ConditionReport validate_conditions(const WeightModel& model) {
    ConditionReport rep;
    rep.known = true;
    std::ostringstream detail;

    // Small-ball condition: every supported family has a continuous or
    // stepwise CDF vanishing at 0+ (all supports start at essinf >= 0 and
    // carry no atom at 0), so the sup over assigned families tends to 0.
    rep.no_fast_edges = true;

    double sup_m2 = 0;
    double min_safe_p = std::numeric_limits<double>::infinity();
    for (const auto& spec : model.distinct_specs()) {
        const double m2 = spec.second_moment();
        if (!std::isfinite(m2)) {
            rep.second_moment = false;
            detail << "second moment infinite for " << spec.to_string() << "; ";
            rep.detail = detail.str();
            rep.uniform_square_int = false;
            rep.higher_moment = false;
            return rep;
        }
        sup_m2 = std::max(sup_m2, m2);
        min_safe_p = std::min(min_safe_p, spec.safe_moment_order());
    }
    rep.second_moment = true;
    // Finitely many families with finite second moments: the squares are
    // uniformly integrable.
    rep.uniform_square_int = true;
    if (min_safe_p > 2.0) {
        rep.higher_moment = true;
        rep.higher_moment_p = min_safe_p;
    } else {
        rep.higher_moment = false;
        rep.higher_moment_p = 0.0;
        detail << "no moment order above 2 with safety margin (limit " << fmt(min_safe_p) << "); ";
    }
    detail << "sup second moment " << fmt(sup_m2);
    rep.detail = detail.str();
    return rep;
}

Beta1Result compute_beta1(const WeightModel& model, int dim) {
    double mu = 0;
    for (const auto& spec : model.distinct_specs()) mu = std::max(mu, spec.mean());
    if (!(mu > 0) || !std::isfinite(mu)) {
        throw std::invalid_argument("compute_beta1: model mean must be positive and finite");
    }
    const double target = std::exp(-6.0 * dim) / 2.0;

    if (sup_small_ball(model, 1e-12) >= target) {
        throw std::domain_error("compute_beta1: no usable small-ball scale above 1e-12; model rejected");
    }
    double lo = 1e-12;
    double hi = 1.0 + 2.0 * mu;
    double eps_star;
    if (sup_small_ball(model, hi) < target) {
        eps_star = hi;
    } else {
        for (int it = 0; it < 128; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (sup_small_ball(model, mid) < target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        eps_star = lo;
    }
    const double s_star = (6.0 * dim + std::log(2.0)) / eps_star;
    const double beta1 = std::min(0.99 * 4.0 * dim / s_star, 0.99 * mu);

    Beta1Result r;
    r.beta1 = beta1;
    r.s_star = s_star;
    r.eps_star = eps_star;
    return r;
}

double default_alpha(int dim) { return (8.0 * dim - 1.0) / (16.0 * dim); }

ModelConstants ModelConstants::compute(const WeightModel& model) {
    const int d = model.dim();
    ModelConstants c;
    for (const auto& spec : model.distinct_specs()) {
        c.mu = std::max(c.mu, spec.mean());
        c.sup_second_moment = std::max(c.sup_second_moment, spec.second_moment());
    }
    c.essinf = std::numeric_limits<double>::infinity();
    for (const auto& spec : model.distinct_specs()) c.essinf = std::min(c.essinf, spec.essinf());

    const Beta1Result b = compute_beta1(model, d);
    c.beta1 = b.beta1;
    c.s_star = b.s_star;
    c.eps_star = b.eps_star;

    c.alpha = default_alpha(d);
    c.eps0 = 1.0 / (4.0 * d);
    c.delta = 1.0 / (2.0 * d);

    // Diagnostic union-bound chain: 2d e^{-d} <= 2 e^{-1} gives a per-edge
    // rate, scaled by the minimal long-path length 8 mu / beta1.
    const double beta22 = d - std::log(2.0 * d);
    c.beta2 = beta22 * 8.0 * c.mu / c.beta1;
    c.c2 = 1.0 / (1.0 - std::exp(-beta22));
    return c;
}

std::string ModelConstants::to_key_values() const {
    std::ostringstream os;
    os << "mu = " << fmt(mu) << "\n"
       << "sup_second_moment = " << fmt(sup_second_moment) << "\n"
       << "beta1 = " << fmt(beta1) << "\n"
       << "s_star = " << fmt(s_star) << "\n"
       << "eps_star = " << fmt(eps_star) << "\n"
       << "beta2 = " << fmt(beta2) << "\n"
       << "c2 = " << fmt(c2) << "\n"
       << "alpha = " << fmt(alpha) << "\n"
       << "eps0 = " << fmt(eps0) << "\n"
       << "delta = " << fmt(delta) << "\n"
       << "essinf = " << fmt(essinf) << "\n";
    return os.str();
}

BoxRadiusResult box_radius(std::int64_t n, double eps, const ModelConstants& c, std::int64_t cap) {
    if (n < 1) throw std::invalid_argument("box_radius: n must be >= 1");
    if (eps < 0) throw std::invalid_argument("box_radius: eps must be >= 0");
    const double raw = 8.0 * c.mu / c.beta1 * std::pow(static_cast<double>(n), 1.0 + eps);
    BoxRadiusResult r;
    if (raw > static_cast<double>(cap)) {
        r.radius = cap;
        r.capped = true;
    } else {
        r.radius = static_cast<std::int64_t>(std::ceil(raw));
        r.capped = false;
    }
    return r;
}

TailCheckResult mc_tail_check(const WeightModel& model, double beta1, int m, std::int64_t paths,
                              std::uint64_t seed) {
    const int d = model.dim();
    TailCheckResult res;
    res.paths = paths;
    res.bound = std::exp(-2.0 * d * m);

    // Monotone staircase paths are self-avoiding by construction. Per path,
    // one stream of the generator drives the axis choices and a fresh
    // replication index drives the edge weights.
    std::int64_t hits = 0;
    for (std::int64_t p = 0; p < paths; ++p) {
        Coords pos{};
        double total = 0;
        for (int step = 0; step < m; ++step) {
            Philox4x32::Counter ctr = {static_cast<std::uint32_t>(p),
                                       static_cast<std::uint32_t>(p >> 32),
                                       static_cast<std::uint32_t>(step), 0x7a11u};
            Philox4x32::Key key = {static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32)};
            const double u = Philox4x32::uniform01(ctr, key);
            const int axis = std::min(d - 1, static_cast<int>(u * d));
            EdgeRef e;
            e.dim = d;
            e.axis = axis;
            e.lower = pos;
            total += model.sample(e, static_cast<std::uint32_t>(0x54A1'0000u + p % 0x0FFF'FFFF));
            pos[static_cast<std::size_t>(axis)] += 1;
        }
        if (total <= beta1 * m) ++hits;
    }
    res.frequency = static_cast<double>(hits) / static_cast<double>(paths);
    res.stderr_freq = std::sqrt(res.frequency * (1.0 - res.frequency) / static_cast<double>(paths));
    res.pass = res.frequency <= res.bound + 3.0 * res.stderr_freq;
    return res;
}

}  // namespace fpp

#include "fpp/weights.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fpp/philox.hpp"

namespace fpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Adaptive Simpson on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fb, double fm, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) throw std::runtime_error("laplace_transform: quadrature did not converge");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fb, fm, whole, tol, 60);
}

std::string fmt_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

DistributionSpec DistributionSpec::point_mass(double c) {
    require(c > 0, "pointmass: c must be > 0");
    return {Family::PointMass, c, 0, 0};
}

DistributionSpec DistributionSpec::uniform(double a, double b) {
    require(a >= 0 && b > a, "uniform: need 0 <= a < b");
    return {Family::Uniform, a, b, 0};
}

DistributionSpec DistributionSpec::exponential(double rate) {
    require(rate > 0, "exponential: rate must be > 0");
    return {Family::Exponential, rate, 0, 0};
}

DistributionSpec DistributionSpec::pareto(double shape, double scale) {
    require(shape > 0, "pareto: shape must be > 0");
    require(scale > 0, "pareto: scale must be > 0");
    return {Family::Pareto, shape, scale, 0};
}

DistributionSpec DistributionSpec::two_point(double v1, double v2, double p) {
    require(v1 > 0 && v2 > v1, "twopoint: need 0 < v1 < v2");
    require(p > 0 && p < 1, "twopoint: need p in (0,1)");
    return {Family::TwoPoint, v1, v2, p};
}

double DistributionSpec::mean() const {
    switch (family_) {
        case Family::PointMass: return params_[0];
        case Family::Uniform: return 0.5 * (params_[0] + params_[1]);
        case Family::Exponential: return 1.0 / params_[0];
        case Family::Pareto: {
            const double a = params_[0], xm = params_[1];
            return a > 1 ? a * xm / (a - 1) : kInf;
        }
        case Family::TwoPoint: return params_[2] * params_[0] + (1 - params_[2]) * params_[1];
    }
    return 0;
}

double DistributionSpec::second_moment() const {
    switch (family_) {
        case Family::PointMass: return params_[0] * params_[0];
        case Family::Uniform: {
            const double a = params_[0], b = params_[1];
            return (a * a + a * b + b * b) / 3.0;
        }
        case Family::Exponential: return 2.0 / (params_[0] * params_[0]);
        case Family::Pareto: {
            const double a = params_[0], xm = params_[1];
            return a > 2 ? a * xm * xm / (a - 2) : kInf;
        }
        case Family::TwoPoint: {
            const double v1 = params_[0], v2 = params_[1], p = params_[2];
            return p * v1 * v1 + (1 - p) * v2 * v2;
        }
    }
    return 0;
}

double DistributionSpec::safe_moment_order() const {
    if (family_ == Family::Pareto) return params_[0] - 0.1;
    return kInf;
}

double DistributionSpec::laplace_transform(double s) const {
    require(s > 0, "laplace_transform: s must be > 0");
    switch (family_) {
        case Family::PointMass: return std::exp(-s * params_[0]);
        case Family::Uniform: {
            const double a = params_[0], b = params_[1];
            // (e^{-sa} - e^{-sb}) / (s (b - a)), stable via expm1
            return std::exp(-s * a) * (-std::expm1(-s * (b - a))) / (s * (b - a));
        }
        case Family::Exponential: {
            const double lam = params_[0];
            return lam / (lam + s);
        }
        case Family::Pareto: {
            // substitute v = scale/t: E e^{-sT} = shape * int_0^1 e^{-s*scale/v} v^{shape-1} dv
            const double a = params_[0], xm = params_[1];
            auto f = [&](double v) {
                if (v <= 0) return 0.0;
                return std::exp(-s * xm / v) * std::pow(v, a - 1.0);
            };
            const double val = a * integrate(f, 0.0, 1.0, 1e-12);
            return std::min(1.0, std::max(0.0, val));
        }
        case Family::TwoPoint: {
            const double v1 = params_[0], v2 = params_[1], p = params_[2];
            return p * std::exp(-s * v1) + (1 - p) * std::exp(-s * v2);
        }
    }
    return 0;
}

double DistributionSpec::small_ball(double eps) const {
    require(eps > 0, "small_ball: eps must be > 0");
    switch (family_) {
        case Family::PointMass: return eps <= params_[0] ? 0.0 : 1.0;
        case Family::Uniform: {
            const double a = params_[0], b = params_[1];
            if (eps <= a) return 0.0;
            if (eps >= b) return 1.0;
            return (eps - a) / (b - a);
        }
        case Family::Exponential: return -std::expm1(-params_[0] * eps);
        case Family::Pareto: {
            const double a = params_[0], xm = params_[1];
            if (eps <= xm) return 0.0;
            return 1.0 - std::pow(xm / eps, a);
        }
        case Family::TwoPoint: {
            const double v1 = params_[0], v2 = params_[1], p = params_[2];
            if (eps <= v1) return 0.0;
            if (eps <= v2) return p;
            return 1.0;
        }
    }
    return 0;
}

double DistributionSpec::essinf() const {
    switch (family_) {
        case Family::PointMass: return params_[0];
        case Family::Uniform: return params_[0];
        case Family::Exponential: return 0.0;
        case Family::Pareto: return params_[1];
        case Family::TwoPoint: return params_[0];
    }
    return 0;
}

double DistributionSpec::quantile(double u) const {
    switch (family_) {
        case Family::PointMass: return params_[0];
        case Family::Uniform: return params_[0] + u * (params_[1] - params_[0]);
        case Family::Exponential: return -std::log1p(-u) / params_[0];
        case Family::Pareto: return params_[1] * std::pow(1.0 - u, -1.0 / params_[0]);
        case Family::TwoPoint: return u < params_[2] ? params_[0] : params_[1];
    }
    return 0;
}

std::string DistributionSpec::to_string() const {
    std::ostringstream os;
    switch (family_) {
        case Family::PointMass: os << "pointmass(" << fmt_num(params_[0]) << ")"; break;
        case Family::Uniform: os << "uniform(" << fmt_num(params_[0]) << "," << fmt_num(params_[1]) << ")"; break;
        case Family::Exponential: os << "exponential(" << fmt_num(params_[0]) << ")"; break;
        case Family::Pareto: os << "pareto(" << fmt_num(params_[0]) << "," << fmt_num(params_[1]) << ")"; break;
        case Family::TwoPoint:
            os << "twopoint(" << fmt_num(params_[0]) << "," << fmt_num(params_[1]) << ","
               << fmt_num(params_[2]) << ")";
            break;
    }
    return os.str();
}

DistributionSpec DistributionSpec::parse(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw std::invalid_argument("distribution: expected name(args): " + text);
    }
    std::string name = text.substr(0, open);
    std::string body = text.substr(open + 1, close - open - 1);
    // trim
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    name = trim(name);
    std::vector<double> args;
    std::istringstream is(body);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) throw std::invalid_argument("distribution: empty argument in " + text);
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("distribution: bad number '" + tok + "'");
        args.push_back(v);
    }
    auto want = [&](std::size_t n) {
        if (args.size() != n) {
            throw std::invalid_argument("distribution " + name + ": expected " + std::to_string(n) +
                                        " arguments, got " + std::to_string(args.size()));
        }
    };
    if (name == "pointmass") { want(1); return point_mass(args[0]); }
    if (name == "uniform") { want(2); return uniform(args[0], args[1]); }
    if (name == "exponential") { want(1); return exponential(args[0]); }
    if (name == "pareto") { want(2); return pareto(args[0], args[1]); }
    if (name == "twopoint") { want(3); return two_point(args[0], args[1], args[2]); }
    throw std::invalid_argument("distribution: unknown family '" + name + "'");
}

double truncate_weight(double t, std::int64_t k, double alpha) {
    if (t < 0) throw std::invalid_argument("truncate_weight: negative weight");
    if (k < 1) throw std::invalid_argument("truncate_weight: k must be >= 1");
    return std::min(t, std::pow(static_cast<double>(k), alpha));
}

double Truncation::threshold() const { return std::pow(static_cast<double>(k), alpha); }

namespace {

int parity_of(const EdgeRef& e) {
    std::int64_t s = 0;
    for (int i = 0; i < e.dim; ++i) s += e.lower[static_cast<std::size_t>(i)];
    return static_cast<int>(((s % 2) + 2) % 2);
}

std::uint32_t zigzag(std::int64_t v) {
    return static_cast<std::uint32_t>(v >= 0 ? 2 * v : -2 * v - 1);
}

}  // namespace

WeightModel::WeightModel(int dim, AssignmentRule rule, std::uint64_t master_seed)
    : dim_(dim), rule_(std::move(rule)), master_seed_(master_seed) {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("WeightModel: dim out of range");
    if (const auto* ax = std::get_if<AssignAxis>(&rule_)) {
        if (static_cast<int>(ax->per_axis.size()) != dim) {
            throw std::invalid_argument("WeightModel: axis rule needs one distribution per axis");
        }
    }
    if (const auto* tb = std::get_if<AssignTable>(&rule_)) {
        if (static_cast<int>(tb->table.size()) != dim) {
            throw std::invalid_argument("WeightModel: table rule needs one row per axis");
        }
    }
    auto add = [this](const DistributionSpec& s) {
        for (const auto& t : distinct_) {
            if (t == s) return;
        }
        distinct_.push_back(s);
    };
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, AssignIid>) {
                add(r.dist);
            } else if constexpr (std::is_same_v<T, AssignAxis>) {
                for (const auto& s : r.per_axis) add(s);
            } else if constexpr (std::is_same_v<T, AssignParity>) {
                add(r.even);
                add(r.odd);
            } else {
                for (const auto& row : r.table) {
                    add(row[0]);
                    add(row[1]);
                }
            }
        },
        rule_);
}

const DistributionSpec& WeightModel::spec_for(const EdgeRef& e) const {
    if (e.dim != dim_ || e.axis < 0 || e.axis >= dim_) {
        throw std::invalid_argument("spec_for: edge does not belong to this model's lattice");
    }
    return std::visit(
        [&](const auto& r) -> const DistributionSpec& {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, AssignIid>) {
                return r.dist;
            } else if constexpr (std::is_same_v<T, AssignAxis>) {
                return r.per_axis[static_cast<std::size_t>(e.axis)];
            } else if constexpr (std::is_same_v<T, AssignParity>) {
                return parity_of(e) == 0 ? r.even : r.odd;
            } else {
                return r.table[static_cast<std::size_t>(e.axis)][static_cast<std::size_t>(parity_of(e))];
            }
        },
        rule_);
}

std::int64_t WeightModel::max_coordinate() const {
    const int bits = 88 / dim_;
    return (std::int64_t{1} << (bits - 1)) - 2;
}

double WeightModel::sample(const EdgeRef& e, std::uint32_t replication) const {
    const DistributionSpec& spec = spec_for(e);
    // Pack (axis, zigzag coordinates) injectively into the 96 counter bits
    // not taken by the replication index.
    const int bits = 88 / dim_;
    const std::int64_t maxc = max_coordinate();
    unsigned __int128 packed = static_cast<unsigned>(e.axis);
    for (int i = 0; i < dim_; ++i) {
        const std::int64_t c = e.lower[static_cast<std::size_t>(i)];
        if (c < -maxc || c > maxc) {
            throw std::out_of_range("sample: coordinate exceeds the seeding range at this dimension");
        }
        packed = (packed << bits) | zigzag(c);
    }
    Philox4x32::Counter ctr = {replication, static_cast<std::uint32_t>(packed),
                               static_cast<std::uint32_t>(packed >> 32),
                               static_cast<std::uint32_t>(packed >> 64)};
    Philox4x32::Key key = {static_cast<std::uint32_t>(master_seed_),
                           static_cast<std::uint32_t>(master_seed_ >> 32)};
    return spec.quantile(Philox4x32::uniform01(ctr, key));
}

std::string WeightModel::rule_to_string() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, AssignIid>) {
                os << "iid " << r.dist.to_string();
            } else if constexpr (std::is_same_v<T, AssignAxis>) {
                os << "axis";
                for (std::size_t i = 0; i < r.per_axis.size(); ++i) {
                    os << " axis" << i << "=" << r.per_axis[i].to_string();
                }
            } else if constexpr (std::is_same_v<T, AssignParity>) {
                os << "parity even=" << r.even.to_string() << " odd=" << r.odd.to_string();
            } else {
                os << "table";
                for (std::size_t i = 0; i < r.table.size(); ++i) {
                    os << " axis" << i << ".even=" << r.table[i][0].to_string() << " axis" << i
                       << ".odd=" << r.table[i][1].to_string();
                }
            }
        },
        rule_);
    return os.str();
}

std::vector<double> Realization::materialize(const LatticeBox& box) const {
    std::vector<double> w;
    materialize_into(box, w);
    return w;
}

void Realization::materialize_into(const LatticeBox& box, std::vector<double>& out) const {
    if (box.dim() != model_->dim()) throw std::invalid_argument("materialize: dimension mismatch");
    const std::int64_t n = box.edge_count();
    out.resize(static_cast<std::size_t>(n));
    for (std::int64_t id = 0; id < n; ++id) {
        out[static_cast<std::size_t>(id)] = model_->sample(box.decode_edge(id), replication_);
    }
}

}  // namespace fpp

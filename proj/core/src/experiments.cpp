#include "fpp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fpp/geodesic.hpp"

namespace fpp {

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double pairwise_sum_impl(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum_impl(xs.subspan(0, half)) + pairwise_sum_impl(xs.subspan(half));
}

double mean_of(std::span<const double> xs) {
    return pairwise_sum_impl(xs) / static_cast<double>(xs.size());
}

// Sample variance (n-1 denominator) plus its standard error via the fourth
// central moment.
struct VarStats {
    double var = 0;
    double se_var = 0;
};

VarStats variance_of(std::span<const double> xs, double mean) {
    const auto n = static_cast<double>(xs.size());
    std::vector<double> sq(xs.size()), quad(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - mean;
        sq[i] = d * d;
        quad[i] = d * d * d * d;
    }
    VarStats v;
    const double m2 = pairwise_sum_impl(sq) / n;
    const double m4 = pairwise_sum_impl(quad) / n;
    v.var = (xs.size() > 1) ? m2 * n / (n - 1.0) : 0.0;
    const double var_of_var = std::max(0.0, m4 - m2 * m2) / n;
    v.se_var = std::sqrt(var_of_var);
    return v;
}

std::array<double, 5> quantiles_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    auto pick = [&](double q) {
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(xs.size() - 1));
        return xs[idx];
    };
    return {xs.front(), pick(0.25), pick(0.5), pick(0.75), xs.back()};
}

double freq_of(std::span<const char> flags) {
    std::int64_t hits = 0;
    for (char f : flags) hits += f;
    return static_cast<double>(hits) / static_cast<double>(flags.size());
}

void parallel_for(std::int64_t count, int workers, const std::function<void(std::int64_t)>& fn) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<std::int64_t>(workers, count);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct RepRecord {
    double t_plain = 0, t_trunc = 0;
    double straight_raw = 0;
    double len_plain = 0, len_trunc = 0;
    char cert_both = 0;
    char a_c = 0, v_c = 0, g_c = 0, w_c = 0;
    char em_witness = 0;
    double that_hi = 0;
    double that_kmid_kmid = 0;
    double that_kmid_n = 0;
    double i_value = 0;
    double lip_ratio = 0;
    char lip_violation = 0;
    char i_negative = 0;
};

std::int64_t isqrt64(std::int64_t n) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

}  // namespace

double pairwise_sum(std::span<const double> xs) { return pairwise_sum_impl(xs); }

EventSelection EventSelection::parse(const std::string& text) {
    EventSelection ev;
    if (text == "all") return ev;
    ev = {false, false, false, false};
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok == "a") ev.a = true;
        else if (tok == "v") ev.v = true;
        else if (tok == "w") ev.w = true;
        else if (tok == "g") ev.g = true;
        else throw std::invalid_argument("events: unknown token '" + tok + "' (want all or a,v,w,g)");
    }
    return ev;
}

std::string EventSelection::to_string() const {
    if (a && v && w && g) return "all";
    std::string s;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!s.empty()) s += ',';
        s += name;
    };
    add(a, "a");
    add(v, "v");
    add(w, "w");
    add(g, "g");
    return s;
}

void ExperimentPlan::validate() const {
    std::vector<std::string> problems;
    if (n_list.empty()) problems.push_back("plan: n list is empty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1) problems.push_back("plan: n values must be >= 1");
        if (i > 0 && n_list[i] <= n_list[i - 1]) {
            problems.push_back("plan: n list must be strictly increasing");
            break;
        }
    }
    if (replications < 2) problems.push_back("plan: replications must be >= 2");
    for (std::int64_t q : squares) {
        const std::int64_t r = isqrt64(q);
        if (r * r != q || r < 2) {
            problems.push_back("plan: squares entries must be perfect squares >= 4 (got " +
                               std::to_string(q) + ")");
        }
        if (std::find(n_list.begin(), n_list.end(), q) == n_list.end()) {
            problems.push_back("plan: squares entry " + std::to_string(q) + " missing from n list");
        }
    }
    if (alpha && !(*alpha > 0 && *alpha < 1)) problems.push_back("plan: alpha must lie in (0,1)");
    if (box.eps < 0) problems.push_back("plan: box eps must be >= 0");
    if (!n_list.empty() && box.radius_cap < n_list.back()) {
        problems.push_back("plan: box radius cap makes the farthest target unreachable");
    }
    if (!problems.empty()) {
        std::string all;
        for (const auto& p : problems) {
            if (!all.empty()) all += "; ";
            all += p;
        }
        throw std::invalid_argument(all);
    }
}

ExperimentReport run_plan(const ExperimentPlan& plan) {
    plan.validate();
    const ConditionReport cond = validate_conditions(plan.model);
    if (!cond.accept()) {
        throw std::invalid_argument("model rejected: " + cond.detail);
    }
    const int d = plan.model.dim();
    const ModelConstants constants = ModelConstants::compute(plan.model);
    const double alpha = plan.alpha.value_or(default_alpha(d));
    const double mu = constants.mu;
    const double beta1 = constants.beta1;
    const double growth = 8.0 * mu / beta1;

    ExperimentReport rep;
    rep.constants = constants;
    rep.seed = plan.model.master_seed();
    rep.model_desc = plan.model.rule_to_string();
    rep.dim = d;
    rep.events = plan.events;
    rep.replications = plan.replications;

    for (const std::int64_t n : plan.n_list) {
        // Box policy: plain 4n boxes unless a positive growth-constant cap
        // admits the theoretical radius.
        double formula = 0;
        bool capped = true;
        if (plan.box.c_cap > 0) {
            const double c_eff = std::min(growth, plan.box.c_cap);
            capped = growth > plan.box.c_cap;
            formula = std::ceil(c_eff * std::pow(static_cast<double>(n), 1.0 + plan.box.eps));
        }
        std::int64_t radius = std::max<std::int64_t>(4 * n, static_cast<std::int64_t>(formula));
        if (radius > plan.box.radius_cap) {
            radius = plan.box.radius_cap;
            capped = true;
        }
        if (radius < n) throw std::invalid_argument("box cap makes target unreachable at n=" + std::to_string(n));

        const LatticeBox box(d, radius);
        const VertexId source = box.encode_vertex(origin_coords(d));
        Coords tc{};
        tc[0] = static_cast<std::int32_t>(n);
        const VertexId target = box.encode_vertex(tc);

        const bool is_square_row =
            plan.events.w && std::find(plan.squares.begin(), plan.squares.end(), n) != plan.squares.end();
        const std::int64_t root = isqrt64(n);
        const std::int64_t level_hi = (root + 1) * (root + 1);
        const std::int64_t k_mid = n + (level_hi - n) / 2;

        const Truncation trunc_n{n, alpha};
        const double r0 = growth * std::pow(static_cast<double>(n), 1.0 + constants.eps0);
        const double essinf_trunc = std::min(constants.essinf, trunc_n.threshold());

        std::vector<RepRecord> slots(static_cast<std::size_t>(plan.replications));
        parallel_for(plan.replications, plan.workers, [&](std::int64_t r) {
            thread_local std::vector<double> weights;
            const Realization real(plan.model, static_cast<std::uint32_t>(r));
            real.materialize_into(box, weights);

            RepRecord rec;
            const GeodesicResult plain = shortest_passage(box, source, target, weights, std::nullopt);
            const GeodesicResult trunc = shortest_passage(box, source, target, weights, trunc_n);
            rec.t_plain = plain.value;
            rec.t_trunc = trunc.value;
            rec.len_plain = static_cast<double>(plain.length);
            rec.len_trunc = static_cast<double>(trunc.length);

            double straight = 0;
            for (std::int64_t i = 1; i <= n; ++i) {
                straight += weights[static_cast<std::size_t>(box.encode_edge(axis_edge(i, box)))];
            }
            rec.straight_raw = straight;
            rec.a_c = straight > 2.0 * mu * static_cast<double>(n);
            rec.v_c = plain.value != trunc.value;
            const bool cert_plain = certify_global(box, source, plain.value, constants.essinf);
            const bool cert_trunc = certify_global(box, source, trunc.value, essinf_trunc);
            rec.cert_both = cert_plain && cert_trunc;
            rec.em_witness = plain.value < beta1 * rec.len_plain &&
                             rec.len_plain >= growth * static_cast<double>(n);

            bool escaped = false;
            for (const auto& v : trunc.path.vertices()) {
                for (int i = 0; i < d; ++i) {
                    if (std::abs(static_cast<double>(v[static_cast<std::size_t>(i)])) > r0) {
                        escaped = true;
                        break;
                    }
                }
                if (escaped) break;
            }
            rec.g_c = escaped;

            if (is_square_row) {
                rec.that_hi = shortest_passage_value(box, source, target, weights,
                                                     Truncation{level_hi, alpha});
                rec.w_c = rec.that_hi != rec.t_trunc;
                rec.i_value = rec.that_hi - rec.t_trunc;
                rec.i_negative = rec.i_value < 0;
                Coords kc{};
                kc[0] = static_cast<std::int32_t>(k_mid);
                const VertexId ktarget = box.encode_vertex(kc);
                const Truncation trunc_k{k_mid, alpha};
                rec.that_kmid_kmid = shortest_passage_value(box, source, ktarget, weights, trunc_k);
                rec.that_kmid_n = shortest_passage_value(box, source, target, weights, trunc_k);
                const double gap = std::abs(rec.that_kmid_kmid - rec.that_kmid_n);
                const double bound = trunc_k.threshold() * static_cast<double>(k_mid - n);
                rec.lip_ratio = gap / bound;
                rec.lip_violation = gap > bound * (1.0 + 1e-12) + 1e-12;
            }
            slots[static_cast<std::size_t>(r)] = rec;
        });

        // Aggregation in slot order; all sums are pairwise and independent
        // of worker scheduling.
        const auto R = static_cast<std::size_t>(plan.replications);
        std::vector<double> t_plain(R), t_trunc(R), len_plain(R), len_trunc(R), t_over_n(R),
            t_over_n_sq(R);
        std::vector<char> a_c(R), v_c(R), g_c(R), w_c(R), cert(R), em(R);
        for (std::size_t i = 0; i < R; ++i) {
            const RepRecord& rec = slots[i];
            t_plain[i] = rec.t_plain;
            t_trunc[i] = rec.t_trunc;
            len_plain[i] = rec.len_plain;
            len_trunc[i] = rec.len_trunc;
            t_over_n[i] = rec.t_plain / static_cast<double>(n);
            t_over_n_sq[i] = t_over_n[i] * t_over_n[i];
            a_c[i] = rec.a_c;
            v_c[i] = rec.v_c;
            g_c[i] = rec.g_c;
            w_c[i] = rec.w_c;
            cert[i] = rec.cert_both;
            em[i] = rec.em_witness;
        }

        RowStats row;
        row.n = n;
        row.reps = plan.replications;
        row.mean_T = mean_of(t_plain);
        const VarStats vt = variance_of(t_plain, row.mean_T);
        row.var_T = vt.var;
        row.se_var_T = vt.se_var;
        row.se_T = std::sqrt(vt.var / static_cast<double>(R));
        row.mean_That = mean_of(t_trunc);
        row.var_That = variance_of(t_trunc, row.mean_That).var;
        row.freq_Ac = freq_of(a_c);
        row.freq_Vnc = freq_of(v_c);
        std::int64_t vnc_total = 0, vnc_certified = 0;
        for (std::size_t i = 0; i < R; ++i) {
            if (v_c[i]) {
                ++vnc_total;
                if (cert[i]) ++vnc_certified;
            }
        }
        row.vnc_certified_share =
            vnc_total ? static_cast<double>(vnc_certified) / static_cast<double>(vnc_total) : 0.0;
        row.has_w = is_square_row;
        row.freq_Wnc = is_square_row ? freq_of(w_c) : 0.0;
        row.freq_Gnc = freq_of(g_c);
        row.mean_len = mean_of(len_plain);
        row.se_len = std::sqrt(variance_of(len_plain, row.mean_len).var / static_cast<double>(R));
        row.cert_rate = freq_of(cert);
        row.box_radius = radius;
        row.box_capped = capped;
        row.mean_len_trunc = mean_of(len_trunc);
        row.max_len = *std::max_element(len_plain.begin(), len_plain.end());
        row.em_witness_freq = freq_of(em);
        row.second_moment_emp = mean_of(t_over_n_sq);
        // Closed-form straight-line bound: E (sum_i t(f_i))^2 / n^2 from the
        // per-edge moments (edges on the first axis are independent).
        {
            double sum_mean = 0, sum_var = 0;
            LatticeBox probe(d, std::max<std::int64_t>(n, 1));
            for (std::int64_t i = 1; i <= n; ++i) {
                const DistributionSpec& s = plan.model.spec_for(axis_edge(i, probe));
                sum_mean += s.mean();
                sum_var += s.variance();
            }
            row.second_moment_bound =
                (sum_var + sum_mean * sum_mean) / (static_cast<double>(n) * static_cast<double>(n));
        }
        row.t_over_n_quantiles = quantiles_of(t_over_n);
        rep.rows.push_back(row);

        if (is_square_row) {
            SquareDiagnostics diag;
            diag.n = n;
            diag.level_hi = level_hi;
            diag.k_mid = k_mid;
            std::vector<double> ivals(R), s_over_n(R), dprox(R);
            std::vector<char> ipos(R);
            const double mean_that = row.mean_That;
            std::vector<double> kk(R);
            for (std::size_t i = 0; i < R; ++i) kk[i] = slots[i].that_kmid_kmid;
            const double mean_kk = mean_of(kk);
            for (std::size_t i = 0; i < R; ++i) {
                const RepRecord& rec = slots[i];
                ivals[i] = rec.i_value;
                ipos[i] = rec.i_value > 0;
                diag.i_negative += rec.i_negative;
                diag.lipschitz_violations += rec.lip_violation;
                diag.lipschitz_max_ratio = std::max(diag.lipschitz_max_ratio, rec.lip_ratio);
                const double s_q = rec.t_trunc - mean_that;
                const double s_k = rec.that_kmid_kmid - mean_kk;
                s_over_n[i] = s_q / static_cast<double>(n);
                dprox[i] = std::abs(s_k - s_q) / static_cast<double>(n);
            }
            diag.freq_I_pos = freq_of(ipos);
            diag.mean_I = mean_of(ivals);
            diag.max_I = *std::max_element(ivals.begin(), ivals.end());
            diag.d_proxy_mean = mean_of(dprox);
            diag.d_proxy_max = *std::max_element(dprox.begin(), dprox.end());
            diag.s_over_n_quantiles = quantiles_of(s_over_n);
            rep.diagnostics.push_back(diag);
        }
    }

    if (plan.model.is_iid()) {
        rep.mu_f = estimate_mu_f(plan, rep.rows, constants);
    }
    return rep;
}

MuFEstimate estimate_mu_f(const ExperimentPlan& plan, const std::vector<RowStats>& rows,
                          const ModelConstants& constants) {
    if (!plan.model.is_iid()) {
        throw std::invalid_argument("estimate_mu_f: model is not iid");
    }
    MuFEstimate est;
    est.available = true;
    const RowStats& last = rows.back();
    est.estimate = last.mean_T / static_cast<double>(last.n);
    est.se = last.se_T / static_cast<double>(last.n);
    est.ci_lo = est.estimate - 3.0 * est.se;
    est.ci_hi = est.estimate + 3.0 * est.se;
    for (const auto& r : rows) est.per_n_means.push_back(r.mean_T / static_cast<double>(r.n));
    est.bracket_ok = est.estimate >= constants.beta1 / 4.0 &&
                     est.estimate <= constants.mu + 3.0 * est.se;
    return est;
}

void write_table_csv(const ExperimentReport& rep, std::ostream& os) {
    os << "# fpplab table v1\n";
    os << "# seed = " << rep.seed << "\n";
    os << "# config_hash = " << rep.config_hash << "\n";
    os << "# constants: mu=" << fmt(rep.constants.mu) << " beta1=" << fmt(rep.constants.beta1)
       << " alpha=" << fmt(rep.constants.alpha) << " eps0=" << fmt(rep.constants.eps0)
       << " delta=" << fmt(rep.constants.delta) << " essinf=" << fmt(rep.constants.essinf) << "\n";
    os << "n,reps,mean_T,se_T,var_T,mean_That,var_That,freq_Ac,freq_Vnc,"
          "freq_Vnc_certified_share,freq_Wnc,freq_Gnc,mean_len,se_len,cert_rate\n";
    for (const auto& r : rep.rows) {
        os << r.n << ',' << r.reps << ',' << fmt(r.mean_T) << ',' << fmt(r.se_T) << ','
           << fmt(r.var_T) << ',' << fmt(r.mean_That) << ',' << fmt(r.var_That) << ',';
        os << (rep.events.a ? fmt(r.freq_Ac) : std::string{}) << ',';
        os << (rep.events.v ? fmt(r.freq_Vnc) : std::string{}) << ',';
        os << (rep.events.v ? fmt(r.vnc_certified_share) : std::string{}) << ',';
        os << (r.has_w ? fmt(r.freq_Wnc) : std::string{}) << ',';
        os << (rep.events.g ? fmt(r.freq_Gnc) : std::string{}) << ',';
        os << fmt(r.mean_len) << ',' << fmt(r.se_len) << ',' << fmt(r.cert_rate) << "\n";
    }
}

void write_summary(const ExperimentReport& rep, std::ostream& os) {
    os << "format = fpplab-summary-v1\n";
    os << "seed = " << rep.seed << "\n";
    os << "config_hash = " << rep.config_hash << "\n";
    os << "dim = " << rep.dim << "\n";
    os << "model = " << rep.model_desc << "\n";
    os << "replications = " << rep.replications << "\n";
    os << "events = " << rep.events.to_string() << "\n";
    os << "\n[constants]\n" << rep.constants.to_key_values();
    for (const auto& r : rep.rows) {
        os << "\n[row n=" << r.n << "]\n";
        os << "box_radius = " << r.box_radius << "\n";
        os << "box_capped = " << (r.box_capped ? "true" : "false") << "\n";
        os << "var_over_n = " << fmt(r.var_T / static_cast<double>(r.n)) << "\n";
        os << "se_var = " << fmt(r.se_var_T) << "\n";
        os << "mean_len_trunc = " << fmt(r.mean_len_trunc) << "\n";
        os << "max_len = " << fmt(r.max_len) << "\n";
        os << "em_witness_freq = " << fmt(r.em_witness_freq) << "\n";
        os << "second_moment_emp = " << fmt(r.second_moment_emp) << "\n";
        os << "second_moment_bound = " << fmt(r.second_moment_bound) << "\n";
        os << "t_over_n_quantiles = " << fmt(r.t_over_n_quantiles[0]) << ','
           << fmt(r.t_over_n_quantiles[1]) << ',' << fmt(r.t_over_n_quantiles[2]) << ','
           << fmt(r.t_over_n_quantiles[3]) << ',' << fmt(r.t_over_n_quantiles[4]) << "\n";
    }
    for (const auto& dgn : rep.diagnostics) {
        os << "\n[diagnostics n=" << dgn.n << "]\n";
        os << "level_hi = " << dgn.level_hi << "\n";
        os << "k_mid = " << dgn.k_mid << "\n";
        os << "freq_I_pos = " << fmt(dgn.freq_I_pos) << "\n";
        os << "mean_I = " << fmt(dgn.mean_I) << "\n";
        os << "max_I = " << fmt(dgn.max_I) << "\n";
        os << "i_negative = " << dgn.i_negative << "\n";
        os << "lipschitz_violations = " << dgn.lipschitz_violations << "\n";
        os << "lipschitz_max_ratio = " << fmt(dgn.lipschitz_max_ratio) << "\n";
        os << "d_proxy_mean = " << fmt(dgn.d_proxy_mean) << "\n";
        os << "d_proxy_max = " << fmt(dgn.d_proxy_max) << "\n";
        os << "s_over_n_quantiles = " << fmt(dgn.s_over_n_quantiles[0]) << ','
           << fmt(dgn.s_over_n_quantiles[1]) << ',' << fmt(dgn.s_over_n_quantiles[2]) << ','
           << fmt(dgn.s_over_n_quantiles[3]) << ',' << fmt(dgn.s_over_n_quantiles[4]) << "\n";
    }
    os << "\n[mu_f]\n";
    os << "available = " << (rep.mu_f.available ? "true" : "false") << "\n";
    if (rep.mu_f.available) {
        os << "estimate = " << fmt(rep.mu_f.estimate) << "\n";
        os << "se = " << fmt(rep.mu_f.se) << "\n";
        os << "ci = " << fmt(rep.mu_f.ci_lo) << ',' << fmt(rep.mu_f.ci_hi) << "\n";
        os << "fekete_means = ";
        for (std::size_t i = 0; i < rep.mu_f.per_n_means.size(); ++i) {
            if (i) os << ',';
            os << fmt(rep.mu_f.per_n_means[i]);
        }
        os << "\n";
        os << "bracket_ok = " << (rep.mu_f.bracket_ok ? "true" : "false") << "\n";
    }
    if (!rep.config_echo.empty()) {
        os << "\n[config_echo]\n" << rep.config_echo;
    }
}

}  // namespace fpp

// Acceptance suite: one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "fpp/experiments.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/oracle.hpp"
#include "fpp/theory.hpp"
#include "fpp/verify.hpp"

using namespace fpp;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n", pass ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5g", x);
    return buf;
}

Coords at(int x, int y) {
    Coords c{};
    c[0] = x;
    c[1] = y;
    return c;
}

void run_suite(int criterion, const std::string& name,
               const std::vector<verify::CheckLine>& lines, double seconds) {
    bool pass = true;
    std::string first_fail;
    for (const auto& l : lines) {
        if (!l.pass && first_fail.empty()) first_fail = l.name + ": " + l.detail;
        pass = pass && l.pass;
    }
    report(criterion, name, pass,
           pass ? std::to_string(lines.size()) + " checks" : first_fail, seconds);
}

// Criterion 3: pointwise order, Lipschitz and straight-line bounds with
// zero violations over 1000 realizations at n in {8, 16}.
void criterion3() {
    Timer timer;
    const LatticeBox box(2, 64);
    const WeightModel model(2, AssignIid{DistributionSpec::exponential(1.0)}, 0xacce55);
    const VertexId src = box.encode_vertex(origin_coords(2));
    const VertexId t8 = box.encode_vertex(at(8, 0));
    const VertexId t16 = box.encode_vertex(at(16, 0));
    const double alpha = default_alpha(2);
    const Truncation k8{8, alpha};
    const Truncation k16{16, alpha};
    const double lip_bound = k8.threshold() * 8.0;

    std::int64_t violations = 0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        const auto w = Realization(model, static_cast<std::uint32_t>(r)).materialize(box);
        for (const VertexId tgt : {t8, t16}) {
            const double a = shortest_passage_value(box, src, tgt, w, k8);
            const double b = shortest_passage_value(box, src, tgt, w, k16);
            const double t = shortest_passage_value(box, src, tgt, w, std::nullopt);
            if (!(a <= b && b <= t)) ++violations;
            double straight = 0;
            const std::int64_t n = (tgt == t8) ? 8 : 16;
            for (std::int64_t i = 1; i <= n; ++i) {
                straight += w[static_cast<std::size_t>(box.encode_edge(axis_edge(i, box)))];
            }
            if (!(t <= straight)) ++violations;
        }
        const double near = shortest_passage_value(box, src, t8, w, k8);
        const double far = shortest_passage_value(box, src, t16, w, k8);
        if (std::abs(far - near) > lip_bound * (1.0 + 1e-12) + 1e-12) ++violations;
    }
    report(3, "pointwise order and Lipschitz bounds", violations == 0,
           std::to_string(reps) + " realizations x {8,16}, " + std::to_string(violations) +
               " violations",
           timer.seconds());
}

// Criterion 4: truncation-equality criterion plus the detour lower bound on
// heavy geodesic edges, Pareto weights.
void criterion4() {
    Timer timer;
    const WeightModel model(2, AssignIid{DistributionSpec::pareto(2.5, 0.5)}, 0xdecade);
    const double alpha = default_alpha(2);
    std::int64_t eq_checked = 0, eq_violations = 0;
    std::int64_t heavy_edges = 0, detour_violations = 0;
    const int reps = 1000;
    for (const std::int64_t n : {std::int64_t{8}, std::int64_t{16}}) {
        const LatticeBox box(2, 4 * n);
        const VertexId src = box.encode_vertex(origin_coords(2));
        const VertexId tgt = box.encode_vertex(at(static_cast<int>(n), 0));
        const Truncation tr{n, alpha};
        const double threshold = tr.threshold();
        for (int r = 0; r < reps; ++r) {
            const auto w = Realization(model, static_cast<std::uint32_t>(r)).materialize(box);
            const auto trunc = shortest_passage(box, src, tgt, w, tr);
            bool all_below = true;
            for (const auto& e : trunc.path.edges()) {
                const double raw = w[static_cast<std::size_t>(box.encode_edge(e))];
                if (raw < threshold) continue;
                all_below = false;
                bool margin_ok = true;
                for (int i = 0; i < 2; ++i) {
                    if (std::abs(e.lower[static_cast<std::size_t>(i)]) > box.radius() - 3 ||
                        std::abs(e.upper()[static_cast<std::size_t>(i)]) > box.radius() - 3) {
                        margin_ok = false;
                    }
                }
                if (!margin_ok) continue;
                ++heavy_edges;
                for (const auto& detour : detour_paths(e, box)) {
                    double raw_passage = 0;
                    for (const auto& de : detour.edges()) {
                        raw_passage += w[static_cast<std::size_t>(box.encode_edge(de))];
                    }
                    if (raw_passage < 0.5 * threshold * (1.0 - 1e-12)) ++detour_violations;
                }
            }
            if (all_below) {
                ++eq_checked;
                const double plain = shortest_passage_value(box, src, tgt, w, std::nullopt);
                if (plain != trunc.value) ++eq_violations;
            }
        }
    }

    // Planted heavy edge, deterministic: a cheap straight corridor whose
    // fourth edge is heavy enough to stay on the geodesic after truncation.
    {
        const std::int64_t n = 8;
        const LatticeBox box(2, 4 * n);
        const Truncation tr{n, alpha};
        std::vector<double> w(static_cast<std::size_t>(box.edge_count()), 1.0);
        for (std::int64_t i = 1; i <= n; ++i) {
            w[static_cast<std::size_t>(box.encode_edge(axis_edge(i, box)))] = 0.1;
        }
        const EdgeRef heavy = axis_edge(4, box);
        w[static_cast<std::size_t>(box.encode_edge(heavy))] = 2.0 * tr.threshold();
        const VertexId src = box.encode_vertex(origin_coords(2));
        const VertexId tgt = box.encode_vertex(at(static_cast<int>(n), 0));
        const auto trunc = shortest_passage(box, src, tgt, w, tr);
        bool planted_on_geodesic = false;
        for (const auto& e : trunc.path.edges()) {
            if (e == heavy) planted_on_geodesic = true;
        }
        if (planted_on_geodesic) {
            ++heavy_edges;
            for (const auto& detour : detour_paths(heavy, box)) {
                double raw_passage = 0;
                for (const auto& de : detour.edges()) {
                    raw_passage += w[static_cast<std::size_t>(box.encode_edge(de))];
                }
                if (raw_passage < 0.5 * tr.threshold() * (1.0 - 1e-12)) ++detour_violations;
            }
        } else {
            ++detour_violations;  // construction must keep the heavy edge optimal
        }
    }

    const bool pass = eq_violations == 0 && detour_violations == 0 && eq_checked > 0 && heavy_edges > 0;
    report(4, "truncation equality criterion and detour bound", pass,
           std::to_string(eq_checked) + " equality checks, " + std::to_string(heavy_edges) +
               " heavy edges, " + std::to_string(eq_violations + detour_violations) + " violations",
           timer.seconds());
}

struct BigRuns {
    ExperimentReport expo;
    ExperimentReport pareto;
    double expo_seconds = 0;
    double pareto_seconds = 0;
};

BigRuns run_big_plans() {
    BigRuns out;
    {
        ExperimentPlan plan{
            .model = WeightModel(2, AssignIid{DistributionSpec::exponential(1.0)}, 20250810),
            .n_list = {8, 16, 32, 64},
            .squares = {},
            .replications = 2000,
            .alpha = std::nullopt,
            .box = {},
            .events = {},
            .workers = 0,
        };
        Timer t;
        out.expo = run_plan(plan);
        out.expo_seconds = t.seconds();
        std::printf("# exponential reference run: %.1fs\n", out.expo_seconds);
        std::fflush(stdout);
    }
    {
        ExperimentPlan plan{
            .model = WeightModel(2, AssignIid{DistributionSpec::pareto(2.5, 0.5)}, 20250811),
            .n_list = {4, 8, 9, 16, 25, 36, 49, 64},
            .squares = {4, 9, 16, 25, 36, 49, 64},
            .replications = 2000,
            .alpha = std::nullopt,
            .box = {},
            .events = {},
            .workers = 0,
        };
        Timer t;
        out.pareto = run_plan(plan);
        out.pareto_seconds = t.seconds();
        std::printf("# pareto reference run: %.1fs\n", out.pareto_seconds);
        std::fflush(stdout);
    }
    return out;
}

const RowStats& row_at(const ExperimentReport& rep, std::int64_t n) {
    for (const auto& r : rep.rows) {
        if (r.n == n) return r;
    }
    throw std::logic_error("missing row");
}

void criterion6(const ExperimentReport& expo, double seconds) {
    const RowStats& r8 = row_at(expo, 8);
    const RowStats& r64 = row_at(expo, 64);
    const double lhs = r64.var_T / 64.0;
    const double rhs = 2.0 * r8.var_T / 8.0;
    const double se = std::sqrt(std::pow(r64.se_var_T / 64.0, 2) +
                                std::pow(2.0 * r8.se_var_T / 8.0, 2));
    const bool pass = lhs <= rhs + 3.0 * se;
    report(6, "variance growth stays linear", pass,
           "var/n at 64 = " + fmt(lhs) + " vs 2x at 8 = " + fmt(rhs) + " +3se " + fmt(3.0 * se),
           seconds);
}

void criterion7(const ExperimentReport& expo) {
    Timer timer;
    bool monotone = true;
    std::string detail = "means/n:";
    for (std::size_t i = 0; i < expo.rows.size(); ++i) {
        const auto& row = expo.rows[i];
        const double m = row.mean_T / static_cast<double>(row.n);
        detail += " " + fmt(m);
        if (i > 0) {
            const auto& prev = expo.rows[i - 1];
            const double mp = prev.mean_T / static_cast<double>(prev.n);
            const double joint =
                std::sqrt(std::pow(row.se_T / static_cast<double>(row.n), 2) +
                          std::pow(prev.se_T / static_cast<double>(prev.n), 2));
            if (m > mp + 3.0 * joint) monotone = false;
        }
    }
    const MuFEstimate& mf = expo.mu_f;
    const bool bracket = mf.available && mf.estimate <= 1.0 + 3.0 * mf.se &&
                         mf.estimate >= expo.constants.beta1 / 4.0;
    report(7, "subadditive means and the time-constant bracket", monotone && bracket,
           detail + "; estimate " + fmt(mf.estimate), timer.seconds());
}

void criterion8(const ExperimentReport& pareto) {
    Timer timer;
    const RowStats& r8 = row_at(pareto, 8);
    const RowStats& r64 = row_at(pareto, 64);
    auto freq_se = [&](const RowStats& r, double p) {
        return std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(r.reps));
    };
    const double se_v =
        std::sqrt(std::pow(freq_se(r8, r8.freq_Vnc), 2) + std::pow(freq_se(r64, r64.freq_Vnc), 2));
    const bool v_ok = r64.freq_Vnc <= r8.freq_Vnc + 3.0 * se_v;

    bool w_ok = true;
    std::string wdetail = "Wnc:";
    const RowStats* prev = nullptr;
    for (const auto& row : pareto.rows) {
        if (!row.has_w) continue;
        wdetail += " " + fmt(row.freq_Wnc);
        if (prev) {
            const double se = std::sqrt(std::pow(freq_se(*prev, prev->freq_Wnc), 2) +
                                        std::pow(freq_se(row, row.freq_Wnc), 2));
            if (row.freq_Wnc > prev->freq_Wnc + 3.0 * se) w_ok = false;
        }
        prev = &row;
    }
    report(8, "truncation-event decay", v_ok && w_ok,
           "Vnc " + fmt(r8.freq_Vnc) + " -> " + fmt(r64.freq_Vnc) + "; " + wdetail,
           timer.seconds());
}

void criterion9(const ExperimentReport& expo) {
    Timer timer;
    const RowStats& r16 = row_at(expo, 16);
    const RowStats& r64 = row_at(expo, 64);
    const double lhs = r64.mean_len / 64.0;
    const double rhs = 1.5 * r16.mean_len / 16.0;
    const double se =
        std::sqrt(std::pow(r64.se_len / 64.0, 2) + std::pow(1.5 * r16.se_len / 16.0, 2));
    const bool pass = lhs <= rhs + 3.0 * se;
    report(9, "geodesic length grows linearly", pass,
           "len/n at 64 = " + fmt(lhs) + " vs 1.5x at 16 = " + fmt(rhs), timer.seconds());
}

void criterion10() {
    Timer timer;
    auto make = [](int workers) {
        ExperimentPlan plan{
            .model = WeightModel(2, AssignIid{DistributionSpec::uniform(0.5, 1.5)}, 777),
            .n_list = {4, 8, 9},
            .squares = {4, 9},
            .replications = 60,
            .alpha = std::nullopt,
            .box = {},
            .events = {},
            .workers = workers,
        };
        return plan;
    };
    const ExperimentReport a = run_plan(make(1));
    const ExperimentReport b = run_plan(make(3));
    std::ostringstream ta, tb, sa, sb;
    write_table_csv(a, ta);
    write_table_csv(b, tb);
    write_summary(a, sa);
    write_summary(b, sb);
    const bool pass = ta.str() == tb.str() && sa.str() == sb.str();
    report(10, "byte-identical tables across worker counts", pass,
           pass ? "1 vs 3 workers" : "outputs differ", timer.seconds());
}

}  // namespace

int main() {
    {
        Timer t;
        const auto lines = verify::oracle_suite();
        run_suite(1, "engine equals exhaustive enumeration", lines, t.seconds());
    }
    {
        Timer t;
        const auto lines = verify::martingale_suite();
        run_suite(2, "exact martingale identities", lines, t.seconds());
    }
    criterion3();
    criterion4();
    {
        Timer t;
        const auto lines = verify::detour_suite();
        run_suite(5, "detour construction", lines, t.seconds());
    }
    const BigRuns runs = run_big_plans();
    criterion6(runs.expo, runs.expo_seconds);
    criterion7(runs.expo);
    criterion8(runs.pareto);
    criterion9(runs.expo);
    criterion10();

    std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fpp/config.hpp"
#include "fpp/experiments.hpp"
#include "fpp/theory.hpp"
#include "fpp/verify.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void print_checks(const std::vector<fpp::verify::CheckLine>& lines) {
    for (const auto& l : lines) {
        std::cout << (l.pass ? "[PASS] " : "[FAIL] ") << l.name;
        if (!l.detail.empty()) std::cout << " (" << l.detail << ")";
        std::cout << "\n";
    }
}

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed_override,
            const std::optional<int>& workers_override, const std::optional<std::string>& out_override) {
    fpp::RunConfig cfg;
    try {
        cfg = fpp::RunConfig::parse_file(config_path);
        if (seed_override) cfg.seed = *seed_override;
        if (workers_override) cfg.workers = *workers_override;
        if (out_override) {
            cfg.out_dir = *out_override;
        } else if (const char* env = std::getenv("FPPLAB_OUT"); env && cfg.out_dir == ".") {
            cfg.out_dir = env;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    fpp::ExperimentReport report;
    try {
        fpp::ExperimentPlan plan = cfg.to_plan();
        report = fpp::run_plan(plan);
    } catch (const fpp::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    report.config_hash = cfg.hash();
    report.config_echo = cfg.echo();

    const fs::path dir(cfg.out_dir);
    const fs::path table_path = dir / "table.csv";
    const fs::path summary_path = dir / "summary.txt";
    const fs::path table_tmp = dir / "table.csv.tmp";
    const fs::path summary_tmp = dir / "summary.txt.tmp";
    try {
        fs::create_directories(dir);
        {
            std::ofstream t(table_tmp, std::ios::binary);
            if (!t) throw std::runtime_error("cannot write " + table_tmp.string());
            fpp::write_table_csv(report, t);
        }
        {
            std::ofstream s(summary_tmp, std::ios::binary);
            if (!s) throw std::runtime_error("cannot write " + summary_tmp.string());
            fpp::write_summary(report, s);
        }
        fs::rename(table_tmp, table_path);
        fs::rename(summary_tmp, summary_path);
    } catch (const std::exception& e) {
        std::error_code ec;
        fs::remove(table_tmp, ec);
        fs::remove(summary_tmp, ec);
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }

    std::cout << "seed = " << report.seed << "\n";
    std::cout << "config_hash = " << report.config_hash << "\n";
    std::cout << report.constants.to_key_values();
    std::cout << "table   -> " << table_path.string() << "\n";
    std::cout << "summary -> " << summary_path.string() << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& suite) {
    std::vector<fpp::verify::CheckLine> lines;
    if (suite == "oracle") {
        lines = fpp::verify::oracle_suite();
    } else if (suite == "martingale") {
        lines = fpp::verify::martingale_suite();
    } else if (suite == "detour") {
        lines = fpp::verify::detour_suite();
    } else if (suite == "constants") {
        lines = fpp::verify::constants_suite();
    } else {
        std::cerr << "error: unknown suite '" << suite
                  << "' (want oracle, martingale, detour or constants)\n";
        return kExitConfig;
    }
    print_checks(lines);
    return fpp::verify::all_pass(lines) ? kExitOk : kExitVerifyFailed;
}

int cmd_beta1(const std::string& config_path) {
    try {
        const fpp::RunConfig cfg = fpp::RunConfig::parse_file(config_path);
        const fpp::ExperimentPlan plan = cfg.to_plan();
        const fpp::ConditionReport cond = fpp::validate_conditions(plan.model);
        std::cout << "conditions: no_fast_edges=" << (cond.no_fast_edges ? "yes" : "no")
                  << " second_moment=" << (cond.second_moment ? "yes" : "no")
                  << " uniform_square_int=" << (cond.uniform_square_int ? "yes" : "no")
                  << " higher_moment=" << (cond.higher_moment ? "yes" : "no");
        if (cond.higher_moment && std::isfinite(cond.higher_moment_p)) {
            std::cout << " (p<=" << cond.higher_moment_p << ")";
        } else if (cond.higher_moment) {
            std::cout << " (any p)";
        }
        std::cout << "\n";
        if (!cond.accept()) {
            std::cerr << "error: model rejected: " << cond.detail << "\n";
            return kExitConfig;
        }
        const fpp::ModelConstants c = fpp::ModelConstants::compute(plan.model);
        std::cout << c.to_key_values();
        for (int m : {10, 20}) {
            const auto tail = fpp::mc_tail_check(plan.model, c.beta1, m, 10000, cfg.seed);
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "tail_check m=%d: frequency=%.6g bound=%.6g verdict=%s\n", m,
                          tail.frequency, tail.bound, tail.pass ? "pass" : "fail");
            std::cout << buf;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"First-passage percolation simulation lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> workers_override;
    std::optional<std::string> out_override;

    auto* run = app.add_subcommand("run", "Execute an experiment plan from a config file");
    run->add_option("--config", config_path, "Config file path")->required();
    run->add_option("--seed", seed_override, "Override the config seed");
    run->add_option("--workers", workers_override, "Worker threads (performance only)");
    run->add_option("--out", out_override, "Output directory (overrides config and FPPLAB_OUT)");

    std::string suite;
    auto* verify = app.add_subcommand("verify", "Run an exact verification suite");
    verify->add_option("suite", suite, "oracle | martingale | detour | constants")->required();

    std::string beta1_config;
    auto* beta1 = app.add_subcommand("beta1", "Print model constants and the tail check");
    beta1->add_option("--config", beta1_config, "Config file path")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, seed_override, workers_override, out_override);
    if (verify->parsed()) return cmd_verify(suite);
    if (beta1->parsed()) return cmd_beta1(beta1_config);
    return kExitConfig;
}

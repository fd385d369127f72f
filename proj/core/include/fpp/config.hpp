#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpp/experiments.hpp"

namespace fpp {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed run configuration. The text format is a sectioned key-value
/// document ([run], [model], [plan], [output]); unknown keys are rejected
/// and all validation problems are reported in one aggregated error.
struct RunConfig {
    std::uint64_t seed = 0;
    int workers = 0;

    int dim = 0;
    std::string assignment;            // iid | axis | parity | table
    std::vector<std::pair<std::string, std::string>> dist_keys;  // key -> spec text

    std::vector<std::int64_t> n_list;
    std::vector<std::int64_t> squares;
    std::int64_t replications = 0;
    std::string alpha = "auto";
    double box_eps = 0.25;
    double box_c_cap = 0.0;
    std::int64_t box_cap = 100000;
    std::string events = "all";

    std::string out_dir = ".";

    static RunConfig parse_text(const std::string& text);
    static RunConfig parse_file(const std::string& path);

    /// Canonical text form; parse_text(echo()) reproduces this config.
    std::string echo() const;

    /// FNV-1a over the canonical text minus performance and output knobs
    /// (worker count, output directory), so the hash identifies the
    /// semantic run.
    std::string hash() const;

    ExperimentPlan to_plan() const;
};

}  // namespace fpp

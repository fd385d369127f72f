#include "fpp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace fpp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::string fmt_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const std::string& key,
                                         std::vector<std::string>& problems) {
    std::vector<std::int64_t> out;
    if (trim(text).empty()) return out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        try {
            std::size_t pos = 0;
            out.push_back(std::stoll(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument("junk");
        } catch (...) {
            problems.push_back(key + ": bad integer '" + tok + "'");
            return out;
        }
    }
    return out;
}

}  // namespace

RunConfig RunConfig::parse_text(const std::string& text) {
    std::map<std::string, std::map<std::string, std::string>> doc;
    std::vector<std::string> problems;
    std::string section;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                problems.push_back("line " + std::to_string(lineno) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "run" && section != "model" && section != "plan" && section != "output") {
                problems.push_back("unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        if (section.empty()) {
            problems.push_back("line " + std::to_string(lineno) + ": key outside any section");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (doc[section].count(key)) {
            problems.push_back("duplicate key " + section + "." + key);
        }
        doc[section][key] = value;
    }

    RunConfig cfg;
    auto take = [&](const std::string& sec, const std::string& key,
                    bool required) -> std::optional<std::string> {
        auto sit = doc.find(sec);
        if (sit == doc.end() || !sit->second.count(key)) {
            if (required) problems.push_back("missing required key " + sec + "." + key);
            return std::nullopt;
        }
        std::string v = sit->second.at(key);
        sit->second.erase(key);
        return v;
    };
    auto parse_u64 = [&](const std::string& v, const std::string& key) -> std::uint64_t {
        try {
            std::size_t pos = 0;
            const std::uint64_t r = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("junk");
            return r;
        } catch (...) {
            problems.push_back(key + ": bad unsigned integer '" + v + "'");
            return 0;
        }
    };
    auto parse_i64 = [&](const std::string& v, const std::string& key) -> std::int64_t {
        try {
            std::size_t pos = 0;
            const std::int64_t r = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("junk");
            return r;
        } catch (...) {
            problems.push_back(key + ": bad integer '" + v + "'");
            return 0;
        }
    };
    auto parse_f64 = [&](const std::string& v, const std::string& key) -> double {
        try {
            std::size_t pos = 0;
            const double r = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("junk");
            return r;
        } catch (...) {
            problems.push_back(key + ": bad number '" + v + "'");
            return 0;
        }
    };

    if (auto v = take("run", "seed", true)) cfg.seed = parse_u64(*v, "run.seed");
    if (auto v = take("run", "workers", false)) cfg.workers = static_cast<int>(parse_i64(*v, "run.workers"));

    if (auto v = take("model", "dim", true)) cfg.dim = static_cast<int>(parse_i64(*v, "model.dim"));
    if (auto v = take("model", "assignment", true)) cfg.assignment = *v;

    // Distribution keys depend on the assignment rule.
    if (cfg.assignment == "iid") {
        if (auto v = take("model", "dist", true)) cfg.dist_keys.emplace_back("dist", *v);
    } else if (cfg.assignment == "axis") {
        for (int a = 0; a < std::max(cfg.dim, 0); ++a) {
            const std::string key = "dist.axis" + std::to_string(a);
            if (auto v = take("model", key, true)) cfg.dist_keys.emplace_back(key, *v);
        }
    } else if (cfg.assignment == "parity") {
        if (auto v = take("model", "dist.even", true)) cfg.dist_keys.emplace_back("dist.even", *v);
        if (auto v = take("model", "dist.odd", true)) cfg.dist_keys.emplace_back("dist.odd", *v);
    } else if (cfg.assignment == "table") {
        for (int a = 0; a < std::max(cfg.dim, 0); ++a) {
            for (const char* par : {"even", "odd"}) {
                const std::string key = "dist.axis" + std::to_string(a) + "." + par;
                if (auto v = take("model", key, true)) cfg.dist_keys.emplace_back(key, *v);
            }
        }
    } else if (!cfg.assignment.empty()) {
        problems.push_back("model.assignment: unknown rule '" + cfg.assignment +
                           "' (want iid, axis, parity or table)");
    }

    if (auto v = take("plan", "n", true)) cfg.n_list = parse_int_list(*v, "plan.n", problems);
    if (auto v = take("plan", "squares", false)) cfg.squares = parse_int_list(*v, "plan.squares", problems);
    if (auto v = take("plan", "replications", true)) cfg.replications = parse_i64(*v, "plan.replications");
    if (auto v = take("plan", "alpha", false)) cfg.alpha = *v;
    if (auto v = take("plan", "box_eps", false)) cfg.box_eps = parse_f64(*v, "plan.box_eps");
    if (auto v = take("plan", "box_c_cap", false)) cfg.box_c_cap = parse_f64(*v, "plan.box_c_cap");
    if (auto v = take("plan", "box_cap", false)) cfg.box_cap = parse_i64(*v, "plan.box_cap");
    if (auto v = take("plan", "events", false)) cfg.events = *v;
    if (auto v = take("output", "dir", false)) cfg.out_dir = *v;

    for (const auto& [sec, keys] : doc) {
        for (const auto& [key, value] : keys) {
            problems.push_back("unknown key " + sec + "." + key);
        }
    }
    if (!problems.empty()) {
        std::string all = "configuration invalid:";
        for (const auto& p : problems) all += "\n  - " + p;
        throw ConfigError(all);
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

std::string RunConfig::echo() const {
    std::ostringstream os;
    os << "[run]\n";
    os << "seed = " << seed << "\n";
    os << "workers = " << workers << "\n";
    os << "[model]\n";
    os << "dim = " << dim << "\n";
    os << "assignment = " << assignment << "\n";
    for (const auto& [key, value] : dist_keys) os << key << " = " << value << "\n";
    os << "[plan]\n";
    os << "n = ";
    for (std::size_t i = 0; i < n_list.size(); ++i) os << (i ? "," : "") << n_list[i];
    os << "\n";
    os << "squares = ";
    for (std::size_t i = 0; i < squares.size(); ++i) os << (i ? "," : "") << squares[i];
    os << "\n";
    os << "replications = " << replications << "\n";
    os << "alpha = " << alpha << "\n";
    os << "box_eps = " << fmt_full(box_eps) << "\n";
    os << "box_c_cap = " << fmt_full(box_c_cap) << "\n";
    os << "box_cap = " << box_cap << "\n";
    os << "events = " << events << "\n";
    os << "[output]\n";
    os << "dir = " << out_dir << "\n";
    return os.str();
}

std::string RunConfig::hash() const {
    // Canonical text minus [run] workers and the [output] section.
    std::istringstream is(echo());
    std::string line, section, hashed;
    while (std::getline(is, line)) {
        if (!line.empty() && line.front() == '[') section = line;
        if (section == "[output]") continue;
        if (section == "[run]" && line.rfind("workers", 0) == 0) continue;
        hashed += line;
        hashed += '\n';
    }
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : hashed) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentPlan RunConfig::to_plan() const {
    std::vector<std::string> problems;
    if (dim < 2) problems.push_back("model.dim must be >= 2");

    auto spec_of = [&](const std::string& key) {
        for (const auto& [k, v] : dist_keys) {
            if (k == key) return DistributionSpec::parse(v);
        }
        throw ConfigError("internal: missing distribution key " + key);
    };

    AssignmentRule rule = AssignIid{DistributionSpec::point_mass(1.0)};
    try {
        if (assignment == "iid") {
            rule = AssignIid{spec_of("dist")};
        } else if (assignment == "axis") {
            AssignAxis ax;
            for (int a = 0; a < dim; ++a) ax.per_axis.push_back(spec_of("dist.axis" + std::to_string(a)));
            rule = std::move(ax);
        } else if (assignment == "parity") {
            rule = AssignParity{spec_of("dist.even"), spec_of("dist.odd")};
        } else if (assignment == "table") {
            AssignTable tb;
            for (int a = 0; a < dim; ++a) {
                tb.table.push_back({spec_of("dist.axis" + std::to_string(a) + ".even"),
                                    spec_of("dist.axis" + std::to_string(a) + ".odd")});
            }
            rule = std::move(tb);
        }
    } catch (const std::exception& e) {
        problems.push_back(e.what());
    }

    std::optional<double> alpha_value;
    if (alpha != "auto") {
        try {
            std::size_t pos = 0;
            alpha_value = std::stod(alpha, &pos);
            if (pos != alpha.size()) throw std::invalid_argument("junk");
        } catch (...) {
            problems.push_back("plan.alpha: expected 'auto' or a number in (0,1)");
        }
    }

    EventSelection events_sel;
    try {
        events_sel = EventSelection::parse(events);
    } catch (const std::exception& e) {
        problems.push_back(e.what());
    }

    if (!problems.empty()) {
        std::string all = "configuration invalid:";
        for (const auto& p : problems) all += "\n  - " + p;
        throw ConfigError(all);
    }

    ExperimentPlan plan{
        .model = WeightModel(dim, std::move(rule), seed),
        .n_list = n_list,
        .squares = squares,
        .replications = replications,
        .alpha = alpha_value,
        .box = BoxPolicy{box_eps, box_c_cap, box_cap},
        .events = events_sel,
        .workers = workers,
    };
    plan.validate();
    return plan;
}

}  // namespace fpp

// End-to-end checks of the fpplab binary: exit codes, file outputs,
// determinism across worker counts, seed override.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    if (ok) {
        std::cout << "[PASS] " << what << "\n";
    } else {
        std::cout << "[FAIL] " << what << "\n";
        ++failures;
    }
}

int run(const std::string& cmd) {
    const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

int main() {
    const std::string bin = FPPLAB_BIN;
    const fs::path dir = fs::temp_directory_path() / "fpplab_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const std::string good_cfg = R"([run]
seed = 4242
workers = 1
[model]
dim = 2
assignment = iid
dist = uniform(0.5,1.5)
[plan]
n = 4,8
squares = 4
replications = 40
[output]
dir = )" + (dir / "out1").string() + "\n";
    write_file(dir / "good.cfg", good_cfg);

    expect(run(bin + " run --config " + (dir / "good.cfg").string()) == 0, "cli.run.exit0");
    expect(fs::exists(dir / "out1" / "table.csv"), "cli.run.table_written");
    expect(fs::exists(dir / "out1" / "summary.txt"), "cli.run.summary_written");

    // Same seed, different workers: byte-identical table.
    expect(run(bin + " run --config " + (dir / "good.cfg").string() + " --workers 4 --out " +
               (dir / "out2").string()) == 0,
           "cli.run.workers4_exit0");
    expect(slurp(dir / "out1" / "table.csv") == slurp(dir / "out2" / "table.csv"),
           "cli.run.tables_byte_identical");

    // Re-running the embedded config echo reproduces the table.
    {
        const std::string summary = slurp(dir / "out1" / "summary.txt");
        const auto marker = summary.find("[config_echo]\n");
        expect(marker != std::string::npos, "cli.summary.has_echo");
        std::string echo = summary.substr(marker + 14);
        // redirect outputs, keep the seed and plan
        write_file(dir / "echo.cfg", echo);
        expect(run(bin + " run --config " + (dir / "echo.cfg").string() + " --out " +
                   (dir / "out3").string()) == 0,
               "cli.echo.runs");
        expect(slurp(dir / "out1" / "table.csv") == slurp(dir / "out3" / "table.csv"),
               "cli.echo.reproduces_table");
    }

    // Seed override changes the table bytes.
    expect(run(bin + " run --config " + (dir / "good.cfg").string() + " --seed 7 --out " +
               (dir / "out4").string()) == 0,
           "cli.run.seed_override_exit0");
    expect(slurp(dir / "out1" / "table.csv") != slurp(dir / "out4" / "table.csv"),
           "cli.run.seed_changes_table");

    // Condition failure: Pareto with infinite second moment.
    const std::string bad_model = R"([run]
seed = 1
[model]
dim = 2
assignment = iid
dist = pareto(1.5,0.5)
[plan]
n = 4
replications = 10
)";
    write_file(dir / "bad_model.cfg", bad_model);
    expect(run(bin + " run --config " + (dir / "bad_model.cfg").string()) == 2,
           "cli.run.rejects_infinite_variance_model");

    // Unknown key: configuration exit code, no partial outputs.
    write_file(dir / "unknown.cfg", good_cfg + "turbo = on\n");
    expect(run(bin + " run --config " + (dir / "unknown.cfg").string() + " --out " +
               (dir / "out5").string()) == 2,
           "cli.run.rejects_unknown_key");
    expect(!fs::exists(dir / "out5" / "table.csv"), "cli.run.no_partial_outputs");

    expect(run(bin + " run --config " + (dir / "missing.cfg").string()) == 2,
           "cli.run.missing_config");

    // verify subcommands
    expect(run(bin + " verify constants") == 0, "cli.verify.constants");
    expect(run(bin + " verify detour") == 0, "cli.verify.detour");
    expect(run(bin + " verify bogus") == 2, "cli.verify.unknown_suite");

    // beta1 on a valid and an invalid model
    expect(run(bin + " beta1 --config " + (dir / "good.cfg").string()) == 0, "cli.beta1.ok");
    expect(run(bin + " beta1 --config " + (dir / "bad_model.cfg").string()) == 2,
           "cli.beta1.rejected_model");

    std::cout << (failures ? "FAILED" : "OK") << " (" << failures << " failures)\n";
    return failures ? 1 : 0;
}

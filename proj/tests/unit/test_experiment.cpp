#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "radwave/experiment.hpp"
#include "radwave/linearization.hpp"

using namespace radwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "radwave-tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const char* kLinearize = R"(command = "linearize"
[model]
dim = 2
kind = "exp2d"
b = 0.25
[run]
T = 0.5
[data]
R0 = 1
[sweep]
n_list = [1, 2, 4]
refine_check = false
)";

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RADWAVE_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli_experiments") {

TEST_CASE("output directory resolution order") {
    ExperimentConfig c;
    ExecuteOptions o;
    o.config_stem = "exp";
    ::unsetenv("RADWAVE_OUT");
    CHECK(resolve_output_dir(c, o) == fs::path("radwave-out") / "exp");
    ::setenv("RADWAVE_OUT", "/tmp/rw-root", 1);
    CHECK(resolve_output_dir(c, o) == fs::path("/tmp/rw-root") / "exp");
    c.output_dir = "from-config";
    CHECK(resolve_output_dir(c, o) == fs::path("from-config"));
    o.out = "from-flag";
    CHECK(resolve_output_dir(c, o) == fs::path("from-flag"));
    ::unsetenv("RADWAVE_OUT");
}

TEST_CASE("write_atomic leaves no temp file") {
    const fs::path d = scratch("atomic");
    write_atomic(d / "a.txt", "one");
    write_atomic(d / "a.txt", "two");
    CHECK(slurp(d / "a.txt") == "two");
    CHECK_FALSE(fs::exists(d / "a.txt.tmp"));
}

TEST_CASE("validate: report only, manifest written") {
    const fs::path d = scratch("validate");
    const auto c = parse_config("command = \"validate\"\n[model]\ndim = 3\nkind = \"power3d\"\nb = 0.5\np = 4.9\n");
    ExecuteOptions o;
    o.out = d;
    std::ostringstream log;
    const auto r = execute(c, o, log);
    CHECK(r.exit_code == kExitOk);
    CHECK(log.str().find("inter-critical") != std::string::npos);
    CHECK(log.str().find("p < 4+b") != std::string::npos);
    const auto m = nlohmann::json::parse(slurp(d / "manifest.json"));
    CHECK(m["results"]["hypotheses_satisfied"] == false);
    CHECK(m["code_version"] == RADWAVE_VERSION);
    CHECK(m.contains("platform"));
    CHECK(m.contains("wall_time_s"));
    CHECK(m["config"]["model"]["p"] == 4.9);
    CHECK_FALSE(fs::exists(d / "energy.csv"));
}

TEST_CASE("linearize: three rows and bit-identical reruns") {
    const auto c = parse_config(kLinearize);
    ExecuteOptions o;
    o.threads = 2;
    std::ostringstream log;
    o.out = scratch("lin-a");
    const auto a = execute(c, o, log);
    o.out = scratch("lin-b");
    o.threads = 1;
    const auto b = execute(c, o, log);
    CHECK(a.exit_code == kExitOk);
    const std::string csv = slurp(a.directory / "sweep.csv");
    CHECK(count_lines(csv) == 4);
    CHECK(csv.rfind(kSweepCsvHeader, 0) == 0);
    CHECK(csv == slurp(b.directory / "sweep.csv"));
    const auto m = nlohmann::json::parse(slurp(a.directory / "manifest.json"));
    CHECK(m["results"]["grid_policy"]["grid"]["num_cells"].get<int>() > 0);
    CHECK(m["results"]["verdict"] == "consistent");
}

TEST_CASE("simulate: gates map to exit codes") {
    auto cfg = parse_config(R"(command = "simulate"
[model]
dim = 3
kind = "power3d"
b = 0.5
p = 3.8
[grid]
dr = 0.001
[run]
T = 0.5
[data]
R0 = 1
)");
    ExecuteOptions o;
    std::ostringstream log;
    o.out = scratch("sim-ok");
    auto r = execute(cfg, o, log);
    CHECK(r.exit_code == kExitOk);
    CHECK(fs::exists(r.directory / "energy.csv"));

    cfg.run.drift_gate = 1e-14;
    o.out = scratch("sim-gate");
    CHECK(execute(cfg, o, log).exit_code == kExitGateFailure);

    cfg.run.drift_gate = 1e-4;
    cfg.grid.r_max = 1.2;  // too close to the wall for T
    o.out = scratch("sim-wall");
    r = execute(cfg, o, log);
    CHECK(r.exit_code == kExitNumericalAbort);
    const auto m = nlohmann::json::parse(slurp(r.directory / "manifest.json"));
    CHECK(m["exit_code"] == 3);
    CHECK(m.contains("error"));
}

TEST_CASE("exp2d overflow aborts with code 3") {
    auto cfg = parse_config(R"(command = "simulate"
[model]
dim = 2
kind = "exp2d"
b = 0.25
[grid]
dr = 0.005
[run]
T = 0.5
[data]
amplitude = 2000
R0 = 1
)");
    ExecuteOptions o;
    o.out = scratch("sim-overflow");
    std::ostringstream log;
    CHECK(execute(cfg, o, log).exit_code == kExitNumericalAbort);
}

TEST_CASE("exit_code_for is total") {
    CHECK(exit_code_for(nullptr) == kExitOk);
    CHECK(exit_code_for(std::make_exception_ptr(ConfigError({"x"}))) == kExitInputError);
    CHECK(exit_code_for(std::make_exception_ptr(GateError("x"))) == kExitGateFailure);
    CHECK(exit_code_for(std::make_exception_ptr(OverflowError(800.0))) == kExitNumericalAbort);
    CHECK(exit_code_for(std::make_exception_ptr(CflError("x"))) == kExitNumericalAbort);
    CHECK(exit_code_for(std::make_exception_ptr(WallProximityError("x"))) == kExitNumericalAbort);
    CHECK(exit_code_for(std::make_exception_ptr(NonFiniteError("x", 1))) == kExitNumericalAbort);
    CHECK(exit_code_for(std::make_exception_ptr(ResolutionError("x"))) == kExitInputError);
    CHECK(exit_code_for(std::make_exception_ptr(std::runtime_error("x"))) == kExitNumericalAbort);
}

TEST_CASE("simulation_grid") {
    ExperimentConfig c;
    c.model = ModelSpec::exp2d(0.25);
    c.run.T = 2.0;
    c.data.R0 = 1.0;
    c.grid.dr = 1e-3;
    auto g = simulation_grid(c);
    CHECK(g.spacing() == doctest::Approx(1e-3));
    CHECK(g.r_max() == doctest::Approx(3.008));
    c.grid.dr.reset();
    c.grid.num_cells = 308;
    g = simulation_grid(c);
    CHECK(g.num_cells() == 308);
    CHECK(g.r_max() == doctest::Approx(3.0 + 8 * g.spacing()));
}

TEST_CASE("CLI: subcommands and exit codes") {
    const fs::path d = scratch("cli");
    {
        std::ofstream(d / "val.toml") << "command = \"validate\"\n[model]\ndim = 2\nkind = \"exp2d\"\nb = 0.5\n";
        std::ofstream(d / "bad.toml") << "command = \"validate\"\n[model]\ndim = 2\nkind = \"exp2d\"\ndampening = 1\n";
        std::ofstream(d / "lin.toml") << kLinearize;
    }
    CHECK(run_cli("validate --config " + (d / "val.toml").string() + " --out " + (d / "v").string()) == 0);
    CHECK(fs::exists(d / "v" / "manifest.json"));
    CHECK(run_cli("validate --config " + (d / "bad.toml").string() + " --out " + (d / "b").string()) == 1);
    CHECK(run_cli("simulate --config " + (d / "val.toml").string() + " --out " + (d / "s").string()) == 1);
    CHECK(run_cli("validate --config " + (d / "missing.toml").string()) == 1);
    CHECK(run_cli("") == 1);
    CHECK(run_cli("linearize --config " + (d / "lin.toml").string() + " --threads 2 --out " + (d / "l").string()) ==
          0);
    CHECK(count_lines(slurp(d / "l" / "sweep.csv")) == 4);

    // RADWAVE_OUT default root
    const std::string env = "RADWAVE_OUT=" + (d / "root").string() + " ";
    const int status = std::system((env + RADWAVE_CLI + " validate --config " + (d / "val.toml").string() +
                                    " > /dev/null 2>&1")
                                       .c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(d / "root" / "val" / "manifest.json"));
}

}  // TEST_SUITE

// radwave: run directories for the radial wave experiments.
//
//   radwave validate|simulate|linearize|inequalities --config <path> [--out <dir>] [--threads <k>]

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "radwave/experiment.hpp"

int main(int argc, char** argv) {
    using namespace radwave;

    CLI::App app{"Radial semilinear wave experiments"};
    app.set_version_flag("--version", std::string(RADWAVE_VERSION));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    for (const char* name : {"validate", "simulate", "linearize", "inequalities"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "TOML experiment config")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "run directory (default $RADWAVE_OUT/<config stem>)");
        sub->add_option("--threads", threads, "worker threads for sweeps (default: hardware)")
            ->check(CLI::NonNegativeNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    const Command command = parse_command(app.get_subcommands().front()->get_name());
    ExperimentConfig config;
    ExecuteOptions opts;
    try {
        config = ingest(config_path, command);
        std::ifstream in(config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        opts.config_text = ss.str();
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitInputError;
    }

    if (!out_dir.empty()) opts.out = out_dir;
    opts.threads = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    opts.config_stem = std::filesystem::path(config_path).stem().string();

    const RunOutcome outcome = execute(config, opts, std::cout);
    std::cout << "run directory: " << outcome.directory.string() << '\n';
    return outcome.exit_code;
}

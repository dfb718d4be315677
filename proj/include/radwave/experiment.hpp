#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "radwave/config.hpp"
#include "radwave/grid.hpp"

namespace radwave {

/// Process exit codes. Every termination path maps to exactly one of these.
enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,      // bad config, unreadable file, unresolvable grid
    kExitGateFailure = 2,     // drift, finite speed, trend verdict
    kExitNumericalAbort = 3,  // overflow, non-finite values, CFL, wall contact
};

/// Maps an in-flight exception to its exit code.
int exit_code_for(std::exception_ptr error);

struct ExecuteOptions {
    std::optional<std::filesystem::path> out;  // --out
    int threads = 1;
    std::string config_text;          // echoed verbatim into the manifest
    std::string config_stem = "run";  // names the default run directory
};

struct RunOutcome {
    int exit_code = kExitOk;
    std::filesystem::path directory;
    std::string summary;
};

/// --out, then output_dir from the config, then $RADWAVE_OUT/<stem>, then
/// ./radwave-out/<stem>.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const ExecuteOptions& opts);

/// Writes to a sibling temp file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

/// Runs the configured command, writes manifest.json plus the command's CSV
/// into the run directory and reports progress on `log`.
RunOutcome execute(const ExperimentConfig& config, const ExecuteOptions& opts, std::ostream& log);

/// The grid a `simulate` run uses: dr or num_cells from [grid], r_max
/// defaulting to R0 + T + 8 dr.
RadialGrid simulation_grid(const ExperimentConfig& config);

}  // namespace radwave

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radwave/errors.hpp"
#include "radwave/model.hpp"

namespace radwave {

enum class Command { Validate, Simulate, Linearize, Inequalities };

std::string_view to_string(Command c);
Command parse_command(std::string_view name);

struct GridBlock {
    std::optional<double> r_max;  // auto: R0 + T + 8 dr
    std::optional<std::size_t> num_cells;
    std::optional<double> dr;
    friend bool operator==(const GridBlock&, const GridBlock&) = default;
};

struct RunBlock {
    double T = 1.0;
    double cfl = 0.5;
    std::size_t snapshot_stride = 10;
    double drift_gate = 1e-4;
    friend bool operator==(const RunBlock&, const RunBlock&) = default;
};

struct DataBlock {
    std::string profile = "bump";
    double amplitude = 1.0;
    double R0 = 1.0;
    double velocity_amplitude = 0.0;
    friend bool operator==(const DataBlock&, const DataBlock&) = default;
};

struct SweepBlock {
    std::vector<int> n_list;
    int cells_per_support = 64;
    bool refine_check = true;
    double drift_gate = 1e-3;
    friend bool operator==(const SweepBlock&, const SweepBlock&) = default;
};

struct InequalitiesBlock {
    double dr = 1e-3;
    int strauss_corpus = 50;
    std::vector<std::array<double, 3>> gn_cases = {{2, 1, 4}, {3, 0, 4}, {3, 0.5, 6.25}};
    std::vector<double> mt_beta = {0.0, 1.0};
    double mt_alpha_fraction = 0.9;
    std::vector<double> moser_beta = {0.0, 1.0};
    std::vector<double> moser_eps_fraction = {0.0, 0.25};
    std::vector<int> moser_n = {4, 8, 16, 32, 64};
    std::vector<double> k_alpha = {0.5, 1.0, 2.0, 4.0, 8.0};
    double tech2d_b = 0.5;
    double tech2d_alpha = 1.0;
    friend bool operator==(const InequalitiesBlock&, const InequalitiesBlock&) = default;
};

struct ExperimentConfig {
    Command command = Command::Validate;
    ModelSpec model;
    GridBlock grid;
    RunBlock run;
    DataBlock data;
    SweepBlock sweep;
    InequalitiesBlock inequalities;
    bool allow_outside_theorems = false;
    std::optional<std::string> output_dir;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Schema violations, each with "<source>:<line>:" context where known.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Parses and validates a TOML config. Unknown keys are rejected; so are
/// models outside the well-posedness hypotheses (except for `validate`)
/// unless allow_outside_theorems = true. `command` may be left out of the
/// file when the caller supplies it; a file that names a different command
/// is rejected.
ExperimentConfig parse_config(std::string_view text, std::string_view source_name = "<config>",
                              std::optional<Command> command = std::nullopt);
ExperimentConfig ingest(const std::filesystem::path& path, std::optional<Command> command = std::nullopt);

/// TOML text that parse_config() maps back to an equal config.
std::string serialize(const ExperimentConfig& config);

}  // namespace radwave

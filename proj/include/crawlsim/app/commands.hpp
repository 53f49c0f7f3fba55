#pragma once

// Subcommands behind the crawlsim executable. Each returns a process exit
// code: 0 success, 1 verification failure, 2 configuration error, 3 solver
// or runtime failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "crawlsim/app/config.hpp"
#include "crawlsim/app/csv_io.hpp"

namespace crawlsim::app {

enum ExitCode : int { kExitOk = 0, kExitVerify = 1, kExitConfig = 2, kExitSolver = 3 };

/// Environment variable consulted for the output directory when neither
/// --out nor outputs.dir is given.
inline constexpr const char* kOutDirEnv = "CRAWLSIM_OUT_DIR";

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    bool plots = false;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    std::optional<std::filesystem::path> trajectory;  ///< verify only
};

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out,
                std::ostream& err);

/// Resolution order: --out, outputs.dir, $CRAWLSIM_OUT_DIR, "crawlsim-out".
std::filesystem::path output_dir(const CommandOptions& opts, const ScenarioConfig& cfg);

/// CSV table of a two-body penalised run. Regimes are "stick" while the
/// regularised force is below the friction bound.
TrajectoryTable penalized_table(const PenalizedTrajectory& run, const PhysicalParams& params,
                                const GaitProgram& gait, double x10);
TrajectoryTable chain_table(const PenalizedTrajectory& run, const ChainSpec& spec, double x10);
TrajectoryTable oracle_table(const EventTrajectory& run, const PhysicalParams& params,
                             const GaitProgram& gait);

}  // namespace crawlsim::app

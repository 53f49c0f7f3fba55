#pragma once

// Scenario files: one JSON object per scenario. Unknown keys are rejected and
// every error message names the offending field by its JSON path.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "crawlsim/chain.hpp"
#include "crawlsim/model.hpp"
#include "crawlsim/penalized_solver.hpp"
#include "crawlsim/stickslip_oracle.hpp"
#include "crawlsim/vi_checker.hpp"

namespace crawlsim::app {

struct OutputConfig {
    std::optional<std::string> dir;
    bool plots = false;
};

struct ChainRefinement {
    std::vector<std::int64_t> n0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    // Exactly one of (params, gait) and chain is present.
    std::optional<PhysicalParams> params;
    std::optional<GaitProgram> gait;
    std::optional<ChainSpec> chain;
    InitialConditions initial;
    double horizon = 1.0;
    SolverConfig solver;
    RefineOptions refinement;
    std::vector<std::int64_t> chain_n0;  ///< per-body n0 for chains
    OracleOptions oracle;
    VerifyOptions verify;
    std::optional<std::string> verify_trajectory;  ///< CSV to verify instead of a fresh run
    double compare_tolerance = 1e-2;               ///< bound on sup |y_pen - y_oracle|
    double drift_tolerance = 0.05;                 ///< relative drift agreement
    OutputConfig outputs;

    bool is_chain() const noexcept { return chain.has_value(); }
};

/// Parses and validates a scenario. Throws InvalidInput naming the field.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace crawlsim::app

#pragma once

#include "ltp/model.hpp"
#include "ltp/pss_solver.hpp"
#include "ltp/sweep.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ltp::cli {

enum ExitCode { kOk = 0, kConfigError = 1, kNotConverged = 2, kVerifyFailed = 3 };

struct AnalysisConfig {
    double marginal_band = 0.0;
    double f_min = 1.0;     ///< Hz
    double f_max = 1000.0;  ///< Hz
    int f_points = 200;
    bool log_spacing = true;
    int input_index = 0;
    int output_index = 0;
    /// Input column of the mirror entries; -1 picks the conjugate input for the
    /// built-in cases and input_index otherwise.
    int mirror_input_index = -1;

    [[nodiscard]] std::vector<double> frequencies() const;
};

struct OracleConfig {
    double horizon_periods = 100;
    double step = 50e-6;
    std::string start = "zero";  ///< "zero" or "pss"
    double rms_tolerance = 0.01;
    bool growth = false;
    int probe_state = 0;
    double perturbation = 1e-3;
    double settle_periods = 10;
    double probe_horizon_periods = 100;
};

struct RunConfig {
    std::string case_name = "case1";  ///< "case1", "case2" or a path to a linear model JSON file
    ParameterSet params;
    SolverConfig solver;
    AnalysisConfig analysis;
    OracleConfig oracle;
    std::optional<SweepAxis> axis1, axis2;
    int workers = 1;

    [[nodiscard]] bool builtin_case() const { return case_name == "case1" || case_name == "case2"; }
};

/// Defaults for a case, then the JSON config text, then `key=value` overrides.
/// Override keys are case parameters or `section.key` (solver, analysis, oracle).
RunConfig resolve_config(const std::optional<std::string>& case_flag, const std::string& config_json,
                         const std::vector<std::string>& overrides);

/// Fully resolved configuration as JSON; feeding it back through resolve_config is the identity.
std::string dump_config(const RunConfig& config);

/// Entry point of the command-line tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ltp::cli

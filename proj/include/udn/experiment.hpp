// Experiment runner: config -> scenario -> solver/baseline -> metric files.
#pragma once

#include "udn/scenario.hpp"
#include "udn/solver.hpp"

#include <optional>
#include <string>

namespace udn {

enum class Algo { Gradient, MaxSinr, Both };

struct ExperimentArgs {
  std::optional<std::string> config_path;
  Algo algo = Algo::Gradient;
  std::optional<std::size_t> iters;        // overrides SolverConfig::max_iters
  std::optional<std::uint64_t> seed;       // overrides rng_seed
  std::optional<bool> blockage;            // force blockage on/off
  std::string out_dir = ".";
  std::string scale = "desk";              // desk | paper
};

// Exit codes for the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitIoError = 4;

// Solver defaults sized to the scenario. The load-price step must stay below
// the stability bound of the exponential target map (step * U_P * K < 1), and
// U_P is dominated by the circuit power, so the step scales with
// 1 / (circuit_power_w * n_users).
SolverConfig scaled_solver_config(const ScenarioConfig& cfg);

// Resolve the scenario + solver configuration from scale profile, optional
// config file and flag overrides (in that order of precedence).
struct ResolvedConfig {
  ScenarioConfig scenario;
  SolverConfig solver;
};
ResolvedConfig resolve_config(const ExperimentArgs& args);

// Runs the selected algorithm(s), writes trace.csv / load.csv / ee_cdf.csv /
// rate_cdf.csv / summary.json under out_dir (per-algorithm subdirectories for
// --algo both) and returns the process exit code. Diagnostics go to err.
int run_experiment(const ExperimentArgs& args, std::ostream& out, std::ostream& err);

}  // namespace udn

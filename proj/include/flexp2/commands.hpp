#pragma once

#include <string>

#include "flexp2/benchmark.hpp"
#include "flexp2/solver.hpp"
#include "flexp2/synth.hpp"

namespace flexp2 {

// Command implementations behind the CLI, callable in-process so tests can
// drive them directly. All paths are created with LF endings and overwrites
// refuse unless force is set.

/// Writes <out_path> in P2RT v1 plus <out_path>.truth; returns the seed used.
std::uint64_t cmd_simulate(const SynthSpec& spec, const std::string& out_path, bool force = false);

struct DecomposeResult {
  Parafac2Factors factors;
  RunReport report;
  double relative_fit = 0.0;
  int best_init = 0;  ///< index of the initialization with the lowest reconstruction error
};

/// Loads and validates a P2RT file, runs the chosen solver from `inits`
/// random starts (seeds derived from config.seed), keeps the run with the
/// lowest reconstruction error, and writes factor CSVs (A.csv, C.csv,
/// Bstar.csv, B_k.csv, P_k.csv), report.csv, residuals.csv and run.json
/// into out_dir.
DecomposeResult cmd_decompose(const std::string& data_path, const SolverConfig& config, SolverKind solver,
                              int inits, const std::string& out_dir, bool force = false);

/// Runs the Monte Carlo grid and writes the detail and summary CSVs.
void cmd_benchmark(const BenchmarkGrid& grid, const SolverConfig& config, const std::string& out_path,
                   const std::string& summary_path, int jobs = 0, bool force = false);

}  // namespace flexp2

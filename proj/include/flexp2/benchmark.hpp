#pragma once

#include <string>
#include <vector>

#include "flexp2/solver.hpp"
#include "flexp2/synth.hpp"

namespace flexp2 {

enum class SolverKind { Classic, Flexible };

std::string to_string(SolverKind kind);

/// Monte Carlo comparison grid: noise levels x replicates x solvers, each
/// cell decomposed from inits_per_run shared random initializations.
///
/// With auto_snr set (the default), each cell hands the solver the expected
/// SNR of its own data, 10*log10((||M||^2 - n*m*K*sigma^2) / (n*m*K*sigma^2)),
/// which the experiment knows because it chose sigma. Disable it to run every
/// cell at the config's fixed snr_db.
struct BenchmarkGrid {
  std::vector<double> sigmas = {5e-3, 1e-3, 5e-4, 1e-4, 5e-5, 1e-5};
  int replicates = 50;
  int inits_per_run = 5;
  std::vector<SolverKind> solvers = {SolverKind::Classic, SolverKind::Flexible};
  std::uint64_t base_seed = 0;
  SynthSpec spec;  ///< sigma is taken from `sigmas`, seed from `base_seed`
  bool auto_snr = true;
};

/// One (sigma, replicate, solver) cell of the detail table.
struct BenchmarkRow {
  double sigma = 0.0;
  int replicate = 0;
  SolverKind solver = SolverKind::Classic;
  double best_error = 0.0;         ///< relative B error of the best-of-N run
  double single_init_error = 0.0;  ///< relative B error of the first init's run
  double best_fit = 0.0;           ///< relative fit of the best-of-N run
  int iterations = 0;
  double seconds = 0.0;
};

/// Aggregates per (sigma, solver) for both error variants.
struct BenchmarkSummary {
  double sigma = 0.0;
  SolverKind solver = SolverKind::Classic;
  double mean_best = 0.0, median_best = 0.0, q20_best = 0.0, q80_best = 0.0;
  double mean_single = 0.0, median_single = 0.0, q20_single = 0.0, q80_single = 0.0;
};

/// Runs the grid. Replicates execute concurrently on up to `jobs` threads;
/// every cell derives its seeds independently so results do not depend on
/// scheduling, and rows come back sorted by (sigma, replicate, solver).
std::vector<BenchmarkRow> run_benchmark(const BenchmarkGrid& grid, const SolverConfig& config, int jobs = 0);

std::vector<BenchmarkSummary> summarize(const std::vector<BenchmarkRow>& rows);

/// Lower quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

void write_benchmark_csv(const std::vector<BenchmarkRow>& rows, const std::string& path);
void write_summary_csv(const std::vector<BenchmarkSummary>& summaries, const std::string& path);

}  // namespace flexp2

#include "flexp2/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "flexp2/classic.hpp"
#include "flexp2/errors.hpp"
#include "flexp2/flexible.hpp"
#include "flexp2/io.hpp"
#include "flexp2/metrics.hpp"
#include "flexp2/rng.hpp"

namespace flexp2 {

namespace {
struct SolveOutcome {
  Parafac2Factors factors;
  RunReport report;
  double fit_residual_sum = 0.0;
};

SolveOutcome solve_one(SolverKind kind, const RaggedTensor& tensor, const SolverConfig& config,
                       const Parafac2Factors& init) {
  SolveOutcome out;
  if (kind == SolverKind::Classic)
    std::tie(out.factors, out.report) = run_classic(tensor, config, init);
  else
    std::tie(out.factors, out.report) = run_flexible(tensor, config, init);
  out.fit_residual_sum =
      std::accumulate(out.report.fit_residuals.begin(), out.report.fit_residuals.end(), 0.0);
  return out;
}
}  // namespace

std::string to_string(SolverKind kind) { return kind == SolverKind::Classic ? "classic" : "flexible"; }

std::vector<BenchmarkRow> run_benchmark(const BenchmarkGrid& grid, const SolverConfig& config, int jobs) {
  if (grid.sigmas.empty() || grid.replicates < 1 || grid.inits_per_run < 1 || grid.solvers.empty())
    throw InvalidConfig("benchmark grid is empty");
  for (double sigma : grid.sigmas)
    if (sigma <= 0.0) throw InvalidConfig("noise levels must be positive");
  validate(config);
  if (grid.spec.m < grid.spec.rank) throw InvalidConfig("slice width is smaller than the rank");

  struct Task {
    double sigma;
    int replicate;
  };
  std::vector<Task> tasks;
  for (double sigma : grid.sigmas)
    for (int rep = 0; rep < grid.replicates; ++rep) tasks.push_back({sigma, rep});

  const std::size_t rows_per_task = grid.solvers.size();
  std::vector<BenchmarkRow> rows(tasks.size() * rows_per_task);

  auto run_task = [&](std::size_t index) {
    const Task& task = tasks[index];
    SynthSpec spec = grid.spec;
    spec.sigma = task.sigma;
    spec.seed = grid.base_seed + static_cast<std::uint64_t>(task.replicate);
    auto [tensor, truth] = gen_dataset(spec);

    SolverConfig config_cell = config;
    config_cell.rank = spec.rank;
    if (grid.auto_snr) {
      const double noise_power =
          static_cast<double>(spec.n * spec.m * spec.K) * spec.sigma * spec.sigma;
      const double signal_power = std::max(tensor.total_norm * tensor.total_norm - noise_power, noise_power * 1e-6);
      config_cell.snr_db = 10.0 * std::log10(signal_power / noise_power);
    }

    // initialization draws are shared across solvers, so the comparison is paired
    std::vector<Parafac2Factors> inits;
    inits.reserve(static_cast<std::size_t>(grid.inits_per_run));
    for (int i = 0; i < grid.inits_per_run; ++i)
      inits.push_back(
          initial_factors(tensor, spec.rank, rng::derive(spec.seed, kInitStreamTag + static_cast<std::uint64_t>(i))));

    for (std::size_t s = 0; s < grid.solvers.size(); ++s) {
      const SolverKind kind = grid.solvers[s];
      SolveOutcome best;
      double single_error = 0.0;
      bool have_best = false;
      for (int i = 0; i < grid.inits_per_run; ++i) {
        SolveOutcome outcome = solve_one(kind, tensor, config_cell, inits[static_cast<std::size_t>(i)]);
        if (i == 0) single_error = relative_B_error(outcome.factors, truth);
        if (!have_best || outcome.fit_residual_sum < best.fit_residual_sum) {
          best = std::move(outcome);
          have_best = true;
        }
      }
      BenchmarkRow& row = rows[index * rows_per_task + s];
      row.sigma = task.sigma;
      row.replicate = task.replicate;
      row.solver = kind;
      row.best_error = relative_B_error(best.factors, truth);
      row.single_init_error = single_error;
      row.best_fit = relative_fit(tensor, best.factors);
      row.iterations = best.report.iterations;
      row.seconds = best.report.wall_seconds;
    }
  };

  int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size() && !failed.load(); i = next.fetch_add(1)) {
          try {
            run_task(i);
          } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true);
          }
        }
      });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  return rows;
}

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  if (values.empty()) return 0.0;
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - std::floor(pos);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

std::vector<BenchmarkSummary> summarize(const std::vector<BenchmarkRow>& rows) {
  std::vector<std::pair<double, SolverKind>> groups;
  for (const auto& row : rows) {
    const std::pair<double, SolverKind> key{row.sigma, row.solver};
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
  }

  std::vector<BenchmarkSummary> out;
  out.reserve(groups.size());
  for (const auto& [sigma, solver] : groups) {
    std::vector<double> best, single;
    for (const auto& row : rows)
      if (row.sigma == sigma && row.solver == solver) {
        best.push_back(row.best_error);
        single.push_back(row.single_init_error);
      }
    BenchmarkSummary s;
    s.sigma = sigma;
    s.solver = solver;
    s.mean_best = std::accumulate(best.begin(), best.end(), 0.0) / static_cast<double>(best.size());
    s.median_best = quantile(best, 0.5);
    s.q20_best = quantile(best, 0.2);
    s.q80_best = quantile(best, 0.8);
    s.mean_single = std::accumulate(single.begin(), single.end(), 0.0) / static_cast<double>(single.size());
    s.median_single = quantile(single, 0.5);
    s.q20_single = quantile(single, 0.2);
    s.q80_single = quantile(single, 0.8);
    out.push_back(s);
  }
  return out;
}

void write_benchmark_csv(const std::vector<BenchmarkRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "sigma,replicate,solver,best_error,single_init_error,best_fit,iterations,seconds\n";
  for (const auto& row : rows)
    out << format_double(row.sigma) << ',' << row.replicate << ',' << to_string(row.solver) << ','
        << format_double(row.best_error) << ',' << format_double(row.single_init_error) << ','
        << format_double(row.best_fit) << ',' << row.iterations << ',' << format_double(row.seconds) << '\n';
}

void write_summary_csv(const std::vector<BenchmarkSummary>& summaries, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "sigma,solver,mean_best,median_best,q20_best,q80_best,mean_single,median_single,q20_single,q80_single\n";
  for (const auto& s : summaries)
    out << format_double(s.sigma) << ',' << to_string(s.solver) << ',' << format_double(s.mean_best) << ','
        << format_double(s.median_best) << ',' << format_double(s.q20_best) << ',' << format_double(s.q80_best)
        << ',' << format_double(s.mean_single) << ',' << format_double(s.median_single) << ','
        << format_double(s.q20_single) << ',' << format_double(s.q80_single) << '\n';
}

}  // namespace flexp2

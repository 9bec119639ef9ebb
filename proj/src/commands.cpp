#include "flexp2/commands.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "flexp2/classic.hpp"
#include "flexp2/errors.hpp"
#include "flexp2/flexible.hpp"
#include "flexp2/io.hpp"
#include "flexp2/metrics.hpp"
#include "flexp2/rng.hpp"

namespace fs = std::filesystem;

namespace flexp2 {

namespace {

void refuse_existing(const std::string& path, bool force) {
  if (!force && fs::exists(path)) throw RefusedOverwrite("'" + path + "' exists, pass --force to overwrite");
}

void write_report_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const std::size_t K = report.mu_trace.empty() ? 0 : report.mu_trace.front().size();
  out << "iter,objective";
  for (std::size_t k = 0; k < K; ++k) out << ",mu_" << (k + 1);
  out << '\n';
  for (std::size_t t = 0; t < report.objective_trace.size(); ++t) {
    out << (t + 1) << ',' << format_double(report.objective_trace[t]);
    if (t < report.mu_trace.size())
      for (double mu : report.mu_trace[t]) out << ',' << format_double(mu);
    out << '\n';
  }
}

void write_residuals_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "slice,fit_residual,coupling_residual\n";
  for (std::size_t k = 0; k < report.fit_residuals.size(); ++k)
    out << (k + 1) << ',' << format_double(report.fit_residuals[k]) << ','
        << format_double(report.coupling_residuals[k]) << '\n';
}

}  // namespace

std::uint64_t cmd_simulate(const SynthSpec& spec, const std::string& out_path, bool force) {
  refuse_existing(out_path, force);
  refuse_existing(out_path + ".truth", force);
  auto [tensor, truth] = gen_dataset(spec);
  save_p2rt(tensor, out_path);
  save_truth(truth, out_path + ".truth");
  return spec.seed;
}

DecomposeResult cmd_decompose(const std::string& data_path, const SolverConfig& config, SolverKind solver,
                              int inits, const std::string& out_dir, bool force) {
  if (inits < 1) throw InvalidConfig("at least one initialization is required");
  const RaggedTensor tensor = load_p2rt(data_path);
  validate(tensor);

  DecomposeResult result;
  double best_residual = 0.0;
  for (int i = 0; i < inits; ++i) {
    const auto init =
        initial_factors(tensor, config.rank, rng::derive(config.seed, kInitStreamTag + static_cast<std::uint64_t>(i)));
    auto [factors, report] = solver == SolverKind::Classic ? run_classic(tensor, config, init)
                                                           : run_flexible(tensor, config, init);
    const double residual = std::accumulate(report.fit_residuals.begin(), report.fit_residuals.end(), 0.0);
    if (i == 0 || residual < best_residual) {
      best_residual = residual;
      result.factors = std::move(factors);
      result.report = std::move(report);
      result.best_init = i;
    }
  }
  result.relative_fit = relative_fit(tensor, result.factors);

  fs::create_directories(out_dir);
  const auto in_dir = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };
  refuse_existing(in_dir("A.csv"), force);

  write_matrix_csv(result.factors.A, in_dir("A.csv"));
  write_matrix_csv(result.factors.C, in_dir("C.csv"));
  write_matrix_csv(result.factors.Bstar, in_dir("Bstar.csv"));
  for (std::size_t k = 0; k < result.factors.B.size(); ++k) {
    write_matrix_csv(result.factors.B[k], in_dir("B_" + std::to_string(k + 1) + ".csv"));
    write_matrix_csv(result.factors.P[k], in_dir("P_" + std::to_string(k + 1) + ".csv"));
  }
  write_report_csv(result.report, in_dir("report.csv"));
  write_residuals_csv(result.report, in_dir("residuals.csv"));

  nlohmann::json meta;
  meta["data_path"] = data_path;
  meta["solver"] = to_string(solver);
  meta["inits"] = inits;
  meta["best_init"] = result.best_init;
  meta["config"] = {{"rank", config.rank},
                    {"max_iter", config.max_iter},
                    {"rel_tol", config.rel_tol},
                    {"snr_db", config.snr_db},
                    {"mu_init_factor", config.mu_init_factor},
                    {"mu_growth", config.mu_growth},
                    {"mu_cap", config.mu_cap},
                    {"nnls_inner_iters", config.nnls_inner_iters},
                    {"seed", config.seed}};
  meta["iterations"] = result.report.iterations;
  meta["termination"] = result.report.termination == Termination::Converged ? "converged" : "max_iter";
  meta["wall_seconds"] = result.report.wall_seconds;
  meta["relative_fit"] = result.relative_fit;
  meta["objective_increases"] = result.report.objective_increases;
  std::ofstream meta_out(in_dir("run.json"), std::ios::binary);
  if (!meta_out) throw IoError("cannot open run.json for writing");
  meta_out << meta.dump(2) << '\n';

  return result;
}

void cmd_benchmark(const BenchmarkGrid& grid, const SolverConfig& config, const std::string& out_path,
                   const std::string& summary_path, int jobs, bool force) {
  refuse_existing(out_path, force);
  refuse_existing(summary_path, force);
  const auto rows = run_benchmark(grid, config, jobs);
  write_benchmark_csv(rows, out_path);
  write_summary_csv(summarize(rows), summary_path);
}

}  // namespace flexp2

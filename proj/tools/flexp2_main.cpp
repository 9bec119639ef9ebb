#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "flexp2/commands.hpp"
#include "flexp2/errors.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitBadInput = 2;

std::vector<flexp2::SolverKind> parse_solvers(const std::vector<std::string>& names) {
  std::vector<flexp2::SolverKind> kinds;
  for (const auto& name : names) {
    if (name == "classic")
      kinds.push_back(flexp2::SolverKind::Classic);
    else if (name == "flexible")
      kinds.push_back(flexp2::SolverKind::Flexible);
    else
      throw CLI::ValidationError("--solvers", "unknown solver '" + name + "'");
  }
  return kinds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled nonnegative PARAFAC2 decompositions, synthetic data and benchmarks"};
  app.require_subcommand(1);

  flexp2::SynthSpec spec;
  flexp2::SolverConfig config;
  std::string data_path;
  std::string out_path = "data.p2rt";
  std::string out_dir = "decomposition";
  std::string bench_out = "benchmark.csv";
  std::string bench_summary;
  std::string solver_name = "flexible";
  std::vector<std::string> solver_names = {"classic", "flexible"};
  std::vector<double> sigmas = {5e-3, 1e-3, 5e-4, 1e-4, 5e-5, 1e-5};
  int inits = 5;
  int replicates = 50;
  int jobs = 0;
  bool force = false;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic shifted-PARAFAC dataset");
  sim->add_option("--n", spec.n, "Rows per slice")->capture_default_str();
  sim->add_option("--m", spec.m, "Columns per slice")->capture_default_str();
  sim->add_option("--slices", spec.K, "Number of slices")->capture_default_str();
  sim->add_option("--rank", spec.rank, "Number of components")->capture_default_str();
  sim->add_option("--sigma", spec.sigma, "Noise standard deviation")->capture_default_str();
  sim->add_option("--shift-step", spec.shift_step, "Row shift between consecutive slices")->capture_default_str();
  sim->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  sim->add_option("--out", out_path, "Output path (a .truth sibling is written next to it)")
      ->capture_default_str();
  sim->add_flag("--force", force, "Overwrite existing files");

  auto* dec = app.add_subcommand("decompose", "Decompose a P2RT dataset");
  dec->add_option("data", data_path, "Input P2RT file")->required();
  dec->add_option("--rank", config.rank, "Number of components")->capture_default_str();
  dec->add_option("--solver", solver_name, "Solver to run")->check(CLI::IsMember({"classic", "flexible"}))
      ->capture_default_str();
  dec->add_option("--inits", inits, "Random initializations, best kept by reconstruction error")
      ->capture_default_str();
  dec->add_option("--max-iter", config.max_iter, "Maximum outer iterations")->capture_default_str();
  dec->add_option("--tol", config.rel_tol, "Relative objective-change tolerance")->capture_default_str();
  dec->add_option("--snr-db", config.snr_db, "Assumed signal-to-noise ratio in dB")->capture_default_str();
  dec->add_option("--mu-growth", config.mu_growth, "Coupling growth factor per iteration")->capture_default_str();
  dec->add_option("--mu-cap", config.mu_cap, "Coupling growth cap")->capture_default_str();
  dec->add_option("--seed", config.seed, "Seed for the initialization draws")->capture_default_str();
  dec->add_option("--out-dir", out_dir, "Directory for factor CSVs, report.csv and run.json")
      ->capture_default_str();
  dec->add_flag("--force", force, "Overwrite existing outputs");

  auto* bench = app.add_subcommand("benchmark", "Monte Carlo solver comparison over a noise grid");
  bench->add_option("--sigmas", sigmas, "Noise levels")->capture_default_str();
  bench->add_option("--replicates", replicates, "Datasets per noise level")->capture_default_str();
  bench->add_option("--inits", inits, "Initializations per run")->capture_default_str();
  bench->add_option("--solvers", solver_names, "Solvers to compare")->capture_default_str();
  bench->add_option("--n", spec.n, "Rows per slice")->capture_default_str();
  bench->add_option("--m", spec.m, "Columns per slice")->capture_default_str();
  bench->add_option("--slices", spec.K, "Number of slices")->capture_default_str();
  bench->add_option("--rank", spec.rank, "Number of components")->capture_default_str();
  bench->add_option("--shift-step", spec.shift_step, "Row shift between consecutive slices")->capture_default_str();
  bench->add_option("--max-iter", config.max_iter, "Maximum outer iterations")->capture_default_str();
  bench->add_option("--tol", config.rel_tol, "Relative objective-change tolerance")->capture_default_str();
  auto* bench_snr =
      bench->add_option("--snr-db", config.snr_db, "Fixed assumed SNR in dB (default: derived per noise level)");
  bench->add_option("--mu-growth", config.mu_growth, "Coupling growth factor per iteration")->capture_default_str();
  bench->add_option("--mu-cap", config.mu_cap, "Coupling growth cap")->capture_default_str();
  bench->add_option("--seed", config.seed, "Base seed; replicate i uses seed + i")->capture_default_str();
  bench->add_option("--jobs", jobs, "Concurrent replicates (0 = all processors)")->capture_default_str();
  bench->add_option("--out", bench_out, "Detail CSV path")->capture_default_str();
  bench->add_option("--summary", bench_summary, "Summary CSV path (default: <out>_summary.csv)")
      ->capture_default_str();
  bench->add_flag("--force", force, "Overwrite existing outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  try {
    if (sim->parsed()) {
      const auto seed = flexp2::cmd_simulate(spec, out_path, force);
      std::cout << "wrote " << out_path << " and " << out_path << ".truth (seed " << seed << ")\n";
    } else if (dec->parsed()) {
      const auto kind = solver_name == "classic" ? flexp2::SolverKind::Classic : flexp2::SolverKind::Flexible;
      const auto result = flexp2::cmd_decompose(data_path, config, kind, inits, out_dir, force);
      std::cout << "solver " << solver_name << ", best init " << result.best_init << ", "
                << result.report.iterations << " iterations, relative fit " << result.relative_fit << '\n'
                << "factors written to " << out_dir << '\n';
    } else if (bench->parsed()) {
      flexp2::BenchmarkGrid grid;
      grid.sigmas = sigmas;
      grid.replicates = replicates;
      grid.inits_per_run = inits;
      grid.solvers = parse_solvers(solver_names);
      grid.base_seed = config.seed;
      grid.spec = spec;
      grid.auto_snr = bench_snr->count() == 0;
      if (bench_summary.empty()) {
        const auto dot = bench_out.rfind('.');
        bench_summary = dot == std::string::npos ? bench_out + "_summary"
                                                 : bench_out.substr(0, dot) + "_summary" + bench_out.substr(dot);
      }
      config.rank = spec.rank;
      flexp2::cmd_benchmark(grid, config, bench_out, bench_summary, jobs, force);
      std::cout << "wrote " << bench_out << " and " << bench_summary << '\n';
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const flexp2::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const flexp2::InvalidConfig& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const flexp2::ShapeMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const flexp2::EmptyTensor& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const flexp2::NonFinite& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const flexp2::RefusedOverwrite& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "flexp2/tensor.hpp"

namespace flexp2 {

struct SolverConfig {
  int rank = 1;
  int max_iter = 1000;
  double rel_tol = 1e-8;        ///< on the relative objective change per iteration
  double snr_db = 20.0;         ///< assumed signal-to-noise ratio, dB
  double mu_init_factor = 1e-1;
  double mu_growth = 1.02;
  double mu_cap = 10.0;
  int nnls_inner_iters = 50;
  std::uint64_t seed = 0;
};

enum class Termination { Converged, MaxIter };

/// Throws InvalidConfig when a field violates its invariants.
void validate(const SolverConfig& config);

struct RunReport {
  std::vector<double> objective_trace;        ///< objective after each outer iteration
  std::vector<double> fit_residuals;          ///< ||M_k - A D_k B_k^T||_F^2 at termination
  std::vector<double> coupling_residuals;     ///< ||B_k - P_k Bstar||_F^2 / ||B_k||_F^2 at termination
  std::vector<std::vector<double>> mu_trace;  ///< mu per slice, recorded at the end of each iteration
  int iterations = 0;
  Termination termination = Termination::MaxIter;
  double wall_seconds = 0.0;
  int objective_increases = 0;  ///< iterations whose objective rose by > 1e-10 relative
  bool mu_calibrated = false;   ///< SNR recalibration ran (flexible solver only)
};

/// Called after each outer iteration with the current factor estimates.
using IterationCallback = std::function<void(int iteration, const Parafac2Factors&)>;

/// Default random initialization shared by both solvers.
///
/// A, C and every B_k get i.i.d. uniform [0,1) entries from substreams of
/// `seed`; P_k starts as the zero-padded identity and Bstar as the
/// column-normalized mean of the top r x r blocks of the B_k.
Parafac2Factors initial_factors(const RaggedTensor& tensor, int rank, std::uint64_t seed);

/// Initialization i of a multi-start run draws from substream
/// (seed, kInitStreamTag + i), so paired comparisons can replay it.
constexpr std::uint64_t kInitStreamTag = 1000;

}  // namespace flexp2

#pragma once

#include "flexp2/solver.hpp"

namespace flexp2 {

// Flexibly coupled PARAFAC2 with nonnegativity on A, C and every B_k.
//
// The hard constraint B_k = P_k Bstar is replaced by penalties
// mu_k ||B_k - P_k Bstar||_F^2 added to the fit term, so the coupled mode
// can be estimated by plain nonnegative least squares. The mu_k start small,
// are recalibrated against the assumed SNR after the first sweep, and then
// grow geometrically until a slice's relative coupling residual falls below
// the SNR target, at which point that slice's mu_k freezes.

/// Per-slice coupling strengths and their schedule state.
struct MuState {
  std::vector<double> mu;
  enum class Phase { Initial, Calibrated } phase = Phase::Initial;
  double growth = 1.02;
  double cap = 10.0;
};

/// Every slice divided by tensor.total_norm; the result has total norm 1.
/// Throws ZeroTensor when the input norm is 0.
RaggedTensor preprocess(const RaggedTensor& tensor);

/// Small initial strengths: mu_k = mu_init_factor * fit_k / ||B_k||_F^2,
/// floored at 1e-12 so a perfect initial fit cannot switch coupling off.
/// Throws DegenerateFactor when some ||B_k||_F = 0.
MuState init_mu(const RaggedTensor& tensor, const Parafac2Factors& factors, const SolverConfig& config);

/// SNR-based strengths applied once at the end of the first iteration:
/// mu_k = 10^(-snr_db/10) * fit_k / ||B_k - P_k Bstar||_F^2. A slice with
/// zero coupling residual gets mu_cap.
MuState recalibrate_mu(const RaggedTensor& tensor, const Parafac2Factors& factors, const SolverConfig& config);

/// Multiplies every mu_k <= cap by the growth factor; entries above the cap
/// are left alone. Requires the calibrated phase.
MuState grow_mu(const MuState& state);

/// P_k = procrustes(B_k Bstar^T), the coupling matrix closest to B_k.
Matrix update_P(const Matrix& b_k, const Matrix& bstar, bool* rank_deficient = nullptr);

/// Column-normalized weighted average of the P_k^T B_k with weights mu_k.
Matrix update_Bstar(const std::vector<Matrix>& p, const std::vector<Matrix>& b, const MuState& mu,
                    bool normalize = true);

/// Nonnegative update of A over all slices at once; columns are normalized
/// afterwards with the norms multiplied into C.
void update_A(const RaggedTensor& tensor, Parafac2Factors& factors, int nnls_inner_iters);

/// Nonnegative update of one coupled factor from the augmented problem
/// gram = diag(c_k) A^T A diag(c_k) + mu_k I, cross = M_k^T A diag(c_k) + mu_k P_k Bstar.
Matrix update_Bk(const Matrix& m_k, const Matrix& a, const Vector& c_k, const Matrix& p_k, const Matrix& bstar,
                 double mu_k, const Matrix& warm_start, int nnls_inner_iters);

/// Nonnegative update of diag(D_k) from the vectorized slice problem.
Vector update_Dk(const Matrix& m_k, const Matrix& a, const Matrix& b_k, const Vector& warm_start,
                 int nnls_inner_iters);

/// sum_k ||M_k - A D_k B_k^T||_F^2 + mu_k ||B_k - P_k Bstar||_F^2.
double objective(const RaggedTensor& tensor, const Parafac2Factors& factors, const MuState& mu);

/// Switches meant for experiments and tests; defaults follow the algorithm.
struct FlexibleOptions {
  bool grow_mu = true;           ///< geometric mu growth from iteration 2 on
  bool recalibrate_mu = true;    ///< SNR recalibration at the end of iteration 1
  bool normalize_bstar = true;   ///< columnwise normalization in the Bstar step
  IterationCallback on_iteration;
};

std::pair<Parafac2Factors, RunReport> run_flexible(const RaggedTensor& tensor, const SolverConfig& config,
                                                   const Parafac2Factors& init, const FlexibleOptions& options = {});

}  // namespace flexp2

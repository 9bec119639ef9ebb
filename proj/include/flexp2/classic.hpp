#pragma once

#include "flexp2/solver.hpp"

namespace flexp2 {

// Unconstrained PARAFAC2 baseline: alternate an SVD Procrustes step for the
// coupling matrices, project each slice into the shared r-column space, and
// run one ALS pass of the resulting CP problem.

/// Minimizer of ||M_k - A diag(c_k) Bstar^T P_k^T||_F^2 over orthonormal-column P_k.
Matrix update_projection_classic(const Matrix& m_k, const Matrix& a, const Vector& c_k, const Matrix& bstar,
                                 bool* rank_deficient = nullptr);

/// Frontal slices Y_k = M_k P_k of the projected n x r x K tensor.
std::vector<Matrix> project_slices(const RaggedTensor& tensor, const std::vector<Matrix>& p);

/// One least-squares update of each CP factor, in order A, Bstar, C, on the
/// projected tensor Y. A and Bstar come out column-normalized with the scale
/// absorbed into C. The CP fit does not increase.
void cp_als_pass(const std::vector<Matrix>& y, Matrix& a, Matrix& bstar, Matrix& c);

/// Full baseline solve. Factors come back with B_k materialized as P_k * Bstar,
/// so coupling residuals in the report are identically zero.
std::pair<Parafac2Factors, RunReport> run_classic(const RaggedTensor& tensor, const SolverConfig& config,
                                                  const Parafac2Factors& init,
                                                  const IterationCallback& on_iteration = {});

}  // namespace flexp2

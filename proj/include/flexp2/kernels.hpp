#pragma once

#include "flexp2/tensor.hpp"

namespace flexp2 {

/// Nonnegative least squares in normal-equation form.
///
/// Minimizes 1/2 tr(X G X^T) - tr(S X^T) over X >= 0, which for a design
/// matrix F and targets Y (one row of X per row of Y) corresponds to
/// G = F^T F and S = Y F. Rows of X are independent problems sharing G.
struct NnlsProblem {
  Matrix gram;   ///< r x r symmetric PSD
  Matrix cross;  ///< q x r
  Matrix x0;     ///< q x r nonnegative warm start
};

/// Cyclic coordinate descent over columns, warm-started at x0.
///
/// Each column update is the exact single-variable minimizer clipped at 0,
/// applied to all rows at once. Runs at most inner_iters full sweeps,
/// exiting early when the largest elementwise change drops below
/// 1e-10 * (1 + max|X|). A zero (or negative) gram diagonal marks a dead
/// component: that column of X is set to 0 for this call rather than
/// raising, so the outer solver survives transient component death.
Matrix nnls(const NnlsProblem& problem, int inner_iters);

/// Closest orthonormal-column matrix to m in the trace sense.
///
/// Returns P = U_r V_r^T from the thin SVD of m; P maximizes tr(P^T m) over
/// all P with P^T P = I. When the smallest singular value is below
/// 1e-12 times the largest the maximizer is not unique; a valid P from the
/// SVD basis is still returned and *rank_deficient (if given) is set.
/// Degenerate ties resolve to whatever the SVD returns, so determinism is
/// per build only.
Matrix procrustes(const Matrix& m, bool* rank_deficient = nullptr);

/// Column-wise Kronecker product: column p is kron(x.col(p), y.col(p)),
/// entry (i * y.rows() + j, p) = x(i,p) * y(j,p). Throws ColumnMismatch.
Matrix khatri_rao(const Matrix& x, const Matrix& y);

}  // namespace flexp2

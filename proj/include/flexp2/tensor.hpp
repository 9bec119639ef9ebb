#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace flexp2 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A third-order ragged tensor: K slices sharing the first dimension.
///
/// Slice k is an n x m_k matrix; the m_k may differ between slices. The
/// total l2 norm over all entries is cached at construction and never
/// recomputed, so downstream normalization is applied exactly once.
/// Instances are treated as immutable after construction.
struct RaggedTensor {
  Index n = 0;                 ///< rows shared by every slice
  std::vector<Matrix> slices;  ///< K matrices, slice k is n x m_k
  double total_norm = 0.0;     ///< sqrt(sum_k ||M_k||_F^2), cached

  Index num_slices() const { return static_cast<Index>(slices.size()); }
  Index width(Index k) const { return slices[static_cast<std::size_t>(k)].cols(); }

  std::vector<Index> slice_widths() const {
    std::vector<Index> w;
    w.reserve(slices.size());
    for (const auto& s : slices) w.push_back(s.cols());
    return w;
  }

  /// Builds a tensor from slices, caching the total norm. Shape and
  /// finiteness are checked by validate(), not here.
  static RaggedTensor from_slices(std::vector<Matrix> slices);
};

/// Checks all RaggedTensor invariants.
///
/// Throws EmptyTensor when K = 0 or some m_k = 0, ShapeMismatch when a slice
/// row count differs from n, NonFinite on NaN/Inf entries.
void validate(const RaggedTensor& tensor);

/// One PARAFAC2 factor set.
///
/// C stores the diagonals of the D_k stacked in rows (K x r), so slice k is
/// modeled as A * diag(C.row(k)) * B[k]^T. P[k] maps the latent r x r factor
/// Bstar into slice k's row space; B[k] is coupled to P[k] * Bstar either
/// exactly (classic solver) or through a penalty (flexible solver).
struct Parafac2Factors {
  Matrix A;               ///< n x r
  Matrix C;               ///< K x r, row k = diag(D_k)
  std::vector<Matrix> B;  ///< K matrices, m_k x r
  std::vector<Matrix> P;  ///< K orthonormal-column matrices, m_k x r
  Matrix Bstar;           ///< r x r latent factor

  Index rank() const { return A.cols(); }
  Index num_slices() const { return static_cast<Index>(B.size()); }
};

/// A * diag(C.row(k)) * B[k]^T for slice k. Throws IndexOutOfRange.
Matrix reconstruct_slice(const Parafac2Factors& factors, Index k);

/// Per-slice squared Frobenius residuals ||M_k - A D_k B_k^T||_F^2.
std::vector<double> fit_residuals(const RaggedTensor& tensor, const Parafac2Factors& factors);

/// Rescales each column to unit l2 norm and returns the original norms.
///
/// Zero columns are passed through unchanged with recorded norm 0; the
/// nonnegative solvers can transiently zero a component and must keep going.
std::pair<Matrix, Vector> normalize_columns(const Matrix& m);

}  // namespace flexp2

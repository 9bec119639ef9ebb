#include "flexp2/kernels.hpp"

#include <Eigen/SVD>
#include <string>

#include "flexp2/errors.hpp"

namespace flexp2 {

Matrix nnls(const NnlsProblem& problem, int inner_iters) {
  const Index r = problem.gram.rows();
  Matrix x = problem.x0;
  for (int sweep = 0; sweep < inner_iters; ++sweep) {
    double max_change = 0.0;
    double max_abs = 0.0;
    for (Index p = 0; p < r; ++p) {
      const double diag = problem.gram(p, p);
      if (diag <= 0.0) {
        // dead component: its unconstrained value is unbounded or undefined,
        // the clipped convention parks it at zero for this call
        max_change = std::max(max_change, x.col(p).cwiseAbs().maxCoeff());
        x.col(p).setZero();
        continue;
      }
      Vector updated = (x.col(p) + (problem.cross.col(p) - x * problem.gram.col(p)) / diag).cwiseMax(0.0);
      max_change = std::max(max_change, (updated - x.col(p)).cwiseAbs().maxCoeff());
      x.col(p) = updated;
      max_abs = std::max(max_abs, updated.cwiseAbs().maxCoeff());
    }
    if (max_change < 1e-10 * (1.0 + max_abs)) break;
  }
  return x;
}

Matrix procrustes(const Matrix& m, bool* rank_deficient) {
  if (m.rows() < m.cols())
    throw ShapeMismatch("procrustes needs at least as many rows as columns, got " + std::to_string(m.rows()) +
                        "x" + std::to_string(m.cols()));
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (rank_deficient != nullptr) {
    const double largest = sv.size() > 0 ? sv(0) : 0.0;
    *rank_deficient = sv.size() == 0 || sv(sv.size() - 1) < 1e-12 * largest;
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix khatri_rao(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols())
    throw ColumnMismatch("khatri_rao operands have " + std::to_string(x.cols()) + " and " +
                         std::to_string(y.cols()) + " columns");
  Matrix out(x.rows() * y.rows(), x.cols());
  for (Index p = 0; p < x.cols(); ++p)
    for (Index i = 0; i < x.rows(); ++i) out.col(p).segment(i * y.rows(), y.rows()) = x(i, p) * y.col(p);
  return out;
}

}  // namespace flexp2

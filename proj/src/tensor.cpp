#include "flexp2/tensor.hpp"

#include <cmath>
#include <string>

#include "flexp2/errors.hpp"

namespace flexp2 {

RaggedTensor RaggedTensor::from_slices(std::vector<Matrix> slices) {
  RaggedTensor t;
  t.n = slices.empty() ? 0 : slices.front().rows();
  double sq = 0.0;
  for (const auto& s : slices) sq += s.squaredNorm();
  t.total_norm = std::sqrt(sq);
  t.slices = std::move(slices);
  return t;
}

void validate(const RaggedTensor& tensor) {
  if (tensor.slices.empty() || tensor.n < 1) throw EmptyTensor("tensor has no slices");
  for (Index k = 0; k < tensor.num_slices(); ++k) {
    const Matrix& s = tensor.slices[static_cast<std::size_t>(k)];
    if (s.cols() < 1) throw EmptyTensor("slice " + std::to_string(k) + " has no columns");
    if (s.rows() != tensor.n)
      throw ShapeMismatch("slice " + std::to_string(k) + " has " + std::to_string(s.rows()) + " rows, expected " +
                          std::to_string(tensor.n));
    if (!s.allFinite()) throw NonFinite("slice " + std::to_string(k) + " contains NaN or Inf");
  }
  double sq = 0.0;
  for (const auto& s : tensor.slices) sq += s.squaredNorm();
  const double norm = std::sqrt(sq);
  if (std::abs(tensor.total_norm - norm) > 1e-12 * std::max(1.0, norm))
    throw NonFinite("cached total_norm is stale");
}

Matrix reconstruct_slice(const Parafac2Factors& factors, Index k) {
  if (k < 0 || k >= factors.num_slices()) throw IndexOutOfRange("slice index " + std::to_string(k));
  const auto ku = static_cast<std::size_t>(k);
  return factors.A * factors.C.row(k).asDiagonal() * factors.B[ku].transpose();
}

std::vector<double> fit_residuals(const RaggedTensor& tensor, const Parafac2Factors& factors) {
  if (tensor.num_slices() != factors.num_slices())
    throw ShapeMismatch("tensor has " + std::to_string(tensor.num_slices()) + " slices, factors have " +
                        std::to_string(factors.num_slices()));
  std::vector<double> res(tensor.slices.size());
  for (Index k = 0; k < tensor.num_slices(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (tensor.slices[ku].rows() != factors.A.rows() || tensor.slices[ku].cols() != factors.B[ku].rows())
      throw ShapeMismatch("slice " + std::to_string(k) + " does not match the factor shapes");
    res[ku] = (tensor.slices[ku] - reconstruct_slice(factors, k)).squaredNorm();
  }
  return res;
}

std::pair<Matrix, Vector> normalize_columns(const Matrix& m) {
  Matrix out = m;
  Vector norms(m.cols());
  for (Index p = 0; p < m.cols(); ++p) {
    const double norm = m.col(p).norm();
    norms[p] = norm;
    if (norm > 0.0) out.col(p) /= norm;
  }
  return {std::move(out), std::move(norms)};
}

}  // namespace flexp2

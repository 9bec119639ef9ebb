#include "flexp2/solver.hpp"

#include <cmath>
#include <string>

#include "flexp2/errors.hpp"
#include "flexp2/flexible.hpp"
#include "flexp2/rng.hpp"

namespace flexp2 {

namespace {
// Substream tags for the initial factor draws; entries are consumed in
// column-major order, B slices in ascending k from one stream.
constexpr std::uint64_t kInitTagA = 1;
constexpr std::uint64_t kInitTagC = 2;
constexpr std::uint64_t kInitTagB = 3;

Matrix uniform_matrix(Index rows, Index cols, rng::Stream& stream) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = stream.next_unit();
  return m;
}
}  // namespace

void validate(const SolverConfig& config) {
  if (config.rank < 1) throw InvalidConfig("rank must be at least 1");
  if (config.max_iter < 1) throw InvalidConfig("max_iter must be at least 1");
  if (!(config.rel_tol > 0.0)) throw InvalidConfig("rel_tol must be positive");
  if (!(config.mu_growth >= 1.0)) throw InvalidConfig("mu_growth must be at least 1");
  if (!(config.mu_init_factor > 0.0)) throw InvalidConfig("mu_init_factor must be positive");
  if (!(config.mu_cap > 0.0)) throw InvalidConfig("mu_cap must be positive");
  if (config.nnls_inner_iters < 1) throw InvalidConfig("nnls_inner_iters must be at least 1");
}

Parafac2Factors initial_factors(const RaggedTensor& tensor, int rank, std::uint64_t seed) {
  const Index r = rank;
  const Index K = tensor.num_slices();
  for (Index k = 0; k < K; ++k)
    if (tensor.width(k) < r)
      throw ShapeMismatch("slice " + std::to_string(k) + " is narrower than the rank (" +
                          std::to_string(tensor.width(k)) + " < " + std::to_string(r) + ")");

  Parafac2Factors f;
  rng::Stream sa(rng::derive(seed, kInitTagA));
  rng::Stream sc(rng::derive(seed, kInitTagC));
  rng::Stream sb(rng::derive(seed, kInitTagB));
  f.A = uniform_matrix(tensor.n, r, sa);
  f.C = uniform_matrix(K, r, sc);
  f.B.reserve(tensor.slices.size());
  f.P.reserve(tensor.slices.size());
  for (Index k = 0; k < K; ++k) {
    f.B.push_back(uniform_matrix(tensor.width(k), r, sb));
    f.P.push_back(Matrix::Identity(tensor.width(k), r));  // zero-padded identity
  }

  // Bring the initial reconstruction to the data's scale through C. The
  // small-initial-mu rule divides the first fit residual by ||B_k||^2, which
  // only yields a small value when the starting point is not wildly oversized;
  // an unscaled uniform draw would let the coupling term take over B_k in the
  // very first sweep.
  double rec_sq = 0.0;
  for (Index k = 0; k < K; ++k)
    rec_sq += (f.A * f.C.row(k).asDiagonal() * f.B[static_cast<std::size_t>(k)].transpose()).squaredNorm();
  if (rec_sq > 0.0 && tensor.total_norm > 0.0) f.C *= tensor.total_norm / std::sqrt(rec_sq);

  MuState uniform_mu;
  uniform_mu.mu.assign(static_cast<std::size_t>(K), 1.0);
  f.Bstar = update_Bstar(f.P, f.B, uniform_mu);
  return f;
}

}  // namespace flexp2

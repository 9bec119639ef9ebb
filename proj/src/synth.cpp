#include "flexp2/synth.hpp"

#include <string>

#include "flexp2/errors.hpp"
#include "flexp2/rng.hpp"

namespace flexp2 {

namespace {

Matrix clipped_gaussian(Index rows, Index cols, rng::Stream& stream) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = std::max(stream.next_normal(), 0.0);
  return m;
}

// Clip-to-zero can kill a whole column (probability 2^-rows); a dead
// component is not a valid ground truth, so redraw it from a fresh stream.
Matrix sparse_nonneg_factor(Index rows, int rank, std::uint64_t seed, std::uint64_t tag) {
  rng::Stream stream(rng::derive(seed, tag));
  Matrix m = clipped_gaussian(rows, rank, stream);
  std::uint64_t redraws = 0;
  for (Index p = 0; p < m.cols(); ++p) {
    while (m.col(p).maxCoeff() <= 0.0) {
      rng::Stream redraw(rng::derive(seed, kStreamTagRedraw + redraws++));
      for (Index i = 0; i < rows; ++i) m(i, p) = std::max(redraw.next_normal(), 0.0);
    }
  }
  return normalize_columns(m).first;
}
}  // namespace

Matrix gen_A(Index n, int rank, std::uint64_t seed) { return sparse_nonneg_factor(n, rank, seed, kStreamTagA); }

Matrix gen_C(Index K, int rank, std::uint64_t seed) {
  rng::Stream stream(rng::derive(seed, kStreamTagC));
  Matrix c(K, rank);
  for (Index j = 0; j < rank; ++j)
    for (Index i = 0; i < K; ++i) c(i, j) = stream.next_unit();
  return normalize_columns(c).first;
}

std::vector<Matrix> gen_shifted_B(Index m, int rank, Index K, Index shift_step, std::uint64_t seed) {
  const Matrix b1 = sparse_nonneg_factor(m, rank, seed, kStreamTagB);
  std::vector<Matrix> b;
  b.reserve(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k) {
    const Index shift = ((k * shift_step) % m + m) % m;
    Matrix bk(m, rank);
    for (Index i = 0; i < m; ++i) bk.row((i + shift) % m) = b1.row(i);
    b.push_back(std::move(bk));
  }
  return b;
}

std::pair<RaggedTensor, SynthGroundTruth> gen_dataset(const SynthSpec& spec) {
  if (spec.n < 1 || spec.m < 1 || spec.K < 1 || spec.rank < 1)
    throw ShapeMismatch("synthetic dimensions must be positive");
  if (spec.m < spec.rank)
    throw ShapeMismatch("slice width " + std::to_string(spec.m) + " is smaller than the rank " +
                        std::to_string(spec.rank));
  if (spec.sigma < 0.0) throw NonFinite("negative noise level");

  SynthGroundTruth truth;
  truth.A = gen_A(spec.n, spec.rank, spec.seed);
  truth.C = gen_C(spec.K, spec.rank, spec.seed);
  truth.B = gen_shifted_B(spec.m, spec.rank, spec.K, spec.shift_step, spec.seed);
  truth.sigma = spec.sigma;
  truth.seed = spec.seed;

  rng::Stream noise(rng::derive(spec.seed, kStreamTagNoise));
  std::vector<Matrix> slices;
  slices.reserve(static_cast<std::size_t>(spec.K));
  for (Index k = 0; k < spec.K; ++k) {
    Matrix m_k = truth.A * truth.C.row(k).asDiagonal() * truth.B[static_cast<std::size_t>(k)].transpose();
    if (spec.sigma > 0.0) {
      for (Index j = 0; j < m_k.cols(); ++j)
        for (Index i = 0; i < m_k.rows(); ++i) m_k(i, j) += spec.sigma * noise.next_normal();
    }
    slices.push_back(std::move(m_k));
  }
  return {RaggedTensor::from_slices(std::move(slices)), std::move(truth)};
}

}  // namespace flexp2

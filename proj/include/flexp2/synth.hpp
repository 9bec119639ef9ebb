#pragma once

#include <cstdint>

#include "flexp2/tensor.hpp"

namespace flexp2 {

/// Recipe for one synthetic shifted-PARAFAC dataset.
struct SynthSpec {
  Index n = 20;
  Index m = 30;
  Index K = 20;
  int rank = 3;
  double sigma = 0.0;         ///< i.i.d. Gaussian noise std dev
  std::uint64_t seed = 0;
  Index shift_step = 1;       ///< rows of circular shift between consecutive slices
};

/// The generating factors, kept for metric evaluation.
struct SynthGroundTruth {
  Matrix A;
  Matrix C;
  std::vector<Matrix> B;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Substream tags behind each generator (see rng.hpp for the derivation
// rule). Matrix entries are consumed column-major, noise slices in
// ascending k; redraw i of an all-zero clipped column uses tag
// kStreamTagRedraw + i. This mapping is part of the determinism contract.
constexpr std::uint64_t kStreamTagA = 10;
constexpr std::uint64_t kStreamTagC = 11;
constexpr std::uint64_t kStreamTagB = 12;
constexpr std::uint64_t kStreamTagNoise = 13;
constexpr std::uint64_t kStreamTagRedraw = 100;

/// Sparse nonnegative spectra: standard normal entries clipped at zero,
/// columns l2-normalized. A column that clips to all zeros (probability
/// 2^-n) is redrawn from a fresh substream.
Matrix gen_A(Index n, int rank, std::uint64_t seed);

/// Uniform [0,1) concentrations, columns l2-normalized.
Matrix gen_C(Index K, int rank, std::uint64_t seed);

/// Elution profiles with a constant Gramian: B_1 is clipped-normalized
/// Gaussian and B_k shifts its rows down circularly by (k-1)*shift_step,
/// so every B_k is a row permutation of B_1.
std::vector<Matrix> gen_shifted_B(Index m, int rank, Index K, Index shift_step, std::uint64_t seed);

/// Slices M_k = A diag(C.row(k)) B_k^T + sigma * G_k with standard normal G_k.
std::pair<RaggedTensor, SynthGroundTruth> gen_dataset(const SynthSpec& spec);

}  // namespace flexp2

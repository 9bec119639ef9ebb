#pragma once

#include <vector>

#include "flexp2/synth.hpp"
#include "flexp2/tensor.hpp"

namespace flexp2 {

// Factor recovery metrics. CP-type models identify components only up to
// column permutation and positive scale, so estimates are clipped at zero,
// column-normalized and permutation-aligned before comparison; the two
// solvers are scored through exactly the same pipeline.

/// Permutation matching estimated components to true ones.
///
/// perm[p] is the estimated column assigned to true component p, chosen to
/// maximize the summed cosine similarity between clipped-normalized
/// estimated columns and true columns, both concatenated across slices.
/// Exhaustive search for rank <= 6, greedy matching above.
std::vector<int> align_columns(const std::vector<Matrix>& est, const std::vector<Matrix>& truth);

/// Mean over slices of ||B_k - [Bhat_k]^+||_F^2 / ||B_k||_F^2 after
/// clipping, columnwise normalization and alignment.
double relative_B_error(const Parafac2Factors& est, const SynthGroundTruth& truth);

/// sqrt(sum_k fit_residual_k) / tensor.total_norm.
double relative_fit(const RaggedTensor& tensor, const Parafac2Factors& factors);

}  // namespace flexp2

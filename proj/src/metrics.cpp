#include "flexp2/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace flexp2 {

namespace {

// Columns clipped at zero and scaled to unit norm, per slice.
std::vector<Matrix> clip_normalize(const std::vector<Matrix>& mats) {
  std::vector<Matrix> out;
  out.reserve(mats.size());
  for (const auto& m : mats) out.push_back(normalize_columns(m.cwiseMax(0.0)).first);
  return out;
}

std::vector<Matrix> normalize_only(const std::vector<Matrix>& mats) {
  std::vector<Matrix> out;
  out.reserve(mats.size());
  for (const auto& m : mats) out.push_back(normalize_columns(m).first);
  return out;
}

Matrix stack_rows(const std::vector<Matrix>& mats) {
  Index rows = 0;
  for (const auto& m : mats) rows += m.rows();
  Matrix out(rows, mats.front().cols());
  Index at = 0;
  for (const auto& m : mats) {
    out.middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  return out;
}

double assignment_score(const Matrix& similarity, const std::vector<int>& perm) {
  double score = 0.0;
  for (Index p = 0; p < similarity.rows(); ++p) score += similarity(p, perm[static_cast<std::size_t>(p)]);
  return score;
}

}  // namespace

std::vector<int> align_columns(const std::vector<Matrix>& est, const std::vector<Matrix>& truth) {
  const Matrix e = stack_rows(clip_normalize(est));
  const Matrix t = stack_rows(normalize_only(truth));
  const Index r = t.cols();

  // similarity(p, q): cosine between true component p and estimated column q
  Matrix similarity(r, r);
  for (Index p = 0; p < r; ++p)
    for (Index q = 0; q < r; ++q) {
      const double denom = t.col(p).norm() * e.col(q).norm();
      similarity(p, q) = denom > 0.0 ? t.col(p).dot(e.col(q)) / denom : 0.0;
    }

  std::vector<int> best(static_cast<std::size_t>(r));
  std::iota(best.begin(), best.end(), 0);
  if (r <= 6) {
    std::vector<int> perm = best;
    double best_score = assignment_score(similarity, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
      const double score = assignment_score(similarity, perm);
      if (score > best_score) {
        best_score = score;
        best = perm;
      }
    }
  } else {
    // greedy matching: repeatedly take the best remaining (true, est) pair
    std::vector<bool> row_used(static_cast<std::size_t>(r), false);
    std::vector<bool> col_used(static_cast<std::size_t>(r), false);
    for (Index step = 0; step < r; ++step) {
      double top = -std::numeric_limits<double>::infinity();
      Index top_p = 0, top_q = 0;
      for (Index p = 0; p < r; ++p)
        for (Index q = 0; q < r; ++q)
          if (!row_used[static_cast<std::size_t>(p)] && !col_used[static_cast<std::size_t>(q)] &&
              similarity(p, q) > top) {
            top = similarity(p, q);
            top_p = p;
            top_q = q;
          }
      best[static_cast<std::size_t>(top_p)] = static_cast<int>(top_q);
      row_used[static_cast<std::size_t>(top_p)] = true;
      col_used[static_cast<std::size_t>(top_q)] = true;
    }
  }
  return best;
}

double relative_B_error(const Parafac2Factors& est, const SynthGroundTruth& truth) {
  const std::vector<Matrix> e = clip_normalize(est.B);
  const std::vector<Matrix> t = normalize_only(truth.B);
  const std::vector<int> perm = align_columns(est.B, truth.B);

  double total = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    Matrix aligned(e[k].rows(), e[k].cols());
    for (Index p = 0; p < aligned.cols(); ++p) aligned.col(p) = e[k].col(perm[static_cast<std::size_t>(p)]);
    total += (t[k] - aligned).squaredNorm() / t[k].squaredNorm();
  }
  return total / static_cast<double>(t.size());
}

double relative_fit(const RaggedTensor& tensor, const Parafac2Factors& factors) {
  const std::vector<double> res = fit_residuals(tensor, factors);
  const double total = std::accumulate(res.begin(), res.end(), 0.0);
  return std::sqrt(total) / tensor.total_norm;
}

}  // namespace flexp2

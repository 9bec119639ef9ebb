#include "flexp2/classic.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "flexp2/errors.hpp"
#include "flexp2/kernels.hpp"

namespace flexp2 {

namespace {

// Solves X gram = cross for X with independent rows; singular normal
// equations get an additive ridge of 1e-12 * trace(gram)/r.
Matrix solve_normal(const Matrix& gram, const Matrix& cross) {
  Eigen::LDLT<Matrix> ldlt(gram);
  Matrix x = ldlt.solve(cross.transpose()).transpose();
  const double rcond = ldlt.rcond();
  if (ldlt.info() == Eigen::Success && x.allFinite() && rcond >= 1e-14) return x;
  const double ridge = 1e-12 * gram.trace() / static_cast<double>(gram.rows());
  const Matrix reg = gram + ridge * Matrix::Identity(gram.rows(), gram.cols());
  x = reg.ldlt().solve(cross.transpose()).transpose();
  if (!x.allFinite()) x.setZero();
  return x;
}

double classic_objective(const RaggedTensor& tensor, const Matrix& a, const Matrix& c, const Matrix& bstar,
                         const std::vector<Matrix>& p) {
  double obj = 0.0;
  for (Index k = 0; k < tensor.num_slices(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    obj += (tensor.slices[ku] - a * c.row(k).asDiagonal() * bstar.transpose() * p[ku].transpose()).squaredNorm();
  }
  return obj;
}

}  // namespace

Matrix update_projection_classic(const Matrix& m_k, const Matrix& a, const Vector& c_k, const Matrix& bstar,
                                 bool* rank_deficient) {
  return procrustes(m_k.transpose() * a * c_k.asDiagonal() * bstar.transpose(), rank_deficient);
}

std::vector<Matrix> project_slices(const RaggedTensor& tensor, const std::vector<Matrix>& p) {
  if (static_cast<Index>(p.size()) != tensor.num_slices())
    throw ShapeMismatch("projection count does not match the slice count");
  std::vector<Matrix> y;
  y.reserve(p.size());
  for (Index k = 0; k < tensor.num_slices(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (p[ku].rows() != tensor.width(k))
      throw ShapeMismatch("projection " + std::to_string(k) + " does not match the slice width");
    y.push_back(tensor.slices[ku] * p[ku]);
  }
  return y;
}

void cp_als_pass(const std::vector<Matrix>& y, Matrix& a, Matrix& bstar, Matrix& c) {
  const Index K = static_cast<Index>(y.size());
  const Index r = a.cols();

  Matrix cross_a = Matrix::Zero(a.rows(), r);
  for (Index k = 0; k < K; ++k) cross_a += y[static_cast<std::size_t>(k)] * bstar * c.row(k).asDiagonal();
  a = solve_normal((bstar.transpose() * bstar).cwiseProduct(c.transpose() * c), cross_a);

  Matrix cross_b = Matrix::Zero(r, r);
  for (Index k = 0; k < K; ++k) cross_b += y[static_cast<std::size_t>(k)].transpose() * a * c.row(k).asDiagonal();
  bstar = solve_normal((a.transpose() * a).cwiseProduct(c.transpose() * c), cross_b);

  Matrix cross_c(K, r);
  for (Index k = 0; k < K; ++k)
    cross_c.row(k) = (a.transpose() * y[static_cast<std::size_t>(k)] * bstar).diagonal();
  c = solve_normal((bstar.transpose() * bstar).cwiseProduct(a.transpose() * a), cross_c);

  // scale lives in C
  auto [an, a_norms] = normalize_columns(a);
  auto [bn, b_norms] = normalize_columns(bstar);
  a = std::move(an);
  bstar = std::move(bn);
  for (Index p = 0; p < r; ++p) c.col(p) *= a_norms[p] * b_norms[p];
}

std::pair<Parafac2Factors, RunReport> run_classic(const RaggedTensor& tensor, const SolverConfig& config,
                                                  const Parafac2Factors& init, const IterationCallback& on_iteration) {
  validate(tensor);
  validate(config);
  const Index r = config.rank;
  const Index K = tensor.num_slices();
  for (Index k = 0; k < K; ++k)
    if (tensor.width(k) < r) throw ShapeMismatch("slice " + std::to_string(k) + " is narrower than the rank");

  const auto t0 = std::chrono::steady_clock::now();
  Matrix a = init.A;
  Matrix c = init.C;
  Matrix bstar = init.Bstar;
  std::vector<Matrix> p(static_cast<std::size_t>(K));

  RunReport report;
  double prev = std::numeric_limits<double>::quiet_NaN();
  int iter = 0;
  while (iter < config.max_iter) {
    ++iter;
    for (Index k = 0; k < K; ++k)
      p[static_cast<std::size_t>(k)] = update_projection_classic(tensor.slices[static_cast<std::size_t>(k)], a,
                                                                 c.row(k).transpose(), bstar);
    const std::vector<Matrix> y = project_slices(tensor, p);
    cp_als_pass(y, a, bstar, c);

    const double obj = classic_objective(tensor, a, c, bstar, p);
    report.objective_trace.push_back(obj);
    if (std::isfinite(prev) && obj > prev * (1.0 + 1e-10)) ++report.objective_increases;

    if (on_iteration) {
      Parafac2Factors snapshot{a, c, {}, p, bstar};
      snapshot.B.reserve(p.size());
      for (const auto& pk : p) snapshot.B.push_back(pk * bstar);
      on_iteration(iter, snapshot);
    }

    if (std::isfinite(prev) &&
        std::abs(prev - obj) < config.rel_tol * std::max(prev, std::numeric_limits<double>::min())) {
      report.termination = Termination::Converged;
      break;
    }
    prev = obj;
  }

  Parafac2Factors out{std::move(a), std::move(c), {}, std::move(p), std::move(bstar)};
  out.B.reserve(out.P.size());
  for (const auto& pk : out.P) out.B.push_back(pk * out.Bstar);

  report.iterations = iter;
  report.fit_residuals = fit_residuals(tensor, out);
  report.coupling_residuals.assign(static_cast<std::size_t>(K), 0.0);  // B_k = P_k Bstar by construction
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(out), std::move(report)};
}

}  // namespace flexp2

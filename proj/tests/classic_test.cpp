#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "flexp2/classic.hpp"
#include "flexp2/errors.hpp"
#include "flexp2/metrics.hpp"
#include "flexp2/synth.hpp"
#include "test_util.hpp"

using namespace flexp2;
using testutil::gaussian;
using testutil::random_orthonormal;
using testutil::uniform;

namespace {
double cp_fit(const std::vector<Matrix>& y, const Matrix& a, const Matrix& bstar, const Matrix& c) {
  double fit = 0.0;
  for (Index k = 0; k < static_cast<Index>(y.size()); ++k)
    fit += (y[static_cast<std::size_t>(k)] - a * c.row(k).asDiagonal() * bstar.transpose()).squaredNorm();
  return fit;
}
}  // namespace

TEST_CASE("update_projection_classic recovers a planted coupling matrix") {
  rng::Stream stream(201);
  const Index n = 6, m = 5, r = 3;
  const Matrix a = gaussian(n, r, stream);
  const Matrix bstar = gaussian(r, r, stream) + 2.0 * Matrix::Identity(r, r);
  Vector c = uniform(r, 1, stream).col(0).array() + 0.5;
  const Matrix q = random_orthonormal(m, r, stream);
  const Matrix m_k = a * c.asDiagonal() * (q * bstar).transpose();

  const Matrix p = update_projection_classic(m_k, a, c, bstar);
  CHECK((p - q).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("update_projection_classic identity fixed point") {
  const Index r = 3;
  const Matrix p = update_projection_classic(Matrix::Identity(r, r), Matrix::Identity(r, r), Vector::Ones(r),
                                             Matrix::Identity(r, r));
  CHECK((p - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("update_projection_classic never increases the slice residual") {
  rng::Stream stream(203);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 5, m = 6, r = 2;
    const Matrix m_k = gaussian(n, m, stream);
    const Matrix a = gaussian(n, r, stream);
    const Matrix bstar = gaussian(r, r, stream);
    const Vector c = uniform(r, 1, stream).col(0);
    const Matrix p_before = Matrix::Identity(m, r);
    const Matrix p_after = update_projection_classic(m_k, a, c, bstar);
    const auto residual = [&](const Matrix& p) {
      return (m_k - a * c.asDiagonal() * bstar.transpose() * p.transpose()).squaredNorm();
    };
    CHECK(residual(p_after) <= residual(p_before) + 1e-12);
  }
}

TEST_CASE("project_slices leaves a square identity projection unchanged") {
  rng::Stream stream(207);
  auto t = testutil::random_tensor(4, {3, 3}, stream);
  std::vector<Matrix> p = {Matrix::Identity(3, 3), Matrix::Identity(3, 3)};
  const auto y = project_slices(t, p);
  CHECK(y[0] == t.slices[0]);
  CHECK(y[1] == t.slices[1]);
}

TEST_CASE("project_slices contracts norms and matches the direct product") {
  rng::Stream stream(211);
  auto t = testutil::random_tensor(4, {6, 5}, stream);
  std::vector<Matrix> p = {random_orthonormal(6, 2, stream), random_orthonormal(5, 2, stream)};
  const auto y = project_slices(t, p);
  for (Index k = 0; k < 2; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    CHECK(y[ku].norm() <= t.slices[ku].norm() + 1e-12);
    CHECK((y[ku] - t.slices[ku] * p[ku]).cwiseAbs().maxCoeff() < 1e-12);
  }
  p.pop_back();
  CHECK_THROWS_AS(project_slices(t, p), ShapeMismatch);
}

TEST_CASE("cp_als_pass keeps a rank-1 truth fixed up to scaling") {
  rng::Stream stream(213);
  const Index n = 5, K = 4;
  Matrix a = uniform(n, 1, stream).array() + 0.1;
  a /= a.norm();
  Matrix bstar = Matrix::Ones(1, 1);
  Matrix c = uniform(K, 1, stream).array() + 0.1;
  std::vector<Matrix> y;
  for (Index k = 0; k < K; ++k) y.push_back(a * c.row(k) * bstar.transpose());

  Matrix a2 = a, b2 = bstar, c2 = c;
  cp_als_pass(y, a2, b2, c2);
  CHECK((a2 - a).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((b2 - bstar).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((c2 - c).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("cp_als_pass never increases the CP fit") {
  rng::Stream stream(217);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 5, r = 3, K = 4;
    std::vector<Matrix> y;
    for (Index k = 0; k < K; ++k) y.push_back(gaussian(n, r, stream));
    Matrix a = gaussian(n, r, stream);
    Matrix bstar = gaussian(r, r, stream);
    Matrix c = gaussian(K, r, stream);
    const double before = cp_fit(y, a, bstar, c);
    cp_als_pass(y, a, bstar, c);
    CHECK(cp_fit(y, a, bstar, c) <= before + 1e-10 * (1.0 + before));
  }
}

TEST_CASE("cp_als_pass on all-zero data zeroes the factors") {
  rng::Stream stream(219);
  std::vector<Matrix> y(3, Matrix::Zero(4, 2));
  Matrix a = gaussian(4, 2, stream);
  Matrix bstar = gaussian(2, 2, stream);
  Matrix c = gaussian(3, 2, stream);
  cp_als_pass(y, a, bstar, c);
  CHECK(a.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("run_classic recovers noiseless synthetic data") {
  SynthSpec spec;
  spec.seed = 2024;
  auto [tensor, truth] = gen_dataset(spec);

  SolverConfig config;
  config.rank = spec.rank;
  double best_fit = 1.0;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const auto init = initial_factors(tensor, config.rank, rng::derive(9, i));
    auto [factors, report] = run_classic(tensor, config, init);
    double mean_rel = 0.0;
    for (Index k = 0; k < tensor.num_slices(); ++k)
      mean_rel += std::sqrt(report.fit_residuals[static_cast<std::size_t>(k)]) /
                  tensor.slices[static_cast<std::size_t>(k)].norm();
    mean_rel /= static_cast<double>(tensor.num_slices());
    best_fit = std::min(best_fit, mean_rel);

    for (const auto& p : factors.P)
      CHECK((p.transpose() * p - Matrix::Identity(config.rank, config.rank)).norm() <= 1e-10);
    const Matrix gram_star = factors.Bstar.transpose() * factors.Bstar;
    for (const auto& b : factors.B) CHECK((b.transpose() * b - gram_star).norm() <= 1e-10);
    CHECK(report.coupling_residuals == std::vector<double>(20, 0.0));
  }
  CHECK(best_fit < 1e-4);
}

TEST_CASE("run_classic stops on the iteration budget") {
  SynthSpec spec;
  spec.n = 6;
  spec.m = 5;
  spec.K = 3;
  spec.rank = 2;
  spec.sigma = 1e-3;
  spec.seed = 5;
  auto [tensor, truth] = gen_dataset(spec);
  SolverConfig config;
  config.rank = 2;
  config.max_iter = 1;
  const auto init = initial_factors(tensor, 2, 1);
  auto [factors, report] = run_classic(tensor, config, init);
  CHECK(report.iterations == 1);
  CHECK(report.termination == Termination::MaxIter);
}

TEST_CASE("run_classic objective trace is non-increasing") {
  SynthSpec spec;
  spec.n = 8;
  spec.m = 7;
  spec.K = 4;
  spec.rank = 2;
  spec.sigma = 1e-2;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    spec.seed = seed;
    auto [tensor, truth] = gen_dataset(spec);
    SolverConfig config;
    config.rank = 2;
    config.max_iter = 60;
    const auto init = initial_factors(tensor, 2, seed + 100);
    auto [factors, report] = run_classic(tensor, config, init);
    for (std::size_t t = 1; t < report.objective_trace.size(); ++t)
      CHECK(report.objective_trace[t] <= report.objective_trace[t - 1] * (1.0 + 1e-10));
    CHECK(report.objective_increases == 0);
  }
}

TEST_CASE("run_classic rejects a rank wider than a slice") {
  rng::Stream stream(223);
  auto t = testutil::random_tensor(5, {4, 2}, stream);
  SolverConfig config;
  config.rank = 3;
  CHECK_THROWS_AS(run_classic(t, config, initial_factors(t, 2, 0)), ShapeMismatch);
  config.rank = 2;
  config.max_iter = 0;
  CHECK_THROWS_AS(run_classic(t, config, initial_factors(t, 2, 0)), InvalidConfig);
}

TEST_CASE("run_classic handles ragged slice widths") {
  rng::Stream stream(227);
  std::vector<Matrix> slices;
  for (Index w : {6, 3, 8}) slices.push_back(gaussian(5, w, stream));
  auto t = RaggedTensor::from_slices(std::move(slices));
  SolverConfig config;
  config.rank = 2;
  config.max_iter = 50;
  auto [factors, report] = run_classic(t, config, initial_factors(t, 2, 1));
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(factors.B[k].rows() == t.slices[k].cols());
    CHECK((factors.P[k].transpose() * factors.P[k] - Matrix::Identity(2, 2)).norm() <= 1e-10);
  }
  for (std::size_t tt = 1; tt < report.objective_trace.size(); ++tt)
    CHECK(report.objective_trace[tt] <= report.objective_trace[tt - 1] * (1.0 + 1e-10));
}

#include "flexp2/flexible.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "flexp2/errors.hpp"
#include "flexp2/kernels.hpp"

namespace flexp2 {

namespace {
constexpr double kMuFloor = 1e-12;  // a zero mu_k would detach B_k and leave the Bstar average ill-defined

double coupling_residual(const Parafac2Factors& f, Index k) {
  const auto ku = static_cast<std::size_t>(k);
  return (f.B[ku] - f.P[ku] * f.Bstar).squaredNorm();
}
}  // namespace

RaggedTensor preprocess(const RaggedTensor& tensor) {
  if (tensor.total_norm <= 0.0) throw ZeroTensor("cannot normalize a zero tensor");
  std::vector<Matrix> scaled;
  scaled.reserve(tensor.slices.size());
  for (const auto& s : tensor.slices) scaled.push_back(s / tensor.total_norm);
  return RaggedTensor::from_slices(std::move(scaled));
}

MuState init_mu(const RaggedTensor& tensor, const Parafac2Factors& factors, const SolverConfig& config) {
  MuState state;
  state.growth = config.mu_growth;
  state.cap = config.mu_cap;
  state.phase = MuState::Phase::Initial;
  const std::vector<double> fit = fit_residuals(tensor, factors);
  state.mu.resize(fit.size());
  for (std::size_t k = 0; k < fit.size(); ++k) {
    const double b_norm2 = factors.B[k].squaredNorm();
    if (b_norm2 <= 0.0) throw DegenerateFactor("initial B_" + std::to_string(k) + " has zero norm");
    const double mu = config.mu_init_factor * fit[k] / b_norm2;
    state.mu[k] = mu > 0.0 ? mu : kMuFloor;
  }
  return state;
}

MuState recalibrate_mu(const RaggedTensor& tensor, const Parafac2Factors& factors, const SolverConfig& config) {
  MuState state;
  state.growth = config.mu_growth;
  state.cap = config.mu_cap;
  state.phase = MuState::Phase::Calibrated;
  const std::vector<double> fit = fit_residuals(tensor, factors);
  const double gain = std::pow(10.0, -config.snr_db / 10.0);
  state.mu.resize(fit.size());
  for (std::size_t k = 0; k < fit.size(); ++k) {
    const double coupling = coupling_residual(factors, static_cast<Index>(k));
    if (coupling <= 0.0) {
      state.mu[k] = config.mu_cap;  // already perfectly coupled
      continue;
    }
    const double mu = gain * fit[k] / coupling;
    state.mu[k] = mu > 0.0 ? mu : kMuFloor;
  }
  return state;
}

MuState grow_mu(const MuState& state) {
  if (state.phase != MuState::Phase::Calibrated) throw Error("grow_mu called before calibration");
  MuState out = state;
  for (double& mu : out.mu)
    if (mu <= out.cap) mu *= out.growth;
  return out;
}

Matrix update_P(const Matrix& b_k, const Matrix& bstar, bool* rank_deficient) {
  return procrustes(b_k * bstar.transpose(), rank_deficient);
}

Matrix update_Bstar(const std::vector<Matrix>& p, const std::vector<Matrix>& b, const MuState& mu, bool normalize) {
  const Index r = b.front().cols();
  Matrix acc = Matrix::Zero(r, r);
  double weight = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    acc += mu.mu[k] * (p[k].transpose() * b[k]);
    weight += mu.mu[k];
  }
  acc /= weight;
  if (!normalize) return acc;
  return normalize_columns(acc).first;
}

void update_A(const RaggedTensor& tensor, Parafac2Factors& factors, int nnls_inner_iters) {
  const Index r = factors.rank();
  Matrix gram = Matrix::Zero(r, r);
  Matrix cross = Matrix::Zero(tensor.n, r);
  for (Index k = 0; k < tensor.num_slices(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const auto d_k = factors.C.row(k).asDiagonal();
    gram += d_k * (factors.B[ku].transpose() * factors.B[ku]) * d_k;
    cross += tensor.slices[ku] * factors.B[ku] * d_k;
  }
  const Matrix a = nnls({std::move(gram), std::move(cross), factors.A}, nnls_inner_iters);
  auto [normalized, norms] = normalize_columns(a);
  factors.A = std::move(normalized);
  for (Index p = 0; p < r; ++p) factors.C.col(p) *= norms[p];
}

Matrix update_Bk(const Matrix& m_k, const Matrix& a, const Vector& c_k, const Matrix& p_k, const Matrix& bstar,
                 double mu_k, const Matrix& warm_start, int nnls_inner_iters) {
  const auto d_k = c_k.asDiagonal();
  Matrix gram = d_k * (a.transpose() * a) * d_k;
  gram.diagonal().array() += mu_k;
  const Matrix cross = m_k.transpose() * a * d_k + mu_k * (p_k * bstar);
  return nnls({std::move(gram), cross, warm_start}, nnls_inner_iters);
}

Vector update_Dk(const Matrix& m_k, const Matrix& a, const Matrix& b_k, const Vector& warm_start,
                 int nnls_inner_iters) {
  const Matrix gram = (b_k.transpose() * b_k).cwiseProduct(a.transpose() * a);
  const Matrix cross = (a.transpose() * m_k * b_k).diagonal().transpose();
  const Matrix x0 = warm_start.transpose();
  return nnls({gram, cross, x0}, nnls_inner_iters).row(0).transpose();
}

double objective(const RaggedTensor& tensor, const Parafac2Factors& factors, const MuState& mu) {
  const std::vector<double> fit = fit_residuals(tensor, factors);
  double obj = 0.0;
  for (std::size_t k = 0; k < fit.size(); ++k)
    obj += fit[k] + mu.mu[k] * coupling_residual(factors, static_cast<Index>(k));
  return obj;
}

std::pair<Parafac2Factors, RunReport> run_flexible(const RaggedTensor& tensor, const SolverConfig& config,
                                                   const Parafac2Factors& init, const FlexibleOptions& options) {
  validate(tensor);
  validate(config);
  const Index r = config.rank;
  const Index K = tensor.num_slices();
  for (Index k = 0; k < K; ++k)
    if (tensor.width(k) < r) throw ShapeMismatch("slice " + std::to_string(k) + " is narrower than the rank");

  const auto t0 = std::chrono::steady_clock::now();
  const RaggedTensor work = preprocess(tensor);

  Parafac2Factors factors = init;
  factors.A = factors.A.cwiseMax(0.0);
  factors.C = factors.C.cwiseMax(0.0) / tensor.total_norm;  // into normalized-data scale, undone on exit
  for (auto& b : factors.B) b = b.cwiseMax(0.0);

  MuState mu = init_mu(work, factors, config);
  const double coupling_target = std::pow(10.0, -config.snr_db / 10.0);

  RunReport report;
  double prev = std::numeric_limits<double>::quiet_NaN();
  int iter = 0;
  while (iter < config.max_iter) {
    ++iter;
    if (iter >= 2 && options.grow_mu && mu.phase == MuState::Phase::Calibrated) {
      // grow only while the slice is still far from the coupling target,
      // so the penalty stops moving once coupling is as tight as the SNR warrants
      for (Index k = 0; k < K; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const double b_norm2 = factors.B[ku].squaredNorm();
        const double rel = b_norm2 > 0.0 ? coupling_residual(factors, k) / b_norm2 : 0.0;
        if (mu.mu[ku] <= mu.cap && rel > coupling_target) mu.mu[ku] *= mu.growth;
      }
    }

    for (Index k = 0; k < K; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      factors.P[ku] = update_P(factors.B[ku], factors.Bstar);
    }
    factors.Bstar = update_Bstar(factors.P, factors.B, mu, options.normalize_bstar);
    update_A(work, factors, config.nnls_inner_iters);
    for (Index k = 0; k < K; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      factors.B[ku] = update_Bk(work.slices[ku], factors.A, factors.C.row(k).transpose(), factors.P[ku],
                                factors.Bstar, mu.mu[ku], factors.B[ku], config.nnls_inner_iters);
    }
    for (Index k = 0; k < K; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      factors.C.row(k) =
          update_Dk(work.slices[ku], factors.A, factors.B[ku], factors.C.row(k).transpose(), config.nnls_inner_iters)
              .transpose();
    }

    const double obj = objective(work, factors, mu);
    report.objective_trace.push_back(obj);
    if (std::isfinite(prev) && obj > prev * (1.0 + 1e-10)) ++report.objective_increases;

    if (iter == 1 && options.recalibrate_mu) {
      mu = recalibrate_mu(work, factors, config);
      report.mu_calibrated = true;
    }
    report.mu_trace.push_back(mu.mu);
    if (options.on_iteration) options.on_iteration(iter, factors);

    if (std::isfinite(prev) &&
        std::abs(prev - obj) < config.rel_tol * std::max(prev, std::numeric_limits<double>::min())) {
      report.termination = Termination::Converged;
      break;
    }
    prev = obj;
  }

  factors.C *= tensor.total_norm;  // undo the preprocessing scale; C carries all scale
  report.iterations = iter;
  report.fit_residuals = fit_residuals(tensor, factors);
  report.coupling_residuals.resize(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double b_norm2 = factors.B[ku].squaredNorm();
    report.coupling_residuals[ku] = b_norm2 > 0.0 ? coupling_residual(factors, k) / b_norm2 : 0.0;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(factors), std::move(report)};
}

}  // namespace flexp2

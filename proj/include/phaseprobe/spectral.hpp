#pragma once

// Smallest eigenvalue of the empirical Hessian H(w): dense (materialized,
// Eigen's symmetric solver) or matrix-free Lanczos over hessian_vector_product.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "phaseprobe/error.hpp"
#include "phaseprobe/linalg.hpp"
#include "phaseprobe/model.hpp"
#include "phaseprobe/rng.hpp"

namespace phaseprobe {

inline constexpr std::size_t kDenseEigenCap = 2048;
inline constexpr std::size_t kLanczosMaxBasis = 400;

struct SpectralEstimate {
  double lambda_min = 0.0;
  double residual = 0.0;  // |H v - lambda v|
  std::size_t iterations = 0;
  bool converged = false;
  Vector eigenvector;
};

// H(w) = 1/n X' diag(3 (Xw)^2 - y^2) X
inline Eigen::MatrixXd empirical_hessian_dense(const Instance& inst, ConstSpan w) {
  require_dim(w.size(), inst.dim(), "empirical_hessian_dense");
  if (inst.dim() > kDenseEigenCap) throw CapacityError("empirical_hessian_dense: d exceeds the dense cap of 2048");
  const auto n = static_cast<Eigen::Index>(inst.size());
  const auto d = static_cast<Eigen::Index>(inst.dim());
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> x(inst.samples().data().data(), n, d);
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), d);
  const Eigen::Map<const Eigen::VectorXd> y_sq(inst.y_sq().data(), n);
  const Eigen::VectorXd b = x * wv;
  const Eigen::VectorXd weight = 3.0 * b.array().square() - y_sq.array();
  const RowMajor weighted = x.array().colwise() * weight.array();
  Eigen::MatrixXd h = (weighted.transpose() * x) / static_cast<double>(n);
  return 0.5 * (h + h.transpose());
}

namespace detail {

inline double eigen_residual(const Instance& inst, ConstSpan w, ConstSpan v, double lambda) {
  Vector hv = hessian_vector_product(inst, w, v);
  axpy(-lambda, v, hv);
  return norm(hv);
}

}  // namespace detail

inline SpectralEstimate min_eigen_dense(const Instance& inst, ConstSpan w) {
  const Eigen::MatrixXd h = empirical_hessian_dense(inst, w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("min_eigen_dense: eigensolver failed", 0);
  SpectralEstimate est;
  est.lambda_min = solver.eigenvalues()(0);
  const Eigen::VectorXd v = solver.eigenvectors().col(0);
  est.eigenvector.assign(v.data(), v.data() + v.size());
  est.residual = detail::eigen_residual(inst, w, est.eigenvector, est.lambda_min);
  est.iterations = 1;
  est.converged = true;
  return est;
}

// Lanczos with full reorthogonalization. The Krylov basis is capped at
// min(d, 400) vectors; when the cap is hit the method restarts from the
// current Ritz vector. `max_iters` bounds the total number of HVPs.
inline SpectralEstimate min_eigen_lanczos(const Instance& inst, ConstSpan w, std::size_t max_iters = 1000,
                                          double tol = 1e-8, std::uint64_t seed = 0) {
  require_dim(w.size(), inst.dim(), "min_eigen_lanczos");
  if (max_iters < 10) throw ParameterError("min_eigen_lanczos: max_iters must be at least 10");
  const std::size_t d = inst.dim();
  const std::size_t basis_cap = std::min(d, kLanczosMaxBasis);

  Rng rng(seed);
  Vector start(d);
  rng.fill_normal(start);
  scale(1.0 / norm(start), start);

  SpectralEstimate best;
  best.residual = std::numeric_limits<double>::infinity();
  std::size_t hvps = 0;

  auto finalize = [&](Vector v) {
    scale(1.0 / norm(v), v);
    Vector hv = hessian_vector_product(inst, w, v);
    ++hvps;
    const double lambda = dot(v, hv);
    axpy(-lambda, v, hv);
    const double residual = norm(hv);
    if (residual < best.residual) {
      best.lambda_min = lambda;
      best.residual = residual;
      best.eigenvector = std::move(v);
    }
    return residual <= tol;
  };

  while (hvps < max_iters) {
    std::vector<Vector> basis{start};
    std::vector<double> alphas, betas;
    Eigen::VectorXd ritz_coeffs;
    bool exhausted = false;

    for (std::size_t j = 0; j < basis_cap && hvps < max_iters; ++j) {
      Vector z = hessian_vector_product(inst, w, basis[j]);
      ++hvps;
      const double a = dot(basis[j], z);
      alphas.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        for (const Vector& q : basis) axpy(-dot(q, z), q, z);
      }
      const double b = norm(z);

      const auto m = static_cast<Eigen::Index>(alphas.size());
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alphas.data(), m);
      Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(betas.data(), m - 1))
                                  : Eigen::VectorXd();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub);
      const double ritz_value = tri.eigenvalues()(0);
      ritz_coeffs = tri.eigenvectors().col(0);
      const double residual_estimate = std::abs(b * ritz_coeffs(m - 1));

      exhausted = b <= 1e-14 * std::max(1.0, std::abs(ritz_value)) || j + 1 == basis_cap;
      if (residual_estimate <= 0.5 * tol || exhausted) break;
      scale(1.0 / b, z);
      betas.push_back(b);
      basis.push_back(std::move(z));
    }

    Vector ritz(d, 0.0);
    for (Eigen::Index k = 0; k < ritz_coeffs.size(); ++k) {
      axpy(ritz_coeffs(k), basis[static_cast<std::size_t>(k)], ritz);
    }
    const bool done = finalize(ritz);
    if (done) {
      best.converged = true;
      break;
    }
    start = best.eigenvector;
  }
  best.iterations = hvps;
  return best;
}

}  // namespace phaseprobe

#pragma once

// Closed-form population landscape (the n -> infinity limit of model.hpp):
//
//   Lbar(w)        = (3|w|^4 + 3 - 2|w|^2 - 4 (w.w*)^2) / 4
//   grad Lbar(w)   = (3|w|^2 - 1) w - 2 (w.w*) w*
//   Hess Lbar(w)   = 6 w w' - 2 w* w*' + (3|w|^2 - 1) I

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string_view>

#include "phaseprobe/error.hpp"
#include "phaseprobe/linalg.hpp"

namespace phaseprobe {

inline constexpr std::size_t kDensePopulationCap = 4096;

inline double pop_loss(ConstSpan w, ConstSpan w_star) {
  require_dim(w.size(), w_star.size(), "pop_loss");
  const double sq = dot(w, w);
  const double a = dot(w, w_star);
  return 0.25 * (3.0 * sq * sq + 3.0 - 2.0 * sq - 4.0 * a * a);
}

inline Vector pop_gradient(ConstSpan w, ConstSpan w_star) {
  require_dim(w.size(), w_star.size(), "pop_gradient");
  Vector g = scaled(3.0 * dot(w, w) - 1.0, w);
  axpy(-2.0 * dot(w, w_star), w_star, g);
  return g;
}

inline double pop_hessian_quadratic(ConstSpan w, ConstSpan u, ConstSpan w_star) {
  require_dim(w.size(), w_star.size(), "pop_hessian_quadratic");
  require_dim(u.size(), w_star.size(), "pop_hessian_quadratic");
  const double uw = dot(u, w);
  const double us = dot(u, w_star);
  return 6.0 * uw * uw - 2.0 * us * us + (3.0 * dot(w, w) - 1.0) * dot(u, u);
}

inline Eigen::MatrixXd pop_hessian_dense(ConstSpan w, ConstSpan w_star) {
  require_dim(w.size(), w_star.size(), "pop_hessian_dense");
  const std::size_t d = w.size();
  if (d > kDensePopulationCap) throw CapacityError("pop_hessian_dense: d exceeds the dense cap of 4096");
  const auto n = static_cast<Eigen::Index>(d);
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), n);
  const Eigen::Map<const Eigen::VectorXd> sv(w_star.data(), n);
  Eigen::MatrixXd h = 6.0 * wv * wv.transpose() - 2.0 * sv * sv.transpose();
  h.diagonal().array() += 3.0 * wv.squaredNorm() - 1.0;
  return h;
}

// <grad Lbar(w), w - w*> / |w - w*|^2
inline double pop_onepoint_ratio(ConstSpan w, ConstSpan w_star) {
  const Vector delta = subtract(w, w_star);
  const double dd = dot(delta, delta);
  if (std::sqrt(dd) <= 1e-12) throw DegenerateError("pop_onepoint_ratio: ratio undefined at w = w*");
  return dot(pop_gradient(w, w_star), delta) / dd;
}

enum class CriticalPoint { global_max, strict_saddle, global_min, not_critical };

inline std::string_view to_string(CriticalPoint c) noexcept {
  switch (c) {
    case CriticalPoint::global_max: return "global_max";
    case CriticalPoint::strict_saddle: return "strict_saddle";
    case CriticalPoint::global_min: return "global_min";
    case CriticalPoint::not_critical: return "not_critical";
  }
  return "not_critical";
}

// Critical set of Lbar: {0} (max), {+w*, -w*} (minima), and the sphere
// |w|^2 = 1/3 inside w*-perp (strict saddles).
inline CriticalPoint classify_critical_point(ConstSpan w, ConstSpan w_star, double tol = 1e-8) {
  require_dim(w.size(), w_star.size(), "classify_critical_point");
  if (!(tol > 0.0)) throw ParameterError("classify_critical_point: tol must be positive");
  if (norm(w) <= tol) return CriticalPoint::global_max;
  if (distance(w, w_star) <= tol) return CriticalPoint::global_min;
  {
    const Vector mirrored = add(w, w_star);
    if (norm(mirrored) <= tol) return CriticalPoint::global_min;
  }
  if (std::abs(dot(w, w) - 1.0 / 3.0) <= tol && std::abs(dot(w, w_star)) <= tol) {
    return CriticalPoint::strict_saddle;
  }
  return CriticalPoint::not_critical;
}

}  // namespace phaseprobe

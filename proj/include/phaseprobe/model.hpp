#pragma once

// Empirical phase-retrieval landscape
//
//   L(w) = 1/(4n) sum_i ((w.x_i)^2 - (w*.x_i)^2)^2,   x_i ~ N(0, I_d), |w*| = 1,
//
// and its derivatives, all evaluated matrix-free in O(nd).

#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "phaseprobe/error.hpp"
#include "phaseprobe/linalg.hpp"
#include "phaseprobe/rng.hpp"

namespace phaseprobe {

enum class WStarMode { canonical_e1, random_unit };

// Threshold below which a point counts as parallel to w*.
inline constexpr double kParallelThreshold = 1e-12;

// An immutable problem instance. Safe to share across threads.
class Instance {
 public:
  // Takes ownership of the samples; w_star must have unit norm.
  Instance(SampleMatrix samples, Vector w_star) : samples_(std::move(samples)), w_star_(std::move(w_star)) {
    if (samples_.rows() == 0 || samples_.cols() == 0) {
      throw ParameterError("Instance: need n >= 1 and d >= 1");
    }
    require_dim(w_star_.size(), samples_.cols(), "Instance w_star");
    if (std::abs(norm(w_star_) - 1.0) > 1e-10) throw ParameterError("Instance: w_star must have unit norm");
    y_sq_.resize(samples_.rows());
    for (std::size_t i = 0; i < samples_.rows(); ++i) {
      const double y = dot(w_star_, samples_.row(i));
      y_sq_[i] = y * y;
    }
  }

  std::size_t dim() const noexcept { return samples_.cols(); }
  std::size_t size() const noexcept { return samples_.rows(); }
  const SampleMatrix& samples() const noexcept { return samples_; }
  ConstSpan sample(std::size_t i) const noexcept { return samples_.row(i); }
  ConstSpan w_star() const noexcept { return w_star_; }
  ConstSpan y_sq() const noexcept { return y_sq_; }

 private:
  SampleMatrix samples_;
  Vector w_star_;
  Vector y_sq_;
};

// Samples are drawn row by row from Rng(seed). In random_unit mode w* comes
// from an independent stream, so both modes share the same sample matrix.
inline Instance generate_instance(std::size_t d, std::size_t n, std::uint64_t seed,
                                  WStarMode mode = WStarMode::canonical_e1) {
  if (d == 0 || n == 0) throw ParameterError("generate_instance: d and n must be positive");
  SampleMatrix x(n, d);
  Rng rng(seed);
  rng.fill_normal(x.data());
  Vector w_star;
  if (mode == WStarMode::canonical_e1) {
    w_star = basis_vector(d, 0);
  } else {
    Rng wrng(mix_seed({seed, 0x77u}));
    w_star.resize(d);
    double len = 0.0;
    while (len == 0.0) {
      wrng.fill_normal(w_star);
      len = norm(w_star);
    }
    scale(1.0 / len, w_star);
  }
  return Instance(std::move(x), std::move(w_star));
}

inline double loss(const Instance& inst, ConstSpan w) {
  require_dim(w.size(), inst.dim(), "loss");
  const double s = reduce_rows(inst.size(), [&](std::size_t i) {
    const double b = dot(w, inst.sample(i));
    const double r = b * b - inst.y_sq()[i];
    return r * r;
  });
  return s / (4.0 * static_cast<double>(inst.size()));
}

inline Vector gradient(const Instance& inst, ConstSpan w) {
  require_dim(w.size(), inst.dim(), "gradient");
  Vector g = reduce_rows_vector(inst.size(), inst.dim(), [&](std::size_t i, MutSpan acc) {
    const ConstSpan x = inst.sample(i);
    const double b = dot(w, x);
    axpy((b * b - inst.y_sq()[i]) * b, x, acc);
  });
  scale(1.0 / static_cast<double>(inst.size()), g);
  return g;
}

inline Vector hessian_vector_product(const Instance& inst, ConstSpan w, ConstSpan v) {
  require_dim(w.size(), inst.dim(), "hessian_vector_product");
  require_dim(v.size(), inst.dim(), "hessian_vector_product");
  Vector hv = reduce_rows_vector(inst.size(), inst.dim(), [&](std::size_t i, MutSpan acc) {
    const ConstSpan x = inst.sample(i);
    const double b = dot(w, x);
    axpy((3.0 * b * b - inst.y_sq()[i]) * dot(x, v), x, acc);
  });
  scale(1.0 / static_cast<double>(inst.size()), hv);
  return hv;
}

// u' H(w) u = 1/n sum_i (u.x_i)^2 (3 (w.x_i)^2 - y_i^2)
inline double hessian_quadratic(const Instance& inst, ConstSpan w, ConstSpan u) {
  require_dim(w.size(), inst.dim(), "hessian_quadratic");
  require_dim(u.size(), inst.dim(), "hessian_quadratic");
  const double s = reduce_rows(inst.size(), [&](std::size_t i) {
    const ConstSpan x = inst.sample(i);
    const double a = dot(u, x);
    const double b = dot(w, x);
    return a * a * (3.0 * b * b - inst.y_sq()[i]);
  });
  return s / static_cast<double>(inst.size());
}

namespace detail {

inline Vector checked_delta(const Instance& inst, ConstSpan w, const char* what) {
  require_dim(w.size(), inst.dim(), what);
  Vector delta = subtract(w, inst.w_star());
  if (norm(delta) <= kParallelThreshold) {
    throw DegenerateError(std::string(what) + ": ratio undefined at w = w*");
  }
  return delta;
}

}  // namespace detail

// <grad L(w), w - w*> / |w - w*|^2 via the quartic expansion in delta = w - w*:
// 1/n sum (delta.x)^2 (delta.x + 2 w*.x)(delta.x + w*.x) / |delta|^2.
inline double onepoint_ratio_expanded(const Instance& inst, ConstSpan w) {
  const Vector delta = detail::checked_delta(inst, w, "onepoint_ratio_expanded");
  const double s = reduce_rows(inst.size(), [&](std::size_t i) {
    const ConstSpan x = inst.sample(i);
    const double c = dot(delta, x);
    const double y = dot(inst.w_star(), x);
    return c * c * (c + 2.0 * y) * (c + y);
  });
  return s / (static_cast<double>(inst.size()) * dot(delta, delta));
}

inline double onepoint_ratio(const Instance& inst, ConstSpan w) {
  const Vector delta = detail::checked_delta(inst, w, "onepoint_ratio");
  const double s = reduce_rows(inst.size(), [&](std::size_t i) {
    const ConstSpan x = inst.sample(i);
    const double b = dot(w, x);
    return (b * b - inst.y_sq()[i]) * b * dot(delta, x);
  });
  const double ratio = s / (static_cast<double>(inst.size()) * dot(delta, delta));
#ifndef NDEBUG
  {
    const double expanded = onepoint_ratio_expanded(inst, w);
    assert(std::abs(ratio - expanded) <= 1e-8 * (1.0 + std::abs(expanded)));
  }
#endif
  return ratio;
}

// Position of w relative to w*: w = alpha w* + beta w_perp.
struct LandscapePoint {
  Vector w;
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<Vector> w_perp;  // present iff beta > kParallelThreshold
  Vector delta;
  bool in_local_region = false;  // |alpha - 1| <= 1/3 and 0 < beta <= 1
};

inline LandscapePoint decompose(ConstSpan w, ConstSpan w_star) {
  require_dim(w.size(), w_star.size(), "decompose");
  LandscapePoint p;
  p.w.assign(w.begin(), w.end());
  p.alpha = dot(w, w_star);
  Vector perp(w.begin(), w.end());
  axpy(-p.alpha, w_star, perp);
  // One re-orthogonalization pass keeps |<w_perp, w*>| at rounding level.
  axpy(-dot(perp, w_star), w_star, perp);
  p.beta = norm(perp);
  if (p.beta > kParallelThreshold) {
    scale(1.0 / p.beta, perp);
    p.w_perp = std::move(perp);
  }
  p.delta = subtract(w, w_star);
  p.in_local_region = std::abs(p.alpha - 1.0) <= 1.0 / 3.0 && p.beta > 0.0 && p.beta <= 1.0;
  return p;
}

}  // namespace phaseprobe

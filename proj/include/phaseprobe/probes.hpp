#pragma once

// Landscape probes around w*:
//
//   q_r = min { u' H(w) u : |u| = 1, |w - w*| <= r }
//   Q_r = min { <grad L(w), w - w*> / |w - w*|^2 : |w - w*| <= r }
//
// both minimized by projected Adam, plus closed-form adversarial points built
// from a single extreme sample index J, annulus sampling of the one-point
// ratio, and the truncation split of the labels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phaseprobe/error.hpp"
#include "phaseprobe/linalg.hpp"
#include "phaseprobe/model.hpp"
#include "phaseprobe/optimize.hpp"
#include "phaseprobe/population.hpp"
#include "phaseprobe/rng.hpp"

namespace phaseprobe {

enum class ProbeMetric { q, Q };

inline std::string_view to_string(ProbeMetric m) noexcept { return m == ProbeMetric::q ? "q" : "Q"; }

struct ProbeResult {
  ProbeMetric metric = ProbeMetric::q;
  double r = 0.0;
  double final_value = 0.0;  // best value over the trace
  std::optional<Vector> u;   // q only
  Vector w;
  Trace trace;
  std::uint64_t seed = 0;
};

// Optional explicit starting point; unset parts are drawn from the seed.
struct ProbeInit {
  std::optional<Vector> u;
  std::optional<Vector> w;
};

// Q-probe iterates are kept at least this far from w*.
inline constexpr double kProbeInnerRadius = 1e-8;

inline Vector random_unit_vector(std::size_t d, Rng& rng) {
  Vector v(d);
  double len = 0.0;
  while (len == 0.0) {
    rng.fill_normal(v);
    len = norm(v);
  }
  scale(1.0 / len, v);
  return v;
}

// Uniform point on the sphere |w - center| = r.
inline Vector random_point_on_sphere(ConstSpan center, double r, Rng& rng) {
  Vector w = random_unit_vector(center.size(), rng);
  scale(r, w);
  axpy(1.0, center, w);
  return w;
}

// Objective of the q-probe on the stacked variable z = [u; w].
inline double q_objective(const Instance& inst, ConstSpan z, MutSpan grad) {
  const std::size_t d = inst.dim();
  require_dim(z.size(), 2 * d, "q_objective");
  const ConstSpan u = z.first(d);
  const ConstSpan w = z.subspan(d);
  // Slots [0, d) and [d, 2d) hold the u- and w-gradients, slot 2d the value.
  Vector acc = reduce_rows_vector(inst.size(), 2 * d + 1, [&](std::size_t i, MutSpan out) {
    const ConstSpan x = inst.sample(i);
    const double a = dot(u, x);
    const double b = dot(w, x);
    const double weight = 3.0 * b * b - inst.y_sq()[i];
    const double gu = 2.0 * a * weight;
    const double gw = 6.0 * a * a * b;
    for (std::size_t k = 0; k < d; ++k) {
      out[k] += gu * x[k];
      out[d + k] += gw * x[k];
    }
    out[2 * d] += a * a * weight;
  });
  const double inv_n = 1.0 / static_cast<double>(inst.size());
  for (std::size_t k = 0; k < 2 * d; ++k) grad[k] = acc[k] * inv_n;
  return acc[2 * d] * inv_n;
}

// One-point ratio and its gradient in w:
//   grad R = (H(w) delta + grad L(w)) / |delta|^2 - 2 R delta / |delta|^2.
inline double onepoint_objective(const Instance& inst, ConstSpan w, MutSpan grad) {
  const std::size_t d = inst.dim();
  require_dim(w.size(), d, "onepoint_objective");
  const Vector delta = subtract(w, inst.w_star());
  const double dd = dot(delta, delta);
  if (std::sqrt(dd) <= kParallelThreshold) throw DegenerateError("onepoint_objective: undefined at w = w*");
  Vector acc = reduce_rows_vector(inst.size(), d + 1, [&](std::size_t i, MutSpan out) {
    const ConstSpan x = inst.sample(i);
    const double b = dot(w, x);
    const double c = dot(delta, x);
    const double resid = b * b - inst.y_sq()[i];
    const double coef = resid * b + (3.0 * b * b - inst.y_sq()[i]) * c;
    for (std::size_t k = 0; k < d; ++k) out[k] += coef * x[k];
    out[d] += resid * b * c;
  });
  const double inv_n = 1.0 / static_cast<double>(inst.size());
  const double ratio = acc[d] * inv_n / dd;
  for (std::size_t k = 0; k < d; ++k) grad[k] = acc[k] * inv_n / dd - 2.0 * ratio * delta[k] / dd;
  return ratio;
}

namespace detail {

inline void require_probe_radius(double r, const char* what) {
  if (!(r > 0.0 && r < 2.0)) throw ParameterError(std::string(what) + ": radius must lie in (0, 2)");
}

}  // namespace detail

inline ProbeResult probe_q(const Instance& inst, double r, const AdamConfig& cfg, std::uint64_t seed,
                           const ProbeInit& init = {}) {
  detail::require_probe_radius(r, "probe_q");
  const std::size_t d = inst.dim();
  const Vector center(inst.w_star().begin(), inst.w_star().end());
  Rng rng(seed);
  const Vector u0 = init.u ? *init.u : random_unit_vector(d, rng);
  const Vector w0 = init.w ? *init.w : random_point_on_sphere(center, r, rng);
  require_dim(u0.size(), d, "probe_q init u");
  require_dim(w0.size(), d, "probe_q init w");

  Vector z(u0);
  z.insert(z.end(), w0.begin(), w0.end());
  const Projection proj = Projection::product(Projection::unit_sphere(), d, Projection::ball_around(center, r));
  Trace trace = projected_adam([&](ConstSpan x, MutSpan g) { return q_objective(inst, x, g); }, std::move(z),
                               cfg, proj);

  ProbeResult res;
  res.metric = ProbeMetric::q;
  res.r = r;
  res.final_value = trace.best_value;
  res.u = Vector(trace.best_iterate.begin(), trace.best_iterate.begin() + static_cast<std::ptrdiff_t>(d));
  res.w = Vector(trace.best_iterate.begin() + static_cast<std::ptrdiff_t>(d), trace.best_iterate.end());
  res.trace = std::move(trace);
  res.seed = seed;
  return res;
}

inline ProbeResult probe_Q(const Instance& inst, double r, const AdamConfig& cfg, std::uint64_t seed,
                           const ProbeInit& init = {}) {
  detail::require_probe_radius(r, "probe_Q");
  const Vector center(inst.w_star().begin(), inst.w_star().end());
  Rng rng(seed);
  Vector w0 = init.w ? *init.w : random_point_on_sphere(center, r, rng);
  require_dim(w0.size(), inst.dim(), "probe_Q init w");
  const Projection proj = Projection::ball_around(center, r, kProbeInnerRadius);
  Trace trace = projected_adam([&](ConstSpan x, MutSpan g) { return onepoint_objective(inst, x, g); },
                               std::move(w0), cfg, proj);

  ProbeResult res;
  res.metric = ProbeMetric::Q;
  res.r = r;
  res.final_value = trace.best_value;
  res.w = trace.best_iterate;
  res.trace = std::move(trace);
  res.seed = seed;
  return res;
}

// ---------------------------------------------------------------------------
// Closed-form adversarial points.

enum class CertificateKind {
  hessian_ball,   // u_J = x_J/|x_J|, w = w* + delta_J, J = argmax w*.x_i
  hessian_fixed,  // fixed w, J = argmin z_i, u = x_J projected off span{w, w*}
  onepoint_ball,  // w = w* + (3/2) delta_J, J = argmax w*.x_i
};

inline std::string_view to_string(CertificateKind k) noexcept {
  switch (k) {
    case CertificateKind::hessian_ball: return "hessian_ball";
    case CertificateKind::hessian_fixed: return "hessian_fixed";
    case CertificateKind::onepoint_ball: return "onepoint_ball";
  }
  return "";
}

struct Certificate {
  CertificateKind kind = CertificateKind::hessian_ball;
  std::size_t J = 0;
  std::optional<Vector> u;
  Vector w;
  double value = 0.0;
  double delta_norm = 0.0;  // |w - w*|
  double z_J = std::numeric_limits<double>::quiet_NaN();  // hessian_fixed only
};

// Index of the largest label w*.x_i; lowest index wins ties.
inline std::size_t argmax_label(const Instance& inst) {
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const double y = dot(inst.w_star(), inst.sample(i));
    if (y > best_value) {
      best_value = y;
      best = i;
    }
  }
  return best;
}

namespace detail {

// w* + scale * delta_J with delta_J = -x_J (w*.x_J) / |x_J|^2.
inline Vector shifted_toward_sample(const Instance& inst, std::size_t j, double scale_factor) {
  const ConstSpan x = inst.sample(j);
  const double xx = dot(x, x);
  const double y = dot(inst.w_star(), x);
  Vector w(inst.w_star().begin(), inst.w_star().end());
  axpy(-scale_factor * y / xx, x, w);
  return w;
}

inline void require_two_samples(const Instance& inst, const char* what) {
  if (inst.size() < 2) throw ParameterError(std::string(what) + ": need n >= 2");
}

}  // namespace detail

inline Certificate certificate_hessian_ball(const Instance& inst) {
  detail::require_two_samples(inst, "certificate_hessian_ball");
  Certificate c;
  c.kind = CertificateKind::hessian_ball;
  c.J = argmax_label(inst);
  c.u = project_unit_sphere(inst.sample(c.J));
  c.w = detail::shifted_toward_sample(inst, c.J, 1.0);
  c.value = hessian_quadratic(inst, c.w, *c.u);
  c.delta_norm = distance(c.w, inst.w_star());
  return c;
}

inline Certificate certificate_onepoint_ball(const Instance& inst) {
  detail::require_two_samples(inst, "certificate_onepoint_ball");
  Certificate c;
  c.kind = CertificateKind::onepoint_ball;
  c.J = argmax_label(inst);
  c.w = detail::shifted_toward_sample(inst, c.J, 1.5);
  c.value = onepoint_ratio(inst, c.w);
  c.delta_norm = distance(c.w, inst.w_star());
  return c;
}

// Removes the components of v along w* and w_perp (orthonormal pair).
inline Vector project_off_plane(ConstSpan v, ConstSpan w_star, ConstSpan w_perp) {
  Vector out(v.begin(), v.end());
  for (int pass = 0; pass < 2; ++pass) {
    axpy(-dot(out, w_star), w_star, out);
    axpy(-dot(out, w_perp), w_perp, out);
  }
  return out;
}

inline Certificate certificate_hessian_fixed(const Instance& inst, ConstSpan w) {
  require_dim(w.size(), inst.dim(), "certificate_hessian_fixed");
  const LandscapePoint p = decompose(w, inst.w_star());
  if (!p.w_perp) throw DegenerateError("certificate_hessian_fixed: w is parallel to w* (beta = 0)");

  std::vector<std::pair<double, std::size_t>> order(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const double b = dot(w, inst.sample(i));
    order[i] = {3.0 * b * b - inst.y_sq()[i], i};
  }
  // Ascending z with lowest index on ties.
  std::sort(order.begin(), order.end());

  for (const auto& [z, j] : order) {
    const ConstSpan x = inst.sample(j);
    Vector u = project_off_plane(x, inst.w_star(), *p.w_perp);
    const double len = norm(u);
    if (len <= 1e-12 * std::max(1.0, norm(x))) continue;
    scale(1.0 / len, u);
    Certificate c;
    c.kind = CertificateKind::hessian_fixed;
    c.J = j;
    c.z_J = z;
    c.w.assign(w.begin(), w.end());
    c.value = hessian_quadratic(inst, c.w, u);
    c.u = std::move(u);
    c.delta_norm = distance(c.w, inst.w_star());
    return c;
  }
  throw DegenerateError("certificate_hessian_fixed: every sample lies in span{w, w*}");
}

// Uniform unit direction orthogonal to both w* and w_perp.
inline Vector random_direction_off_plane(ConstSpan w_star, ConstSpan w_perp, Rng& rng) {
  for (;;) {
    Vector g(w_star.size());
    rng.fill_normal(g);
    Vector u = project_off_plane(g, w_star, w_perp);
    const double len = norm(u);
    if (len > 1e-12) {
      scale(1.0 / len, u);
      return u;
    }
  }
}

// ---------------------------------------------------------------------------
// Annulus sampling of the one-point ratio.

struct AnnulusResult {
  double min_ratio = std::numeric_limits<double>::infinity();
  Vector argmin_w;
};

// Direction ~ normalized Gaussian, radius ~ U[r_lo, r_hi].
inline AnnulusResult annulus_min(ConstSpan center, double r_lo, double r_hi, std::size_t num_points,
                                 std::uint64_t seed, const std::function<double(ConstSpan)>& ratio) {
  if (!(r_lo > 0.0) || r_hi < r_lo) throw ParameterError("annulus_min_ratio: need 0 < r_lo <= r_hi");
  if (num_points == 0) throw ParameterError("annulus_min_ratio: num_points must be positive");
  Rng rng(seed);
  AnnulusResult res;
  for (std::size_t k = 0; k < num_points; ++k) {
    const double radius = rng.uniform(r_lo, r_hi);
    Vector w = random_point_on_sphere(center, radius, rng);
    const double value = ratio(w);
    if (value < res.min_ratio) {
      res.min_ratio = value;
      res.argmin_w = std::move(w);
    }
  }
  return res;
}

inline AnnulusResult annulus_min_ratio(const Instance& inst, double r_lo, double r_hi, std::size_t num_points,
                                       std::uint64_t seed) {
  return annulus_min(inst.w_star(), r_lo, r_hi, num_points, seed,
                     [&inst](ConstSpan w) { return onepoint_ratio(inst, w); });
}

inline AnnulusResult annulus_min_ratio_population(ConstSpan w_star, double r_lo, double r_hi,
                                                  std::size_t num_points, std::uint64_t seed) {
  return annulus_min(w_star, r_lo, r_hi, num_points, seed,
                     [w_star](ConstSpan w) { return pop_onepoint_ratio(w, w_star); });
}

// C sqrt(ln n / d): the radius inside which one-point convexity fails once
// n = o(d log d).
inline double locality_radius(double n, std::size_t d, double C = 3.0) {
  if (!(n >= 2.0) || d < 1 || !(C > 0.0)) throw ParameterError("locality_radius: need n >= 2, d >= 1, C > 0");
  return C * std::sqrt(std::log(n) / static_cast<double>(d));
}

struct TruncationSplit {
  std::vector<std::size_t> at_most;  // |w*.x_i| <= t
  std::vector<std::size_t> above;    // |w*.x_i| > t
  // (64/n) sum_{i in above} (w*.x_i)^4, from x^2 (x^2 + 6xy + 4y^2) >= -64 y^4.
  double tail_term = 0.0;
};

inline TruncationSplit truncation_split(const Instance& inst, double t) {
  if (!(t > 0.0)) throw ParameterError("truncation_split: t must be positive");
  TruncationSplit split;
  CompensatedSum tail;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const double y_sq = inst.y_sq()[i];
    if (std::sqrt(y_sq) <= t) {
      split.at_most.push_back(i);
    } else {
      split.above.push_back(i);
      tail.add(y_sq * y_sq);
    }
  }
  split.tail_term = 64.0 * tail.value() / static_cast<double>(inst.size());
  return split;
}

}  // namespace phaseprobe

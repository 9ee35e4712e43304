#pragma once

// First-order optimizers: projected Adam (used by the landscape probes),
// plain gradient descent on L, and a gradient-flow integrator.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "phaseprobe/error.hpp"
#include "phaseprobe/linalg.hpp"
#include "phaseprobe/model.hpp"
#include "phaseprobe/population.hpp"

namespace phaseprobe {

struct LrSegment {
  std::size_t steps = 0;
  double learning_rate = 0.0;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<LrSegment> schedule;

  std::size_t total_steps() const noexcept {
    std::size_t total = 0;
    for (const auto& s : schedule) total += s.steps;
    return total;
  }

  void validate() const {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      throw ParameterError("AdamConfig: beta1 and beta2 must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ParameterError("AdamConfig: epsilon must be positive");
    for (const auto& s : schedule) {
      if (!(s.learning_rate > 0.0)) throw ParameterError("AdamConfig: learning rates must be positive");
    }
  }

  // 0.001 x 200, 0.0005 x 200, 0.0003 x 600
  static AdamConfig fig2() { return AdamConfig{0.9, 0.999, 1e-8, {{200, 1e-3}, {200, 5e-4}, {600, 3e-4}}}; }
  // 0.01 x 3000
  static AdamConfig fig3() { return AdamConfig{0.9, 0.999, 1e-8, {{3000, 1e-2}}}; }
};

// Euclidean projections.

inline Vector project_unit_sphere(ConstSpan v) {
  const double len = norm(v);
  if (!(len > 1e-300)) throw DegenerateError("project_unit_sphere: direction undefined at the origin");
  return scaled(1.0 / len, v);
}

inline Vector project_ball(ConstSpan w, ConstSpan center, double r) {
  require_dim(w.size(), center.size(), "project_ball");
  const double dist = distance(w, center);
  if (dist <= r) return Vector(w.begin(), w.end());
  Vector out(center.begin(), center.end());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] += r * (w[i] - center[i]) / dist;
  return out;
}

inline Vector project_sphere(ConstSpan w, ConstSpan center, double r) {
  require_dim(w.size(), center.size(), "project_sphere");
  const double dist = distance(w, center);
  if (!(dist > 1e-300)) throw DegenerateError("project_sphere: direction undefined at the center");
  Vector out(center.begin(), center.end());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] += r * (w[i] - center[i]) / dist;
  return out;
}

// A projection onto a constraint set, possibly a product over a split of the
// variable (used for the joint (u, w) probe variable).
class Projection {
 public:
  enum class Kind { unit_sphere, ball_around, sphere_around, product };

  static Projection unit_sphere() { return Projection(Kind::unit_sphere); }

  // Ball of radius r; a positive inner_radius additionally keeps points at
  // least that far from the center (pushed out radially).
  static Projection ball_around(Vector center, double r, double inner_radius = 0.0) {
    if (!(r > 0.0) || inner_radius < 0.0 || inner_radius > r) {
      throw ParameterError("Projection::ball_around: need 0 <= inner_radius <= r, r > 0");
    }
    Projection p(Kind::ball_around);
    p.center_ = std::move(center);
    p.radius_ = r;
    p.inner_radius_ = inner_radius;
    return p;
  }

  static Projection sphere_around(Vector center, double r) {
    if (!(r > 0.0)) throw ParameterError("Projection::sphere_around: r must be positive");
    Projection p(Kind::sphere_around);
    p.center_ = std::move(center);
    p.radius_ = r;
    return p;
  }

  // First `first_dim` coordinates go to `first`, the rest to `second`.
  static Projection product(Projection first, std::size_t first_dim, Projection second) {
    Projection p(Kind::product);
    p.split_ = first_dim;
    p.first_ = std::make_shared<const Projection>(std::move(first));
    p.second_ = std::make_shared<const Projection>(std::move(second));
    return p;
  }

  Kind kind() const noexcept { return kind_; }

  void apply(MutSpan v) const {
    switch (kind_) {
      case Kind::unit_sphere: {
        const Vector out = project_unit_sphere(v);
        std::copy(out.begin(), out.end(), v.begin());
        break;
      }
      case Kind::ball_around: {
        const double dist = distance(v, center_);
        if (dist > radius_ || dist < inner_radius_) {
          const double target = dist > radius_ ? radius_ : inner_radius_;
          const Vector out = project_sphere(v, center_, target);
          std::copy(out.begin(), out.end(), v.begin());
        }
        break;
      }
      case Kind::sphere_around: {
        const Vector out = project_sphere(v, center_, radius_);
        std::copy(out.begin(), out.end(), v.begin());
        break;
      }
      case Kind::product:
        require_split(v.size());
        first_->apply(v.first(split_));
        second_->apply(v.subspan(split_));
        break;
    }
  }

  Vector operator()(ConstSpan v) const {
    Vector out(v.begin(), v.end());
    apply(out);
    return out;
  }

  // Constraint violation of v (0 when feasible).
  double violation(ConstSpan v) const {
    switch (kind_) {
      case Kind::unit_sphere: return std::abs(norm(v) - 1.0);
      case Kind::ball_around: {
        const double dist = distance(v, center_);
        return std::max({0.0, dist - radius_, inner_radius_ - dist});
      }
      case Kind::sphere_around: return std::abs(distance(v, center_) - radius_);
      case Kind::product:
        require_split(v.size());
        return std::max(first_->violation(v.first(split_)), second_->violation(v.subspan(split_)));
    }
    return 0.0;
  }

 private:
  explicit Projection(Kind kind) : kind_(kind) {}

  void require_split(std::size_t size) const {
    if (split_ > size) throw ParameterError("Projection::product: split exceeds variable size");
  }

  Kind kind_;
  Vector center_;
  double radius_ = 0.0;
  double inner_radius_ = 0.0;
  std::size_t split_ = 0;
  std::shared_ptr<const Projection> first_;
  std::shared_ptr<const Projection> second_;
};

// Optimizer history. values[k] is the objective after k steps (values[0] is
// the initial point), so values.size() == steps + 1. For gradient descent and
// gradient flow, distances[k] = |w_k - w*|.
struct Trace {
  std::vector<double> values;
  std::vector<double> distances;
  Vector final_iterate;
  Vector best_iterate;
  double best_value = std::numeric_limits<double>::infinity();
  std::size_t steps = 0;
  double wall_seconds = 0.0;

  bool monotone_nonincreasing() const noexcept {
    for (std::size_t k = 1; k < values.size(); ++k) {
      if (values[k] > values[k - 1]) return false;
    }
    return true;
  }
};

// Writes the gradient into `grad` and returns the objective value.
using Objective = std::function<double(ConstSpan x, MutSpan grad)>;

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// Adam with bias correction; the iterate is projected after every step.
inline Trace projected_adam(const Objective& objective, Vector init, const AdamConfig& cfg,
                            const Projection& proj) {
  cfg.validate();
  detail::Stopwatch clock;
  Trace trace;
  Vector x = std::move(init);
  proj.apply(x);
  Vector grad(x.size()), m(x.size(), 0.0), v(x.size(), 0.0);

  auto evaluate = [&](std::size_t step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    const double value = objective(x, grad);
    if (!std::isfinite(value) || !all_finite(grad)) {
      throw NumericalError("projected_adam: non-finite objective or gradient", step);
    }
    trace.values.push_back(value);
    if (value < trace.best_value) {
      trace.best_value = value;
      trace.best_iterate = x;
    }
  };

  evaluate(0);
  std::size_t t = 0;
  double b1_pow = 1.0, b2_pow = 1.0;
  for (const auto& segment : cfg.schedule) {
    for (std::size_t k = 0; k < segment.steps; ++k) {
      ++t;
      b1_pow *= cfg.beta1;
      b2_pow *= cfg.beta2;
      const double c1 = 1.0 - b1_pow;
      const double c2 = 1.0 - b2_pow;
      for (std::size_t i = 0; i < x.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        x[i] -= segment.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.epsilon);
      }
      proj.apply(x);
      evaluate(t);
    }
  }
  trace.steps = t;
  trace.final_iterate = std::move(x);
  trace.wall_seconds = clock.seconds();
  return trace;
}

inline constexpr double kDivergenceLoss = 1e12;

// w_{t+1} = w_t - eta grad L(w_t), stopping once |w_t - w*| <= dist_tol.
inline Trace gradient_descent(const Instance& inst, Vector w0, double eta, std::size_t max_steps,
                              double dist_tol) {
  require_dim(w0.size(), inst.dim(), "gradient_descent");
  if (!(eta > 0.0)) throw ParameterError("gradient_descent: eta must be positive");
  detail::Stopwatch clock;
  Trace trace;
  Vector w = std::move(w0);
  auto record = [&](std::size_t step) {
    const double value = loss(inst, w);
    if (!std::isfinite(value) || value > kDivergenceLoss) {
      throw DivergenceError("gradient_descent: loss diverged", step);
    }
    trace.values.push_back(value);
    trace.distances.push_back(distance(w, inst.w_star()));
    if (value < trace.best_value) {
      trace.best_value = value;
      trace.best_iterate = w;
    }
  };
  record(0);
  std::size_t t = 0;
  while (t < max_steps && trace.distances.back() > dist_tol) {
    const Vector g = gradient(inst, w);
    axpy(-eta, g, w);
    ++t;
    record(t);
  }
  trace.steps = t;
  trace.final_iterate = std::move(w);
  trace.wall_seconds = clock.seconds();
  return trace;
}

// A gradient field w -> grad L(w) together with the minimizer it flows to.
struct GradientField {
  std::function<Vector(ConstSpan)> gradient;
  Vector w_star;
};

inline GradientField empirical_field(const Instance& inst) {
  return {[&inst](ConstSpan w) { return gradient(inst, w); },
          Vector(inst.w_star().begin(), inst.w_star().end())};
}

inline GradientField population_field(ConstSpan w_star) {
  Vector star(w_star.begin(), w_star.end());
  return {[star](ConstSpan w) { return pop_gradient(w, star); }, star};
}

enum class FlowMethod { euler, rk4 };

// Integrates dw/dt = -grad L(w) on [0, T] with round(T / dt) fixed steps.
// values[k] = |w_k - w*|^2, distances[k] = |w_k - w*|.
inline Trace gradient_flow(const GradientField& field, Vector w0, double dt, double horizon,
                           FlowMethod method = FlowMethod::rk4) {
  require_dim(w0.size(), field.w_star.size(), "gradient_flow");
  if (!(dt > 0.0) || !(horizon >= dt)) throw ParameterError("gradient_flow: need dt > 0 and T >= dt");
  detail::Stopwatch clock;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Trace trace;
  Vector w = std::move(w0);
  auto record = [&](std::size_t step) {
    if (!all_finite(w)) throw NumericalError("gradient_flow: non-finite state", step);
    const double dist = distance(w, field.w_star);
    trace.values.push_back(dist * dist);
    trace.distances.push_back(dist);
  };
  record(0);
  const std::size_t d = w.size();
  Vector tmp(d);
  for (std::size_t k = 1; k <= steps; ++k) {
    if (method == FlowMethod::euler) {
      axpy(-dt, field.gradient(w), w);
    } else {
      const Vector k1 = field.gradient(w);
      for (std::size_t i = 0; i < d; ++i) tmp[i] = w[i] - 0.5 * dt * k1[i];
      const Vector k2 = field.gradient(tmp);
      for (std::size_t i = 0; i < d; ++i) tmp[i] = w[i] - 0.5 * dt * k2[i];
      const Vector k3 = field.gradient(tmp);
      for (std::size_t i = 0; i < d; ++i) tmp[i] = w[i] - dt * k3[i];
      const Vector k4 = field.gradient(tmp);
      for (std::size_t i = 0; i < d; ++i) w[i] -= dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    record(k);
  }
  trace.steps = steps;
  trace.best_value = trace.values.back();
  trace.best_iterate = w;
  trace.final_iterate = std::move(w);
  trace.wall_seconds = clock.seconds();
  return trace;
}

}  // namespace phaseprobe

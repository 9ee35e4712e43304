#pragma once

// Monte Carlo checks of the probabilistic facts behind the negative results:
// the selected-index marginal, the add-one swap identity, independence of
// Gaussian inner products with a shared direction, the mean of Gaussian
// maxima, and the negative tail of the 2x2 quadratic form
//   z = 3 b^2 W1^2 + 6 a b W1 W2 + (3 a^2 - 1) W2^2.
//
// Every check has a deliberately broken variant that must fail.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phaseprobe/error.hpp"
#include "phaseprobe/linalg.hpp"
#include "phaseprobe/model.hpp"
#include "phaseprobe/rng.hpp"
#include "phaseprobe/stats.hpp"

namespace phaseprobe {

struct TestReport {
  std::string statistic_name;
  double observed = 0.0;
  double reference_lo = 0.0;
  double reference_hi = 0.0;
  std::size_t n_trials = 0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> details;

  double detail(const std::string& key) const {
    for (const auto& [k, v] : details) {
      if (k == key) return v;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

namespace detail {

inline TestReport make_report(std::string name, double observed, double lo, double hi, std::size_t trials,
                              std::uint64_t seed) {
  TestReport r;
  r.statistic_name = std::move(name);
  r.observed = observed;
  r.reference_lo = lo;
  r.reference_hi = hi;
  r.n_trials = trials;
  r.pass = observed >= lo && observed <= hi;
  r.seed = seed;
  return r;
}

// KS verdicts report the p-value against the band [0.01, 1].
inline TestReport ks_report(std::string name, std::span<const double> a, std::span<const double> b,
                            std::size_t trials, std::uint64_t seed) {
  const stats::KsResult ks = stats::ks_two_sample(a, b);
  TestReport r = make_report(std::move(name), ks.p_value, 0.01, 1.0, trials, seed);
  r.details = {{"ks_statistic", ks.statistic}, {"ks_critical_1pct", ks.critical_1pct}, {"p_value", ks.p_value}};
  return r;
}

inline void require_trials(std::size_t trials, std::size_t minimum, const char* what) {
  if (trials < minimum) {
    throw ParameterError(std::string(what) + ": need at least " + std::to_string(minimum) + " trials");
  }
}

inline void draw_gaussian_rows(Rng& rng, SampleMatrix& z) { rng.fill_normal(z.data()); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Selected-index marginal: if J depends only on Y, then Z_J ~ N(0, I_d).

enum class IndexSelector {
  argmin_y,
  argmax_y,
  argmax_z_norm,  // broken control: J looks at the Z's
};

inline TestReport verify_zj_marginal(std::size_t n, std::size_t d, IndexSelector selector, std::size_t trials,
                                     std::uint64_t seed) {
  if (n == 0 || d == 0) throw ParameterError("verify_zj_marginal: need n, d >= 1");
  detail::require_trials(trials, 1000, "verify_zj_marginal");
  Rng rng(seed);
  Rng ref_rng(mix_seed({seed, 1}));
  SampleMatrix z(n, d);
  Vector y(n);
  std::vector<double> selected(trials), reference(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    detail::draw_gaussian_rows(rng, z);
    rng.fill_normal(y);
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i) {
      switch (selector) {
        case IndexSelector::argmin_y: if (y[i] < y[j]) j = i; break;
        case IndexSelector::argmax_y: if (y[i] > y[j]) j = i; break;
        case IndexSelector::argmax_z_norm: if (dot(z.row(i), z.row(i)) > dot(z.row(j), z.row(j))) j = i; break;
      }
    }
    selected[t] = dot(z.row(j), z.row(j));
    Vector g(d);
    ref_rng.fill_normal(g);
    reference[t] = dot(g, g);
  }
  return detail::ks_report("ks_pvalue_selected_norm_vs_chi2", selected, reference, trials, seed);
}

// ---------------------------------------------------------------------------
// Add-one swap identity:
//   f(Z_{n+1}, Z_J, Y_J) + sum_{i != J} f(Z_i, Z_J, Y_i)  =d  sum_i f(Z_i, Z_{n+1}, Y_i).

enum class SummandKind {
  hessian_form,   // f(z, z', y) = (z.z'/|z'|)^2 y,                     J = argmin Y
  onepoint_form,  // f = q^2 (-g0 q + 2y)(-g0 q + y), q = z.z'/|z'|,     J = argmax Y
};

enum class AddOneVariant {
  swap,     // faithful right-hand side
  no_swap,  // broken control: keeps Z_J in place of Z_{n+1}
};

// Step length of the one-point summand, (3/2) sqrt(2 ln n) / sqrt(d).
inline double onepoint_step_length(std::size_t n, std::size_t d) {
  const double ln_n = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  return 1.5 * std::sqrt(2.0 * ln_n) / std::sqrt(static_cast<double>(d));
}

inline double addone_summand(SummandKind kind, ConstSpan z, ConstSpan z_dir, double y, double step_length) {
  const double q = dot(z, z_dir) / norm(z_dir);
  if (kind == SummandKind::hessian_form) return q * q * y;
  return q * q * (-step_length * q + 2.0 * y) * (-step_length * q + y);
}

inline TestReport verify_addone_identity(std::size_t n, std::size_t d, std::size_t trials, std::uint64_t seed,
                                         SummandKind kind, AddOneVariant variant = AddOneVariant::swap) {
  if (n == 0 || d == 0) throw ParameterError("verify_addone_identity: need n, d >= 1");
  detail::require_trials(trials, 1000, "verify_addone_identity");
  const double g0 = onepoint_step_length(n, d);
  auto select = [kind](const Vector& y) {
    std::size_t j = 0;
    for (std::size_t i = 1; i < y.size(); ++i) {
      if (kind == SummandKind::hessian_form ? y[i] < y[j] : y[i] > y[j]) j = i;
    }
    return j;
  };

  Rng lhs_rng(mix_seed({seed, 1}));
  Rng rhs_rng(mix_seed({seed, 2}));
  SampleMatrix z(n + 1, d);
  Vector y(n);
  std::vector<double> lhs(trials), rhs(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    detail::draw_gaussian_rows(lhs_rng, z);
    lhs_rng.fill_normal(y);
    const std::size_t j = select(y);
    double s = addone_summand(kind, z.row(n), z.row(j), y[j], g0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j) s += addone_summand(kind, z.row(i), z.row(j), y[i], g0);
    }
    lhs[t] = s;
  }
  for (std::size_t t = 0; t < trials; ++t) {
    detail::draw_gaussian_rows(rhs_rng, z);
    rhs_rng.fill_normal(y);
    const std::size_t dir = variant == AddOneVariant::swap ? n : select(y);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += addone_summand(kind, z.row(i), z.row(dir), y[i], g0);
    rhs[t] = s;
  }
  return detail::ks_report("ks_pvalue_addone_lhs_vs_rhs", lhs, rhs, trials, seed);
}

// ---------------------------------------------------------------------------
// U_i = Z_i . Z_{n+1} / |Z_{n+1}| are i.i.d. N(0, 1).

enum class CoordinateLaw {
  gaussian,
  rademacher,  // control: Gaussianity of the Z's is what makes U jointly normal
};

// Composite verdict: observed is the largest of |corr| / (3/sqrt(T)),
// |E[U1^2 U2^2] - 1| / (5/sqrt(T)) and D_KS / D_crit; pass iff it is <= 1.
inline TestReport verify_inner_product_independence(std::size_t n, std::size_t d, std::size_t trials,
                                                    std::uint64_t seed,
                                                    CoordinateLaw law = CoordinateLaw::gaussian) {
  if (n < 2 || d == 0) throw ParameterError("verify_inner_product_independence: need n >= 2, d >= 1");
  detail::require_trials(trials, 10000, "verify_inner_product_independence");
  Rng rng(seed);
  Rng ref_rng(mix_seed({seed, 1}));
  auto draw = [&](MutSpan v) {
    if (law == CoordinateLaw::gaussian) {
      rng.fill_normal(v);
    } else {
      for (double& x : v) x = (rng.next() >> 63) != 0 ? 1.0 : -1.0;
    }
  };
  SampleMatrix z(n + 1, d);
  std::vector<double> u1(trials), u2(trials), prod(trials), mix(trials), reference(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    draw(z.data());
    const ConstSpan shared = z.row(n);
    const double len = norm(shared);
    u1[t] = dot(z.row(0), shared) / len;
    u2[t] = dot(z.row(1), shared) / len;
    prod[t] = u1[t] * u1[t] * u2[t] * u2[t];
    mix[t] = (u1[t] + u2[t]) / std::numbers::sqrt2;
    reference[t] = ref_rng.normal();
  }
  const double root_t = std::sqrt(static_cast<double>(trials));
  const double corr = stats::correlation(u1, u2);
  const double fourth = stats::mean(prod);
  const stats::KsResult ks = stats::ks_two_sample(mix, reference);
  const double corr_ratio = std::abs(corr) / (3.0 / root_t);
  const double fourth_ratio = std::abs(fourth - 1.0) / (5.0 / root_t);
  const double ks_ratio = ks.statistic / ks.critical_1pct;
  TestReport r = detail::make_report("max_normalized_deviation", std::max({corr_ratio, fourth_ratio, ks_ratio}),
                                     0.0, 1.0, trials, seed);
  r.details = {{"corr_u1_u2", corr},        {"corr_ratio", corr_ratio},   {"mean_u1sq_u2sq", fourth},
               {"fourth_ratio", fourth_ratio}, {"ks_statistic", ks.statistic}, {"ks_ratio", ks_ratio},
               {"ks_p_value", ks.p_value}};
  return r;
}

// ---------------------------------------------------------------------------
// E[max of n standard normals] against sqrt(2 ln n).

inline double expected_max_of_two_normals() { return 1.0 / std::sqrt(std::numbers::pi); }

// Verdict by n: n >= 10^4 requires mean / sqrt(2 ln n) in [0.75, 1]; n = 2
// requires the mean within 3 SE of 1/sqrt(pi); other n only the universal
// upper bound mean <= sqrt(2 ln n) (+3 SE).
inline TestReport extreme_value_mean(std::size_t n, std::size_t trials, std::uint64_t seed) {
  if (n < 2) throw ParameterError("extreme_value_mean: need n >= 2");
  if (trials < 2) throw ParameterError("extreme_value_mean: need at least 2 trials");
  Rng rng(seed);
  std::vector<double> maxima(trials), minima(trials), sums(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = rng.normal();
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    maxima[t] = hi;
    minima[t] = lo;
    sums[t] = hi + lo;
  }
  const double mean_max = stats::mean(maxima);
  const double se_max = stats::standard_error(maxima);
  const double scale_ref = std::sqrt(2.0 * std::log(static_cast<double>(n)));
  const double ratio = mean_max / scale_ref;

  TestReport r;
  if (n >= 10000) {
    r = detail::make_report("mean_max_over_sqrt_2ln_n", ratio, 0.75, 1.0, trials, seed);
  } else if (n == 2) {
    const double exact = expected_max_of_two_normals();
    r = detail::make_report("mean_max", mean_max, exact - 3.0 * se_max, exact + 3.0 * se_max, trials, seed);
  } else {
    r = detail::make_report("mean_max", mean_max, -std::numeric_limits<double>::infinity(),
                            scale_ref + 3.0 * se_max, trials, seed);
  }
  r.details = {{"mean_max", mean_max},
               {"se_max", se_max},
               {"mean_min", stats::mean(minima)},
               {"se_min", stats::standard_error(minima)},
               {"ratio", ratio},
               {"symmetry_gap", stats::mean(sums)},
               {"symmetry_se", stats::standard_error(sums)}};
  return r;
}

// ---------------------------------------------------------------------------
// Negative tail of the 2x2 quadratic form a W1^2 + 2b W1 W2 + c W2^2.

struct QuadraticFormEigen {
  double a = 0.0, b = 0.0, c = 0.0;
  double lambda_plus = 0.0, lambda_minus = 0.0;
};

// Coefficients a = 3 beta^2, b = 3 alpha beta, c = 3 alpha^2 - 1 and
// lambda_pm = (a + c +- sqrt((a - c)^2 + 4 b^2)) / 2.
inline QuadraticFormEigen quadratic_form_eigen(double alpha, double beta) {
  QuadraticFormEigen e;
  e.a = 3.0 * beta * beta;
  e.b = 3.0 * alpha * beta;
  e.c = 3.0 * alpha * alpha - 1.0;
  const double disc = std::sqrt((e.a - e.c) * (e.a - e.c) + 4.0 * e.b * e.b);
  e.lambda_plus = 0.5 * (e.a + e.c + disc);
  // det / lambda_plus avoids cancellation when lambda_minus is small.
  const double det = e.a * e.c - e.b * e.b;
  e.lambda_minus = e.lambda_plus != 0.0 ? det / e.lambda_plus : 0.5 * (e.a + e.c - disc);
  return e;
}

// kappa sqrt(-lm / t) exp(t / (2 lm)) exp(lp / (2 lm))
inline double quadratic_tail_lower_form(const QuadraticFormEigen& e, double t, double kappa = 0.1) {
  const double lm = e.lambda_minus;
  return kappa * std::sqrt(-lm / t) * std::exp(t / (2.0 * lm)) * std::exp(e.lambda_plus / (2.0 * lm));
}

inline TestReport quadratic_form_tail(double alpha, double beta, double t, std::size_t trials, std::uint64_t seed,
                                      double kappa = 0.1) {
  if (beta < 0.0 || !(t > 0.0)) throw ParameterError("quadratic_form_tail: need beta >= 0 and t > 0");
  if (trials == 0) throw ParameterError("quadratic_form_tail: need at least one trial");
  const QuadraticFormEigen e = quadratic_form_eigen(alpha, beta);
  if (e.lambda_minus >= 0.0) throw DegenerateError("quadratic_form_tail: semidefinite form (no negative tail)");
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    const double w1 = rng.normal();
    const double w2 = rng.normal();
    const double z = e.a * w1 * w1 + 2.0 * e.b * w1 * w2 + e.c * w2 * w2;
    if (z <= -t) ++hits;
  }
  const double tail = static_cast<double>(hits) / static_cast<double>(trials);
  const double bound = quadratic_tail_lower_form(e, t, kappa);
  TestReport r = detail::make_report("tail_probability", tail, bound, 1.0, trials, seed);
  r.details = {{"lambda_plus", e.lambda_plus}, {"lambda_minus", e.lambda_minus}, {"lower_form", bound},
               {"hits", static_cast<double>(hits)}, {"kappa", kappa}};
  return r;
}

// min_i (3 (w.x_i)^2 - y_i^2): the most negative per-sample curvature weight.
inline double empirical_min_z(const Instance& inst, ConstSpan w) {
  require_dim(w.size(), inst.dim(), "empirical_min_z");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const double b = dot(w, inst.sample(i));
    best = std::min(best, 3.0 * b * b - inst.y_sq()[i]);
  }
  return best;
}

}  // namespace phaseprobe

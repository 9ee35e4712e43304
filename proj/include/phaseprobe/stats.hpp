#pragma once

// Small statistics toolbox: summaries and the two-sample Kolmogorov-Smirnov
// test with asymptotic critical values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "phaseprobe/error.hpp"
#include "phaseprobe/linalg.hpp"

namespace phaseprobe::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  CompensatedSum s;
  for (double v : x) s.add(v);
  return s.value() / static_cast<double>(x.size());
}

// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
inline double stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  CompensatedSum s;
  for (double v : x) s.add((v - m) * (v - m));
  return std::sqrt(s.value() / static_cast<double>(x.size() - 1));
}

inline double standard_error(std::span<const double> x) {
  return x.empty() ? 0.0 : stddev(x) / std::sqrt(static_cast<double>(x.size()));
}

inline double median(std::span<const double> x) {
  if (x.empty()) return 0.0;
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// Sample Pearson correlation.
inline double correlation(std::span<const double> a, std::span<const double> b) {
  require_dim(b.size(), a.size(), "correlation");
  const double ma = mean(a), mb = mean(b);
  CompensatedSum sab, saa, sbb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab.add((a[i] - ma) * (b[i] - mb));
    saa.add((a[i] - ma) * (a[i] - ma));
    sbb.add((b[i] - mb) * (b[i] - mb));
  }
  return sab.value() / std::sqrt(saa.value() * sbb.value());
}

// P(K > lambda) for the Kolmogorov distribution.
inline double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double critical_1pct = 0.0;  // asymptotic critical value of D at level 0.01
  bool reject_1pct() const noexcept { return p_value < 0.01; }
};

// c(alpha) sqrt((m + n) / (m n)) with c(0.01) = sqrt(-ln(0.005) / 2).
inline double ks_critical_value(std::size_t m, std::size_t n, double alpha = 0.01) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(m + n) / (static_cast<double>(m) * static_cast<double>(n)));
}

inline KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ParameterError("ks_two_sample: both samples must be non-empty");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double m = static_cast<double>(x.size());
  const double n = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n));
  }
  KsResult r;
  r.statistic = d;
  const double en = std::sqrt(m * n / (m + n));
  r.p_value = kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
  r.critical_1pct = ks_critical_value(x.size(), y.size());
  return r;
}

}  // namespace phaseprobe::stats

#pragma once

// Dense vector helpers and the row-major sample matrix.
//
// Reductions over samples run in fixed-size chunks: each chunk accumulates
// plainly, chunk partials are merged with Neumaier compensation. The chunk
// layout depends only on n, so every reduction is bit-reproducible.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "phaseprobe/error.hpp"

namespace phaseprobe {

using Vector = std::vector<double>;
using ConstSpan = std::span<const double>;
using MutSpan = std::span<double>;

inline constexpr std::size_t kReductionChunk = 256;

inline void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ParameterError(std::string(what) + ": dimension mismatch (got " +
                         std::to_string(got) + ", expected " + std::to_string(want) + ")");
  }
}

inline double dot(ConstSpan a, ConstSpan b) noexcept {
  const std::size_t n = a.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

inline double norm(ConstSpan a) noexcept { return std::sqrt(dot(a, a)); }

inline double distance(ConstSpan a, ConstSpan b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

// y += alpha * x
inline void axpy(double alpha, ConstSpan x, MutSpan y) noexcept {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, MutSpan x) noexcept {
  for (double& v : x) v *= alpha;
}

inline Vector add(ConstSpan a, ConstSpan b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vector subtract(ConstSpan a, ConstSpan b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vector scaled(double alpha, ConstSpan a) {
  Vector out(a.begin(), a.end());
  scale(alpha, out);
  return out;
}

inline Vector basis_vector(std::size_t d, std::size_t k) {
  Vector e(d, 0.0);
  e[k] = 1.0;
  return e;
}

inline bool all_finite(ConstSpan a) noexcept {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class SampleMatrix {
 public:
  SampleMatrix() = default;
  SampleMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  SampleMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    require_dim(data_.size(), rows * cols, "SampleMatrix");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  ConstSpan row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  MutSpan row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }

  ConstSpan data() const noexcept { return data_; }
  MutSpan data() noexcept { return data_; }

  bool operator==(const SampleMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Sum over rows of a per-row scalar term, chunked and compensated.
template <class Term>
double reduce_rows(std::size_t n, Term&& term) {
  CompensatedSum total;
  for (std::size_t start = 0; start < n; start += kReductionChunk) {
    const std::size_t stop = std::min(n, start + kReductionChunk);
    double partial = 0.0;
    for (std::size_t i = start; i < stop; ++i) partial += term(i);
    total.add(partial);
  }
  return total.value();
}

// Sum over rows of per-row vector contributions of length `width`.
// `accumulate(i, acc)` adds row i's contribution into acc.
template <class Accumulate>
Vector reduce_rows_vector(std::size_t n, std::size_t width, Accumulate&& accumulate) {
  std::vector<CompensatedSum> total(width);
  Vector chunk(width);
  for (std::size_t start = 0; start < n; start += kReductionChunk) {
    const std::size_t stop = std::min(n, start + kReductionChunk);
    std::fill(chunk.begin(), chunk.end(), 0.0);
    for (std::size_t i = start; i < stop; ++i) accumulate(i, MutSpan(chunk));
    for (std::size_t k = 0; k < width; ++k) total[k].add(chunk[k]);
  }
  Vector out(width);
  for (std::size_t k = 0; k < width; ++k) out[k] = total[k].value();
  return out;
}

}  // namespace phaseprobe

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace twinsgd {

// Dense vector helpers used by the trainers and the batch solver.
// Accumulation is plain left-to-right; the closed-form equivalence checks
// rely on this ordering, so keep these loops scalar and do not enable
// -ffast-math style reassociation.

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm_sq(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, std::span<double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= alpha;
}

inline void fill_zero(std::span<double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.0;
}

inline bool all_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace twinsgd

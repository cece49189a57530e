#pragma once

// Test-only utilities: independent oracle routes (finite differences, the
// augmented closed-form update) and small fixture datasets. Everything here
// must stay independent of the implementation paths it checks.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "twinsgd/dataset.hpp"
#include "twinsgd/rng.hpp"
#include "twinsgd/vec.hpp"

namespace testutil {

// Central finite differences of a scalar function on R^d.
inline std::vector<double> fd_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> u, double h = 1e-6) {
  std::vector<double> grad(u.size());
  std::vector<double> probe(u.begin(), u.end());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double fp = f(probe);
    probe[i] = saved - h;
    const double fm = f(probe);
    probe[i] = saved;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

inline double max_rel_err(std::span<const double> got, std::span<const double> want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double scale = std::max({std::fabs(want[i]), std::fabs(got[i]), 1.0});
    worst = std::max(worst, std::fabs(got[i] - want[i]) / scale);
  }
  return worst;
}

// Single-iteration update of the augmented iterate u = (w, b) with
// z = (x, 1), zhat = (xhat, 1): the paper-style one-vector route for half 1,
//   u' = (1 - 1/t) u - (c1/t) z z'u - (c2/t) zhat sign(1 + u'zhat)_+ .
// It must agree bit for bit with subgrad+step on the split (w, b) state.
inline std::vector<double> aug_update_f1(std::span<const double> u,
                                         std::span<const double> z,
                                         std::span<const double> zhat, double c1,
                                         double c2, std::uint64_t t) {
  const double eta = 1.0 / double(t);
  const double a1 = c1 * twinsgd::dot(u, z);
  const double s = (1.0 + twinsgd::dot(u, zhat) > 0.0) ? 1.0 : 0.0;
  const double a2 = c2 * s;
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double g = (u[i] + a1 * z[i]) + a2 * zhat[i];
    out[i] = u[i] - eta * g;
  }
  return out;
}

// Mirror route for half 2: proximal on zhat, hinge 1 - u'z.
inline std::vector<double> aug_update_f2(std::span<const double> u,
                                         std::span<const double> z,
                                         std::span<const double> zhat, double c3,
                                         double c4, std::uint64_t t) {
  const double eta = 1.0 / double(t);
  const double a1 = c3 * twinsgd::dot(u, zhat);
  const double s = (1.0 - twinsgd::dot(u, z) > 0.0) ? 1.0 : 0.0;
  const double a2 = c4 * s;
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double g = (u[i] + a1 * zhat[i]) - a2 * z[i];
    out[i] = u[i] - eta * g;
  }
  return out;
}

inline std::vector<double> random_vec(twinsgd::Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.gaussian();
  return v;
}

inline std::vector<double> augment(std::span<const double> x) {
  std::vector<double> z(x.begin(), x.end());
  z.push_back(1.0);
  return z;
}

// 6 positives / 4 negatives in the plane, one negative sitting close to the
// class boundary.
inline twinsgd::Dataset toy_10() {
  twinsgd::Dataset ds(2);
  const double pos[6][2] = {{1.8, 2.2}, {2.4, 1.9}, {2.0, 2.6}, {2.9, 2.3}, {1.5, 1.7}, {2.3, 3.0}};
  const double neg[4][2] = {{-1.2, -0.8}, {-0.6, -1.5}, {-1.8, -1.1}, {0.4, 0.2}};
  for (auto& p : pos) ds.add_positive({p, 2});
  for (auto& p : neg) ds.add_negative({p, 2});
  return ds;
}

// One positive at +a, one negative at -a on the line.
inline twinsgd::Dataset symmetric_1d(double a) {
  twinsgd::Dataset ds(1);
  double x = a;
  ds.add_positive({&x, 1});
  x = -a;
  ds.add_negative({&x, 1});
  return ds;
}

}  // namespace testutil

#include "twinsgd/oracle.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "twinsgd/sgtsvm.hpp"
#include "twinsgd/vec.hpp"

namespace twinsgd {

void OracleConfig::validate() const {
  if (!(obj_tol > 0.0)) throw std::invalid_argument("OracleConfig: obj_tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("OracleConfig: max_iter must be >= 1");
  if (!(shrink > 0.0 && shrink < 1.0))
    throw std::invalid_argument("OracleConfig: shrink must be in (0,1)");
  if (!(step_init > 0.0) || !(armijo > 0.0))
    throw std::invalid_argument("OracleConfig: step_init and armijo must be > 0");
}

void batch_subgrad_f1(std::span<const double> u, const Dataset& ds, double c1,
                      double c2, std::span<double> out) {
  const std::size_t n = ds.dim();
  if (u.size() != n + 1 || out.size() != n + 1)
    throw std::invalid_argument("batch_subgrad_f1: dimension mismatch");
  const std::span<const double> w = u.first(n);
  const double b = u[n];
  for (std::size_t i = 0; i <= n; ++i) out[i] = u[i];
  const double prox_coef = c1 / double(ds.m1());
  for (std::size_t i = 0; i < ds.m1(); ++i) {
    const auto x = ds.positive(i);
    const double a = prox_coef * (dot(w, x) + b);
    for (std::size_t k = 0; k < n; ++k) out[k] += a * x[k];
    out[n] += a;
  }
  const double hinge_coef = c2 / double(ds.m2());
  for (std::size_t j = 0; j < ds.m2(); ++j) {
    const auto x = ds.negative(j);
    if (1.0 + (dot(w, x) + b) > 0.0) {
      for (std::size_t k = 0; k < n; ++k) out[k] += hinge_coef * x[k];
      out[n] += hinge_coef;
    }
  }
}

void batch_subgrad_f2(std::span<const double> u, const Dataset& ds, double c3,
                      double c4, std::span<double> out) {
  const std::size_t n = ds.dim();
  if (u.size() != n + 1 || out.size() != n + 1)
    throw std::invalid_argument("batch_subgrad_f2: dimension mismatch");
  const std::span<const double> w = u.first(n);
  const double b = u[n];
  for (std::size_t i = 0; i <= n; ++i) out[i] = u[i];
  const double prox_coef = c3 / double(ds.m2());
  for (std::size_t j = 0; j < ds.m2(); ++j) {
    const auto x = ds.negative(j);
    const double a = prox_coef * (dot(w, x) + b);
    for (std::size_t k = 0; k < n; ++k) out[k] += a * x[k];
    out[n] += a;
  }
  const double hinge_coef = c4 / double(ds.m1());
  for (std::size_t i = 0; i < ds.m1(); ++i) {
    const auto x = ds.positive(i);
    if (1.0 - (dot(w, x) + b) > 0.0) {
      for (std::size_t k = 0; k < n; ++k) out[k] -= hinge_coef * x[k];
      out[n] -= hinge_coef;
    }
  }
}

namespace {

using ObjFn = std::function<double(std::span<const double>)>;
using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

HalfSolve minimize(std::size_t dim, const ObjFn& obj, const GradFn& grad,
                   const OracleConfig& cfg) {
  HalfSolve res;
  res.u.assign(dim, 0.0);
  std::vector<double> g(dim), trial(dim);

  double f = obj(res.u);
  std::uint64_t calm = 0;  // consecutive iterations with tiny relative change
  for (std::uint64_t it = 1; it <= cfg.max_iter; ++it) {
    res.iterations = it;
    grad(res.u, g);
    const double g_sq = norm_sq(g);
    if (g_sq == 0.0) {
      res.converged = true;
      break;
    }

    double alpha = cfg.step_init;
    double f_trial = f;
    bool accepted = false;
    while (alpha > 1e-20) {
      for (std::size_t i = 0; i < dim; ++i) trial[i] = res.u[i] - alpha * g[i];
      f_trial = obj(trial);
      if (f_trial <= f - cfg.armijo * alpha * g_sq) {
        accepted = true;
        break;
      }
      alpha *= cfg.shrink;
    }
    if (!accepted) {
      // -g is not a descent direction (exactly on a hinge kink); no further
      // progress is possible along the selected subgradient.
      res.converged = true;
      break;
    }

    res.u.swap(trial);
    const double rel = (f - f_trial) / std::max(std::fabs(f_trial), 1e-300);
    f = f_trial;
    if (rel < cfg.obj_tol) {
      if (++calm >= cfg.patience) {
        res.converged = true;
        break;
      }
    } else {
      calm = 0;
    }
  }

  res.f_star = f;
  grad(res.u, g);
  res.subgrad_norm = norm(g);
  return res;
}

}  // namespace

OracleResult solve(const Dataset& ds, double c1, double c2, double c3, double c4,
                   const KernelSpec* kernel, const OracleConfig& cfg) {
  cfg.validate();
  ds.validate();
  if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && c4 > 0.0))
    throw std::invalid_argument("oracle: penalties must be > 0");
  if (ds.size() > cfg.size_guard && !cfg.override_guard)
    throw std::invalid_argument("oracle: dataset has " + std::to_string(ds.size()) +
                                " samples, above the full-batch guard of " +
                                std::to_string(cfg.size_guard) +
                                "; override to proceed");

  const KernelSpec* gauss = kernel && kernel->is_gaussian() ? kernel : nullptr;
  Dataset mapped;
  const Dataset* data = &ds;
  if (gauss) {
    mapped = map_dataset(*gauss, ds);
    data = &mapped;
  }
  const std::size_t dim = data->dim() + 1;

  OracleResult out;
  out.half1 = minimize(
      dim, [&](std::span<const double> u) { return objective_f1_aug(u, *data, c1, c2); },
      [&](std::span<const double> u, std::span<double> g) {
        batch_subgrad_f1(u, *data, c1, c2, g);
      },
      cfg);
  out.half2 = minimize(
      dim, [&](std::span<const double> u) { return objective_f2_aug(u, *data, c3, c4); },
      [&](std::span<const double> u, std::span<double> g) {
        batch_subgrad_f2(u, *data, c3, c4, g);
      },
      cfg);

  out.f1_star = out.half1.f_star;
  out.f2_star = out.half2.f_star;
  auto to_half = [&](const HalfSolve& h) {
    std::vector<double> w(h.u.begin(), h.u.end() - 1);
    return HalfModel::make(std::move(w), h.u.back());
  };
  out.model.half1 = to_half(out.half1);
  out.model.half2 = to_half(out.half2);
  if (gauss) out.model.kernel = *gauss;
  out.model.meta.converged1 = out.half1.converged;
  out.model.meta.converged2 = out.half2.converged;
  out.model.meta.iterations = std::max(out.half1.iterations, out.half2.iterations);
  return out;
}

}  // namespace twinsgd

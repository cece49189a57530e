#include "twinsgd/sgtsvm.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

#include "twinsgd/rng.hpp"
#include "twinsgd/vec.hpp"

namespace twinsgd {

namespace {

void append_real(std::string& out, double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  out.append(buf, res.ptr);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && c4 > 0.0))
    throw std::invalid_argument("TrainConfig: penalties c1..c4 must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("TrainConfig: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("TrainConfig: max_iter must be >= 1");
  if (step == nullptr) throw std::invalid_argument("TrainConfig: missing step schedule");
}

std::uint64_t TrainConfig::hash(const KernelSpec* kernel) const {
  std::string s = "sgtsvm|";
  for (double v : {c1, c2, c3, c4, tol}) {
    append_real(s, v);
    s.push_back('|');
  }
  s += std::to_string(max_iter) + "|" + std::to_string(int(policy.kind)) + "|" +
       std::to_string(policy.seed) + "|" + std::to_string(int(trace));
  if (kernel && kernel->is_gaussian()) {
    s += "|gauss|";
    append_real(s, kernel->mu);
    s += "|" + std::to_string(kernel->r);
  }
  return fnv1a64(s);
}

void subgrad_f1(std::span<const double> w, double b, std::span<const double> x,
                std::span<const double> xhat, double c1, double c2,
                std::span<double> grad_w, double& grad_b) {
  const double a1 = c1 * (dot(w, x) + b);
  const double s = (1.0 + (dot(w, xhat) + b) > 0.0) ? 1.0 : 0.0;
  const double a2 = c2 * s;
  for (std::size_t i = 0; i < w.size(); ++i)
    grad_w[i] = (w[i] + a1 * x[i]) + a2 * xhat[i];
  grad_b = (b + a1) + a2;
}

void subgrad_f2(std::span<const double> w, double b, std::span<const double> x,
                std::span<const double> xhat, double c3, double c4,
                std::span<double> grad_w, double& grad_b) {
  const double a1 = c3 * (dot(w, xhat) + b);
  const double s = (1.0 - (dot(w, x) + b) > 0.0) ? 1.0 : 0.0;
  const double a2 = c4 * s;
  for (std::size_t i = 0; i < w.size(); ++i)
    grad_w[i] = (w[i] + a1 * xhat[i]) - a2 * x[i];
  grad_b = (b + a1) - a2;
}

void step_update(std::span<double> w, double& b, std::span<const double> grad_w,
                 double grad_b, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("step_update: eta must be > 0");
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= eta * grad_w[i];
  b -= eta * grad_b;
}

double inst_f1(std::span<const double> w, double b, std::span<const double> x,
               std::span<const double> xhat, double c1, double c2) {
  const double prox = dot(w, x) + b;
  const double hinge = 1.0 + (dot(w, xhat) + b);
  return 0.5 * (norm_sq(w) + b * b) + 0.5 * c1 * prox * prox +
         c2 * (hinge > 0.0 ? hinge : 0.0);
}

double inst_f2(std::span<const double> w, double b, std::span<const double> x,
               std::span<const double> xhat, double c3, double c4) {
  const double prox = dot(w, xhat) + b;
  const double hinge = 1.0 - (dot(w, x) + b);
  return 0.5 * (norm_sq(w) + b * b) + 0.5 * c3 * prox * prox +
         c4 * (hinge > 0.0 ? hinge : 0.0);
}

double objective_f1(std::span<const double> w, double b, const Dataset& ds,
                    double c1, double c2) {
  double prox = 0.0;
  for (std::size_t i = 0; i < ds.m1(); ++i) {
    const double p = dot(w, ds.positive(i)) + b;
    prox += p * p;
  }
  double hinge = 0.0;
  for (std::size_t j = 0; j < ds.m2(); ++j) {
    const double h = 1.0 + (dot(w, ds.negative(j)) + b);
    if (h > 0.0) hinge += h;
  }
  return 0.5 * (norm_sq(w) + b * b) + 0.5 * c1 / double(ds.m1()) * prox +
         c2 / double(ds.m2()) * hinge;
}

double objective_f2(std::span<const double> w, double b, const Dataset& ds,
                    double c3, double c4) {
  double prox = 0.0;
  for (std::size_t j = 0; j < ds.m2(); ++j) {
    const double p = dot(w, ds.negative(j)) + b;
    prox += p * p;
  }
  double hinge = 0.0;
  for (std::size_t i = 0; i < ds.m1(); ++i) {
    const double h = 1.0 - (dot(w, ds.positive(i)) + b);
    if (h > 0.0) hinge += h;
  }
  return 0.5 * (norm_sq(w) + b * b) + 0.5 * c3 / double(ds.m2()) * prox +
         c4 / double(ds.m1()) * hinge;
}

namespace {

std::pair<std::span<const double>, double> split_aug(std::span<const double> u,
                                                     const Dataset& ds) {
  if (u.size() != ds.dim() + 1)
    throw std::invalid_argument("augmented vector must have length n+1");
  return {u.first(u.size() - 1), u.back()};
}

}  // namespace

double objective_f1_aug(std::span<const double> u, const Dataset& ds, double c1,
                        double c2) {
  auto [w, b] = split_aug(u, ds);
  return objective_f1(w, b, ds, c1, c2);
}

double objective_f2_aug(std::span<const double> u, const Dataset& ds, double c3,
                        double c4) {
  auto [w, b] = split_aug(u, ds);
  return objective_f2(w, b, ds, c3, c4);
}

Trainer::Trainer(const Dataset& ds, TrainConfig cfg, const KernelSpec* kernel,
                 const SamplingMask* mask)
    : cfg_(cfg),
      kernel_(kernel && kernel->is_gaussian() ? kernel : nullptr),
      mapped_(kernel_ ? map_dataset(*kernel_, ds) : Dataset{}),
      data_(kernel_ ? &mapped_ : &ds),
      // Row order survives the feature map, so masking evaluates on the raw
      // samples while training runs on the mapped ones.
      sampler_(ds, cfg.policy, mask) {
  cfg_.validate();
  ds.validate();
  const std::size_t n = data_->dim();
  h1_.w.assign(n, 0.0);
  h2_.w.assign(n, 0.0);
  if (cfg_.trace != TraceMode::None)
    trace_.reserve(std::min<std::uint64_t>(cfg_.max_iter, 1u << 20));
}

void Trainer::run() {
  if (ran_) throw std::logic_error("Trainer::run: already ran");
  ran_ = true;

  const std::size_t n = data_->dim();
  const double tol = cfg_.tol;
  const std::span<double> w1{h1_.w};
  const std::span<double> w2{h2_.w};

  for (std::uint64_t t = 1; t <= cfg_.max_iter; ++t) {
    iterations_ = t;
    const double eta = cfg_.step(t);
    const auto [pi, nj] = sampler_.next();
    const std::span<const double> x = data_->positive(pi);
    const std::span<const double> xh = data_->negative(nj);

    double delta1 = 0.0, delta2 = 0.0;

    if (!h1_.converged) {
      const double a1 = cfg_.c1 * (dot(w1, x) + h1_.b);
      const double s = (1.0 + (dot(w1, xh) + h1_.b) > 0.0) ? 1.0 : 0.0;
      const double a2 = cfg_.c2 * s;
      double sum_sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double g = (w1[i] + a1 * x[i]) + a2 * xh[i];
        w1[i] -= eta * g;
        sum_sq += g * g;
      }
      const double gb = (h1_.b + a1) + a2;
      h1_.b -= eta * gb;
      const double dw = eta * std::sqrt(sum_sq);
      const double db = eta * std::fabs(gb);
      if (!std::isfinite(dw + db))
        throw std::runtime_error("sgtsvm: non-finite iterate in half 1 at iteration " +
                                 std::to_string(t));
      delta1 = eta * std::sqrt(sum_sq + gb * gb);
      if (dw + db < tol) {
        h1_.converged = true;
        h1_.frozen_at = t;
      }
    }

    if (!h2_.converged) {
      const double a1 = cfg_.c3 * (dot(w2, xh) + h2_.b);
      const double s = (1.0 - (dot(w2, x) + h2_.b) > 0.0) ? 1.0 : 0.0;
      const double a2 = cfg_.c4 * s;
      double sum_sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double g = (w2[i] + a1 * xh[i]) - a2 * x[i];
        w2[i] -= eta * g;
        sum_sq += g * g;
      }
      const double gb = (h2_.b + a1) - a2;
      h2_.b -= eta * gb;
      const double dw = eta * std::sqrt(sum_sq);
      const double db = eta * std::fabs(gb);
      if (!std::isfinite(dw + db))
        throw std::runtime_error("sgtsvm: non-finite iterate in half 2 at iteration " +
                                 std::to_string(t));
      delta2 = eta * std::sqrt(sum_sq + gb * gb);
      if (dw + db < tol) {
        h2_.converged = true;
        h2_.frozen_at = t;
      }
    }

    if (cfg_.trace != TraceMode::None) {
      TraceRecord rec;
      rec.t = t;
      rec.delta1 = delta1;
      rec.delta2 = delta2;
      if (cfg_.trace == TraceMode::Objectives) {
        rec.f1 = objective_f1(w1, h1_.b, *data_, cfg_.c1, cfg_.c2);
        rec.f2 = objective_f2(w2, h2_.b, *data_, cfg_.c3, cfg_.c4);
      }
      trace_.push_back(rec);
    }

    if (h1_.converged && h2_.converged) break;
  }
}

TrainResult Trainer::take_result() {
  TrainResult res;
  res.model.half1 = HalfModel::make(std::move(h1_.w), h1_.b);
  res.model.half2 = HalfModel::make(std::move(h2_.w), h2_.b);
  if (kernel_) res.model.kernel = *kernel_;
  res.model.meta.config_hash = cfg_.hash(kernel_);
  res.model.meta.seed = cfg_.policy.seed;
  res.model.meta.iterations = iterations_;
  res.model.meta.converged1 = h1_.converged;
  res.model.meta.converged2 = h2_.converged;
  res.trace = std::move(trace_);
  res.iterations = iterations_;
  return res;
}

TrainResult train(const Dataset& ds, const TrainConfig& cfg, const KernelSpec* kernel,
                  const SamplingMask* mask) {
  Trainer trainer(ds, cfg, kernel, mask);
  trainer.run();
  return trainer.take_result();
}

}  // namespace twinsgd

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "twinsgd/dataset.hpp"
#include "twinsgd/sampling.hpp"
#include "twinsgd/trace.hpp"

namespace twinsgd {

struct PegasosConfig {
  double c = 0.1;
  double tol = 1e-3;
  std::uint64_t max_iter = 1000000;
  /// Hinge with an offset term (the bias is not regularized). Off by
  /// default: it costs strong convexity and slows convergence.
  bool with_bias = false;
  SamplingPolicy policy;
  StepSchedule step = inv_t_step;
  TraceMode trace = TraceMode::None;

  void validate() const;
  std::uint64_t hash() const;
};

struct PegasosModel {
  std::vector<double> w;
  double b = 0.0;  // exactly 0 when trained without bias
  bool with_bias = false;
  bool converged = false;
  std::uint64_t iterations = 0;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

struct PegasosResult {
  PegasosModel model;
  std::vector<TraceRecord> trace;
};

/// Subgradient of the bias-free instantaneous objective
/// g_t(w) = 1/2 ||w||^2 + c (1 - y w'x)_+ ; same kink rule as sgtsvm.
void pegasos_subgrad(std::span<const double> w, std::span<const double> x, int y,
                     double c, std::span<double> grad_w);

/// Full-batch primal objective over the pooled dataset (with the bias folded
/// into the hinge when the model uses one).
double pegasos_objective(std::span<const double> w, double b, const Dataset& ds,
                         double c);

/// One uniformly random pooled sample per iteration, w_1 = 0, update
/// w_{t+1} = w_t - eta_t grad; stops when ||dw|| (+|db| with bias) < tol.
PegasosResult pegasos_train(const Dataset& ds, const PegasosConfig& cfg,
                            const SamplingMask* mask = nullptr);

/// sign(w'x + b); sign(0) -> +1.
int pegasos_predict(const PegasosModel& model, std::span<const double> x);

void save_pegasos(const PegasosModel& model, const std::string& path);
PegasosModel load_pegasos(const std::string& path);

}  // namespace twinsgd

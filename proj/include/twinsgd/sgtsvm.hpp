#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twinsgd/dataset.hpp"
#include "twinsgd/kernel.hpp"
#include "twinsgd/model.hpp"
#include "twinsgd/sampling.hpp"
#include "twinsgd/trace.hpp"

namespace twinsgd {

struct TrainConfig {
  double c1 = 0.1, c2 = 0.1, c3 = 0.1, c4 = 0.1;
  double tol = 1e-3;
  std::uint64_t max_iter = 1000000;
  SamplingPolicy policy;
  StepSchedule step = inv_t_step;
  TraceMode trace = TraceMode::None;

  void validate() const;
  std::uint64_t hash(const KernelSpec* kernel) const;
};

/// One hyperplane's training state. Once `converged` is set the parameters
/// freeze; the shared iteration counter keeps running for the other half.
struct HalfState {
  std::vector<double> w;
  double b = 0.0;
  bool converged = false;
  std::uint64_t frozen_at = 0;  // iteration at which the half stopped, 0 if running
};

struct TrainResult {
  TwinModel model;
  std::vector<TraceRecord> trace;
  std::uint64_t iterations = 0;
};

// --- stochastic subgradients of the instantaneous objectives ---
// Half 1 treats the positive sample proximally and hinges on the negative;
// half 2 mirrors the roles. sign(s)_+ is 1 for s > 0 and 0 otherwise,
// including at s = 0.

void subgrad_f1(std::span<const double> w, double b, std::span<const double> x,
                std::span<const double> xhat, double c1, double c2,
                std::span<double> grad_w, double& grad_b);

void subgrad_f2(std::span<const double> w, double b, std::span<const double> x,
                std::span<const double> xhat, double c3, double c4,
                std::span<double> grad_w, double& grad_b);

/// w -= eta * grad_w; b -= eta * grad_b.
void step_update(std::span<double> w, double& b, std::span<const double> grad_w,
                 double grad_b, double eta);

// --- objectives ---

/// Instantaneous objective for one sample pair (the function whose
/// subgradient subgrad_f1 returns).
double inst_f1(std::span<const double> w, double b, std::span<const double> x,
               std::span<const double> xhat, double c1, double c2);
double inst_f2(std::span<const double> w, double b, std::span<const double> x,
               std::span<const double> xhat, double c3, double c4);

/// Full-batch objectives over the dataset.
double objective_f1(std::span<const double> w, double b, const Dataset& ds,
                    double c1, double c2);
double objective_f2(std::span<const double> w, double b, const Dataset& ds,
                    double c3, double c4);

/// Augmented-vector forms: u = (w, b), length n+1.
double objective_f1_aug(std::span<const double> u, const Dataset& ds, double c1,
                        double c2);
double objective_f2_aug(std::span<const double> u, const Dataset& ds, double c3,
                        double c4);

/// Paired stochastic subgradient descent on the two twin problems. Starts
/// from zeros, draws one sample pair per iteration, updates both halves with
/// eta_t, and stops each half independently once
/// ||w_{t+1}-w_t|| + |b_{t+1}-b_t| < tol. With a kernel spec the dataset is
/// pushed through the reduced-kernel map first and the model keeps the spec.
class Trainer {
 public:
  Trainer(const Dataset& ds, TrainConfig cfg, const KernelSpec* kernel = nullptr,
          const SamplingMask* mask = nullptr);

  /// Runs until both halves converge or max_iter. Performs no heap
  /// allocation when tracing is off. Throws if an iterate goes non-finite.
  void run();

  TrainResult take_result();

  const Dataset& training_data() const { return *data_; }
  const HalfState& half1() const { return h1_; }
  const HalfState& half2() const { return h2_; }

 private:
  TrainConfig cfg_;
  const KernelSpec* kernel_;
  Dataset mapped_;        // used only for kernel training
  const Dataset* data_;   // points at the caller's dataset or at mapped_
  PairSampler sampler_;
  HalfState h1_, h2_;
  std::vector<TraceRecord> trace_;
  std::uint64_t iterations_ = 0;
  bool ran_ = false;
};

TrainResult train(const Dataset& ds, const TrainConfig& cfg,
                  const KernelSpec* kernel = nullptr,
                  const SamplingMask* mask = nullptr);

}  // namespace twinsgd

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twinsgd/dataset.hpp"
#include "twinsgd/kernel.hpp"
#include "twinsgd/model.hpp"

namespace twinsgd {

/// Deterministic full-batch solver for the two unconstrained twin problems;
/// the ground truth the stochastic trainer is compared against. Subgradient
/// descent with Armijo backtracking — adequate for small instances, not a
/// general QP solver.
struct OracleConfig {
  double obj_tol = 1e-10;       // relative objective-change stopping threshold
  std::uint64_t max_iter = 100000;
  double step_init = 1.0;       // backtracking starts here each iteration
  double shrink = 0.5;
  double armijo = 1e-4;         // sufficient-decrease constant
  std::uint64_t patience = 5;   // consecutive small-change iterations required
  std::size_t size_guard = 50000;
  bool override_guard = false;

  void validate() const;
};

/// Full subgradient of the batch objective for half 1 at the augmented
/// iterate u (length n+1): u + (c1/m1) Z1'Z1 u + (c2/m2) Z2' 1{e + Z2 u > 0}.
void batch_subgrad_f1(std::span<const double> u, const Dataset& ds, double c1,
                      double c2, std::span<double> out);
/// Mirror for half 2 (proximal on the negatives, hinge on the positives).
void batch_subgrad_f2(std::span<const double> u, const Dataset& ds, double c3,
                      double c4, std::span<double> out);

struct HalfSolve {
  std::vector<double> u;        // (w, b)
  double f_star = 0.0;
  bool converged = false;       // objective-change criterion met
  std::uint64_t iterations = 0;
  double subgrad_norm = 0.0;    // at the returned iterate; reported, not asserted
};

struct OracleResult {
  TwinModel model;
  double f1_star = 0.0, f2_star = 0.0;
  HalfSolve half1, half2;
};

/// Solves both halves independently. With a kernel spec the dataset is
/// mapped first, exactly as in training. Guarded against large inputs.
OracleResult solve(const Dataset& ds, double c1, double c2, double c3, double c4,
                   const KernelSpec* kernel = nullptr, const OracleConfig& cfg = {});

}  // namespace twinsgd

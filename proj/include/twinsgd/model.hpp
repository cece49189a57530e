#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twinsgd/dataset.hpp"
#include "twinsgd/kernel.hpp"

namespace twinsgd {

/// One hyperplane w'x + b = 0 with its cached weight norm.
struct HalfModel {
  std::vector<double> w;
  double b = 0.0;
  double w_norm = 0.0;

  static HalfModel make(std::vector<double> w, double b);
};

struct ModelMeta {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::uint64_t iterations = 0;
  bool converged1 = false;
  bool converged2 = false;
};

/// Pair of nonparallel proximal hyperplanes. For kernel models the weight
/// vectors live in the r-dimensional mapped space and `kernel` holds the
/// reference points; otherwise they live in the raw n-dimensional space.
struct TwinModel {
  HalfModel half1, half2;
  std::optional<KernelSpec> kernel;
  ModelMeta meta;

  std::size_t input_dim() const { return kernel ? kernel->n : half1.w.size(); }
};

/// Distance-rule prediction: the class whose normalized plane distance
/// |w_i'phi(x) + b_i| / ||w_i|| is smaller; ties and the all-degenerate case
/// resolve to +1; a single zero-norm half loses (its distance is infinite).
int predict(const TwinModel& model, std::span<const double> x);

struct Metrics {
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
  double accuracy = 0.0;
  std::size_t total() const { return tp + fn + tn + fp; }
};

Metrics evaluate(const TwinModel& model, const Dataset& ds);

/// Versioned structured text with a checksum; load(save(m)) preserves every
/// field exactly (reals are written with 17 significant digits).
void save_model(const TwinModel& model, const std::string& path);
TwinModel load_model(const std::string& path);

}  // namespace twinsgd

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twinsgd/dataset.hpp"

namespace twinsgd {

enum class KernelFamily { Linear, Gaussian };

/// Gaussian kernel K(x,y) = exp(-mu * ||x-y||^2) with a reference point set
/// for the reduced-kernel feature map. Linear specs carry no reference
/// points and no width.
struct KernelSpec {
  KernelFamily family = KernelFamily::Linear;
  double mu = 0.0;
  std::size_t n = 0;            // raw input dimension
  std::size_t r = 0;            // number of reference points
  std::vector<double> ref;      // r x n, row-major

  std::span<const double> ref_point(std::size_t i) const { return {ref.data() + i * n, n}; }
  bool is_gaussian() const { return family == KernelFamily::Gaussian; }
};

KernelSpec make_gaussian(double mu, std::size_t n, std::vector<double> ref_points);

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

/// Reduced-kernel map: out[i] = K(x, ref_i). Components lie in (0, 1].
/// Only valid for Gaussian specs.
void feature_map(const KernelSpec& spec, std::span<const double> x,
                 std::span<double> out);
std::vector<double> feature_map(const KernelSpec& spec, std::span<const double> x);

/// r reference points sampled uniformly without replacement from the pooled
/// dataset, deterministic for a fixed seed.
KernelSpec select_reference(const Dataset& ds, std::size_t r, double mu,
                            std::uint64_t seed);

/// Applies feature_map to every sample; the result feeds the linear trainer.
Dataset map_dataset(const KernelSpec& spec, const Dataset& ds);

}  // namespace twinsgd

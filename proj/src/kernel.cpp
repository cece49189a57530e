#include "twinsgd/kernel.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "twinsgd/rng.hpp"

namespace twinsgd {

KernelSpec make_gaussian(double mu, std::size_t n, std::vector<double> ref_points) {
  if (!(mu > 0.0)) throw std::invalid_argument("Gaussian kernel: mu must be > 0");
  if (n == 0 || ref_points.empty() || ref_points.size() % n != 0)
    throw std::invalid_argument("Gaussian kernel: reference matrix shape mismatch");
  KernelSpec spec;
  spec.family = KernelFamily::Gaussian;
  spec.mu = mu;
  spec.n = n;
  spec.r = ref_points.size() / n;
  spec.ref = std::move(ref_points);
  return spec;
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  if (spec.family == KernelFamily::Linear) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
  }
  double dist_sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    dist_sq += d * d;
  }
  return std::exp(-spec.mu * dist_sq);
}

void feature_map(const KernelSpec& spec, std::span<const double> x,
                 std::span<double> out) {
  if (!spec.is_gaussian())
    throw std::invalid_argument("feature_map: linear kernels map to the identity; do not request the map");
  if (x.size() != spec.n || out.size() != spec.r)
    throw std::invalid_argument("feature_map: dimension mismatch");
  for (std::size_t i = 0; i < spec.r; ++i)
    out[i] = kernel_eval(spec, x, spec.ref_point(i));
}

std::vector<double> feature_map(const KernelSpec& spec, std::span<const double> x) {
  std::vector<double> out(spec.r);
  feature_map(spec, x, out);
  return out;
}

KernelSpec select_reference(const Dataset& ds, std::size_t r, double mu,
                            std::uint64_t seed) {
  const std::size_t m = ds.size();
  if (r < 1 || r > m)
    throw std::invalid_argument("select_reference: need 1 <= r <= " + std::to_string(m) +
                                ", got r = " + std::to_string(r));
  std::vector<std::uint32_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0u);
  Rng rng(seed);
  rng.shuffle(idx);

  std::vector<double> ref;
  ref.reserve(r * ds.dim());
  for (std::size_t k = 0; k < r; ++k) {
    const std::uint32_t i = idx[k];
    auto row = i < ds.m1() ? ds.positive(i) : ds.negative(i - ds.m1());
    ref.insert(ref.end(), row.begin(), row.end());
  }
  return make_gaussian(mu, ds.dim(), std::move(ref));
}

Dataset map_dataset(const KernelSpec& spec, const Dataset& ds) {
  Dataset out(spec.r);
  std::vector<double> row(spec.r);
  for (std::size_t i = 0; i < ds.m1(); ++i) {
    feature_map(spec, ds.positive(i), row);
    out.add_positive(row);
  }
  for (std::size_t i = 0; i < ds.m2(); ++i) {
    feature_map(spec, ds.negative(i), row);
    out.add_negative(row);
  }
  return out;
}

}  // namespace twinsgd

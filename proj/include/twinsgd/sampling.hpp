#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "twinsgd/dataset.hpp"
#include "twinsgd/rng.hpp"

namespace twinsgd {

enum class SamplingKind {
  /// Independent uniform draws from each class.
  IidUniform,
  /// Each class cycles through fresh random permutations of its indices.
  EpochPermutation,
  /// Over each block of d = lcm(m1, m2) iterations, every positive index
  /// appears exactly d/m1 times and every negative index exactly d/m2 times,
  /// in shuffled order.
  LcmBalanced,
};

struct SamplingPolicy {
  SamplingKind kind = SamplingKind::IidUniform;
  std::uint64_t seed = 0;
};

/// Marks samples as invisible to the samplers. `excluded(label, x)` returns
/// true for samples that must never be drawn.
struct SamplingMask {
  std::function<bool(int label, std::span<const double> x)> excluded;
};

/// Mask hiding one class's samples whose single feature lies in [lo, hi];
/// for the 1-D restricted-sampling experiments.
SamplingMask interval_mask(int masked_label, double lo, double hi);

namespace detail {

// One class's draw schedule. Epoch/block index lists are refilled in place;
// next() never allocates.
class ClassSchedule {
 public:
  void init(SamplingKind kind, std::vector<std::uint32_t> visible, std::uint64_t block_len);
  std::uint32_t next(Rng& rng);

 private:
  SamplingKind kind_ = SamplingKind::IidUniform;
  std::vector<std::uint32_t> visible_;
  std::vector<std::uint32_t> block_;  // current epoch or lcm block
  std::size_t cursor_ = 0;
};

}  // namespace detail

/// Draws one (positive, negative) index pair per call, honoring the policy
/// invariants and the optional mask. Deterministic for a fixed seed: call t
/// of next() always yields the same pair.
class PairSampler {
 public:
  PairSampler(const Dataset& ds, SamplingPolicy policy,
              const SamplingMask* mask = nullptr);

  /// (index into positives, index into negatives)
  std::pair<std::uint32_t, std::uint32_t> next();

  std::size_t visible_positive_count() const { return m1v_; }
  std::size_t visible_negative_count() const { return m2v_; }

 private:
  Rng rng_;
  detail::ClassSchedule pos_, neg_;
  std::size_t m1v_ = 0, m2v_ = 0;
};

/// Uniform draws over the pooled dataset (both classes together); the
/// PEGASOS sampler. EpochPermutation cycles permutations of the pool;
/// LcmBalanced degenerates to the same schedule (the pool is one list).
class PooledSampler {
 public:
  PooledSampler(const Dataset& ds, SamplingPolicy policy,
                const SamplingMask* mask = nullptr);

  /// (label +1/-1, index within that class)
  std::pair<int, std::uint32_t> next();

  std::size_t visible_count() const { return pool_.size(); }

 private:
  Rng rng_;
  SamplingKind kind_;
  std::vector<std::int64_t> pool_;  // +1+index for positives, -1-index for negatives
  std::size_t cursor_ = 0;
  bool first_block_ = true;
};

}  // namespace twinsgd

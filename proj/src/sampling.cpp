#include "twinsgd/sampling.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace twinsgd {

namespace {

constexpr std::uint64_t kMaxBlockLen = (1ULL << 26);

std::vector<std::uint32_t> visible_indices(const Dataset& ds, int label,
                                           const SamplingMask* mask) {
  const std::size_t m = label > 0 ? ds.m1() : ds.m2();
  std::vector<std::uint32_t> idx;
  idx.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (mask && mask->excluded && mask->excluded(label, ds.sample(label, i))) continue;
    idx.push_back(static_cast<std::uint32_t>(i));
  }
  if (idx.empty())
    throw std::invalid_argument(std::string("sampling mask excludes the entire ") +
                                (label > 0 ? "positive" : "negative") + " class");
  return idx;
}

}  // namespace

SamplingMask interval_mask(int masked_label, double lo, double hi) {
  SamplingMask mask;
  mask.excluded = [masked_label, lo, hi](int label, std::span<const double> x) {
    return label == masked_label && !x.empty() && x[0] >= lo && x[0] <= hi;
  };
  return mask;
}

namespace detail {

void ClassSchedule::init(SamplingKind kind, std::vector<std::uint32_t> visible,
                         std::uint64_t block_len) {
  kind_ = kind;
  visible_ = std::move(visible);
  block_.clear();
  cursor_ = 0;
  if (kind_ == SamplingKind::IidUniform) return;

  if (kind_ == SamplingKind::EpochPermutation) {
    block_ = visible_;
  } else {
    // LcmBalanced: the index multiset with multiplicity block_len / m.
    const std::uint64_t copies = block_len / visible_.size();
    block_.reserve(block_len);
    for (std::uint64_t c = 0; c < copies; ++c)
      block_.insert(block_.end(), visible_.begin(), visible_.end());
  }
  cursor_ = block_.size();  // force a shuffle before the first draw
}

std::uint32_t ClassSchedule::next(Rng& rng) {
  if (kind_ == SamplingKind::IidUniform)
    return visible_[rng.bounded(visible_.size())];
  if (cursor_ == block_.size()) {
    rng.shuffle(block_);
    cursor_ = 0;
  }
  return block_[cursor_++];
}

}  // namespace detail

PairSampler::PairSampler(const Dataset& ds, SamplingPolicy policy,
                         const SamplingMask* mask)
    : rng_(policy.seed) {
  auto pos = visible_indices(ds, +1, mask);
  auto neg = visible_indices(ds, -1, mask);
  m1v_ = pos.size();
  m2v_ = neg.size();

  std::uint64_t block_len = 0;
  if (policy.kind == SamplingKind::LcmBalanced) {
    block_len = std::lcm<std::uint64_t>(m1v_, m2v_);
    if (block_len > kMaxBlockLen)
      throw std::invalid_argument(
          "LcmBalanced: lcm(" + std::to_string(m1v_) + ", " + std::to_string(m2v_) +
          ") = " + std::to_string(block_len) +
          " exceeds the block limit; use epoch or iid sampling");
  }
  pos_.init(policy.kind, std::move(pos), block_len);
  neg_.init(policy.kind, std::move(neg), block_len);
}

std::pair<std::uint32_t, std::uint32_t> PairSampler::next() {
  const std::uint32_t i = pos_.next(rng_);
  const std::uint32_t j = neg_.next(rng_);
  return {i, j};
}

PooledSampler::PooledSampler(const Dataset& ds, SamplingPolicy policy,
                             const SamplingMask* mask)
    : rng_(policy.seed), kind_(policy.kind) {
  auto pos = visible_indices(ds, +1, mask);
  auto neg = visible_indices(ds, -1, mask);
  pool_.reserve(pos.size() + neg.size());
  for (auto i : pos) pool_.push_back(+1 + static_cast<std::int64_t>(i) * 2);
  for (auto j : neg) pool_.push_back(-1 - static_cast<std::int64_t>(j) * 2);
  cursor_ = pool_.size();
}

std::pair<int, std::uint32_t> PooledSampler::next() {
  std::int64_t code = 0;
  if (kind_ == SamplingKind::IidUniform) {
    code = pool_[rng_.bounded(pool_.size())];
  } else {
    if (cursor_ == pool_.size()) {
      rng_.shuffle(pool_);
      cursor_ = 0;
    }
    code = pool_[cursor_++];
  }
  if (code > 0) return {+1, static_cast<std::uint32_t>((code - 1) / 2)};
  return {-1, static_cast<std::uint32_t>((-code - 1) / 2)};
}

}  // namespace twinsgd

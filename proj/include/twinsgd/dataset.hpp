#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace twinsgd {

/// One labeled sample: a feature vector with a label in {+1, -1}.
struct Sample {
  std::vector<double> features;
  int label = +1;
};

/// Immutable labeled sample matrix, partitioned into the positive class
/// (label +1, matrix X1, m1 rows) and the negative class (label -1,
/// matrix X2, m2 rows). Rows are stored contiguously, n values each, and
/// iteration order is the insertion order.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t n) : n_(n) {}

  std::size_t dim() const { return n_; }
  std::size_t m1() const { return m1_; }
  std::size_t m2() const { return m2_; }
  std::size_t size() const { return m1_ + m2_; }

  std::span<const double> positive(std::size_t i) const {
    return {pos_.data() + i * n_, n_};
  }
  std::span<const double> negative(std::size_t i) const {
    return {neg_.data() + i * n_, n_};
  }
  std::span<const double> sample(int label, std::size_t i) const {
    return label > 0 ? positive(i) : negative(i);
  }

  void add_positive(std::span<const double> x);
  void add_negative(std::span<const double> x);
  void add(const Sample& s);

  /// Throws if a class is empty or dimensions are inconsistent.
  void validate() const;

  bool operator==(const Dataset& other) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t m1_ = 0;
  std::size_t m2_ = 0;
  std::vector<double> pos_;  // m1 x n, row-major
  std::vector<double> neg_;  // m2 x n, row-major
};

/// LIBSVM sparse text format: `<label> <index>:<value> ...`, 1-based strictly
/// increasing indices. The two raw label values map to {+1,-1}, greater
/// value -> +1; missing indices are zero. Dimension is the largest index seen.
Dataset load_libsvm(const std::string& path);

/// Rectangular numeric CSV. label_column defaults to the last column; the
/// remaining columns, in order, form the feature vector. Same label-mapping
/// rule as load_libsvm.
Dataset load_csv(const std::string& path,
                 std::optional<std::size_t> label_column = std::nullopt);

/// Writers used by `gen` and by the round-trip tests. Reals are emitted with
/// 17 significant digits so emit-then-load is the identity.
void save_csv(const Dataset& ds, const std::string& path);
void save_libsvm(const Dataset& ds, const std::string& path);

/// m_per_class positives from N(+mean_sep, 1) and negatives from
/// N(-mean_sep, 1); n = 1. Deterministic for a fixed seed.
Dataset gen_gaussian_1d(std::size_t m_per_class, double mean_sep,
                        std::uint64_t seed);

/// "Cross planes": positives along x2 = x1, negatives along x2 = 1 - x1,
/// abscissa uniform on [0,1], Gaussian ordinate noise of the given std.
Dataset gen_cross_planes(std::size_t m_per_class, double noise,
                         std::uint64_t seed);

/// Class-stratified random split; the parts partition the input.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed);

/// Index view of one cross-validation fold.
struct Fold {
  std::vector<std::uint32_t> train_pos, train_neg;
  std::vector<std::uint32_t> val_pos, val_neg;
};

/// Class-stratified k-fold partition; every sample lands in exactly one
/// validation fold and fold sizes differ by at most one per class.
std::vector<Fold> kfold_indices(const Dataset& ds, std::size_t k,
                                std::uint64_t seed);

/// Materializes the rows selected by the index lists.
Dataset subset(const Dataset& ds, std::span<const std::uint32_t> pos_idx,
               std::span<const std::uint32_t> neg_idx);

/// Optional per-feature min-max scaling to [0,1] (off by default everywhere;
/// constant features are left unchanged).
Dataset scale_minmax(const Dataset& ds);

}  // namespace twinsgd

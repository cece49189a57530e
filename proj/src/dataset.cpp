#include "twinsgd/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "twinsgd/rng.hpp"

namespace twinsgd {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string loc(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line) + ": ";
}

bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// 17 significant digits; round-trips doubles exactly.
void append_real(std::string& out, double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  out.append(buf, res.ptr);
}

struct RawRow {
  std::vector<double> features;
  double raw_label = 0.0;
};

// Maps the two distinct raw label values onto {+1,-1}: greater value -> +1.
Dataset assemble(const std::string& path, std::size_t n, std::vector<RawRow>& rows) {
  if (rows.empty()) fail(path + ": no samples found");
  double lab_a = rows.front().raw_label;
  bool have_b = false;
  double lab_b = 0.0;
  for (const RawRow& r : rows) {
    if (r.raw_label == lab_a) continue;
    if (!have_b) {
      lab_b = r.raw_label;
      have_b = true;
    } else if (r.raw_label != lab_b) {
      fail(path + ": more than two distinct labels (" + std::to_string(lab_a) +
           ", " + std::to_string(lab_b) + ", " + std::to_string(r.raw_label) + ")");
    }
  }
  if (!have_b) fail(path + ": only one distinct label value; need exactly two");
  const double positive_raw = std::max(lab_a, lab_b);

  Dataset ds(n);
  for (RawRow& r : rows) {
    r.features.resize(n, 0.0);
    if (r.raw_label == positive_raw)
      ds.add_positive(r.features);
    else
      ds.add_negative(r.features);
  }
  ds.validate();
  return ds;
}

}  // namespace

void Dataset::add_positive(std::span<const double> x) {
  if (m1_ + m2_ == 0 && n_ == 0) n_ = x.size();
  if (x.size() != n_) throw std::invalid_argument("Dataset: feature length mismatch");
  pos_.insert(pos_.end(), x.begin(), x.end());
  ++m1_;
}

void Dataset::add_negative(std::span<const double> x) {
  if (m1_ + m2_ == 0 && n_ == 0) n_ = x.size();
  if (x.size() != n_) throw std::invalid_argument("Dataset: feature length mismatch");
  neg_.insert(neg_.end(), x.begin(), x.end());
  ++m2_;
}

void Dataset::add(const Sample& s) {
  if (s.label != +1 && s.label != -1)
    throw std::invalid_argument("Dataset: label must be +1 or -1");
  if (s.label > 0)
    add_positive(s.features);
  else
    add_negative(s.features);
}

void Dataset::validate() const {
  if (n_ == 0) throw std::invalid_argument("Dataset: dimension is zero");
  if (m1_ == 0 || m2_ == 0)
    throw std::invalid_argument("Dataset: both classes must be non-empty");
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path + ": cannot open file");

  std::vector<RawRow> rows;
  std::size_t n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest = trim(line);
    if (rest.empty()) continue;

    RawRow row;
    const std::size_t sp = rest.find_first_of(" \t");
    std::string_view label_tok = rest.substr(0, sp);
    if (!parse_double(label_tok, row.raw_label))
      fail(loc(path, lineno) + "malformed label '" + std::string(label_tok) + "'");
    rest = sp == std::string_view::npos ? std::string_view{} : trim(rest.substr(sp));

    std::size_t prev_index = 0;
    std::vector<std::pair<std::size_t, double>> entries;
    while (!rest.empty()) {
      const std::size_t end = rest.find_first_of(" \t");
      std::string_view tok = rest.substr(0, end);
      rest = end == std::string_view::npos ? std::string_view{} : trim(rest.substr(end));

      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos)
        fail(loc(path, lineno) + "expected <index>:<value>, got '" + std::string(tok) + "'");
      unsigned long long idx = 0;
      {
        std::string_view idx_tok = tok.substr(0, colon);
        auto res = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
        if (res.ec != std::errc{} || res.ptr != idx_tok.data() + idx_tok.size())
          fail(loc(path, lineno) + "malformed feature index '" + std::string(idx_tok) + "'");
      }
      double value = 0.0;
      if (!parse_double(tok.substr(colon + 1), value))
        fail(loc(path, lineno) + "malformed feature value '" + std::string(tok) + "'");
      if (idx == 0)
        fail(loc(path, lineno) + "feature indices are 1-based; got 0");
      if (idx <= prev_index)
        fail(loc(path, lineno) + "feature indices must be strictly increasing");
      prev_index = idx;
      entries.emplace_back(idx, value);
      n = std::max<std::size_t>(n, idx);
    }
    row.features.assign(prev_index, 0.0);
    for (auto& [idx, value] : entries) row.features[idx - 1] = value;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path + ": empty file");
  return assemble(path, n, rows);
}

Dataset load_csv(const std::string& path, std::optional<std::size_t> label_column) {
  std::ifstream in(path);
  if (!in) fail(path + ": cannot open file");

  std::vector<RawRow> rows;
  std::size_t ncols = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;

    std::vector<double> cells;
    std::string_view rest = line;
    for (;;) {
      const std::size_t comma = rest.find(',');
      std::string_view tok = trim(rest.substr(0, comma));
      double v = 0.0;
      if (!parse_double(tok, v))
        fail(loc(path, lineno) + "non-numeric cell '" + std::string(tok) + "'");
      cells.push_back(v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (ncols == 0) {
      ncols = cells.size();
      if (ncols < 2) fail(loc(path, lineno) + "need at least one feature and a label");
    } else if (cells.size() != ncols) {
      fail(loc(path, lineno) + "ragged row: expected " + std::to_string(ncols) +
           " columns, got " + std::to_string(cells.size()));
    }

    const std::size_t lcol = label_column.value_or(ncols - 1);
    if (lcol >= ncols)
      fail(path + ": label column " + std::to_string(lcol) + " out of range");
    RawRow row;
    row.raw_label = cells[lcol];
    for (std::size_t c = 0; c < ncols; ++c)
      if (c != lcol) row.features.push_back(cells[c]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path + ": empty file");
  return assemble(path, ncols - 1, rows);
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path + ": cannot open for writing");
  std::string buf;
  auto emit = [&](std::span<const double> x, const char* label) {
    buf.clear();
    for (double v : x) {
      append_real(buf, v);
      buf.push_back(',');
    }
    buf += label;
    buf.push_back('\n');
    out << buf;
  };
  for (std::size_t i = 0; i < ds.m1(); ++i) emit(ds.positive(i), "1");
  for (std::size_t i = 0; i < ds.m2(); ++i) emit(ds.negative(i), "-1");
  if (!out) fail(path + ": write failed");
}

void save_libsvm(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path + ": cannot open for writing");
  const std::size_t n = ds.dim();
  std::string buf;
  auto emit = [&](std::span<const double> x, const char* label) {
    buf = label;
    for (std::size_t j = 0; j < n; ++j) {
      // Sparse output, but index n always appears so the dimension survives
      // a round trip.
      if (x[j] == 0.0 && j + 1 != n) continue;
      buf.push_back(' ');
      buf += std::to_string(j + 1);
      buf.push_back(':');
      append_real(buf, x[j]);
    }
    buf.push_back('\n');
    out << buf;
  };
  for (std::size_t i = 0; i < ds.m1(); ++i) emit(ds.positive(i), "+1");
  for (std::size_t i = 0; i < ds.m2(); ++i) emit(ds.negative(i), "-1");
  if (!out) fail(path + ": write failed");
}

Dataset gen_gaussian_1d(std::size_t m_per_class, double mean_sep, std::uint64_t seed) {
  if (m_per_class < 1) throw std::invalid_argument("gen_gaussian_1d: m_per_class must be >= 1");
  Rng rng(seed);
  Dataset ds(1);
  double x = 0.0;
  for (std::size_t i = 0; i < m_per_class; ++i) {
    x = mean_sep + rng.gaussian();
    ds.add_positive({&x, 1});
  }
  for (std::size_t i = 0; i < m_per_class; ++i) {
    x = -mean_sep + rng.gaussian();
    ds.add_negative({&x, 1});
  }
  return ds;
}

Dataset gen_cross_planes(std::size_t m_per_class, double noise, std::uint64_t seed) {
  if (m_per_class < 2) throw std::invalid_argument("gen_cross_planes: m_per_class must be >= 2");
  Rng rng(seed);
  Dataset ds(2);
  double row[2];
  for (std::size_t i = 0; i < m_per_class; ++i) {
    row[0] = rng.uniform01();
    row[1] = row[0] + noise * rng.gaussian();
    ds.add_positive({row, 2});
  }
  for (std::size_t i = 0; i < m_per_class; ++i) {
    row[0] = rng.uniform01();
    row[1] = 1.0 - row[0] + noise * rng.gaussian();
    ds.add_negative({row, 2});
  }
  return ds;
}

namespace {

std::vector<std::uint32_t> shuffled_indices(std::size_t m, Rng& rng) {
  std::vector<std::uint32_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0u);
  rng.shuffle(idx);
  return idx;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("split: train_fraction must be in (0,1)");
  Dataset train(ds.dim()), test(ds.dim());

  auto split_class = [&](std::size_t m, std::uint64_t sub,
                         std::vector<std::uint32_t>& tr, std::vector<std::uint32_t>& te) {
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * double(m)));
    if (n_train == 0 || n_train == m)
      throw std::invalid_argument("split: fraction leaves an empty class");
    Rng rng(derive_seed(seed, sub));
    auto idx = shuffled_indices(m, rng);
    tr.assign(idx.begin(), idx.begin() + n_train);
    te.assign(idx.begin() + n_train, idx.end());
    std::sort(tr.begin(), tr.end());
    std::sort(te.begin(), te.end());
  };

  std::vector<std::uint32_t> tr, te;
  split_class(ds.m1(), 0, tr, te);
  for (auto i : tr) train.add_positive(ds.positive(i));
  for (auto i : te) test.add_positive(ds.positive(i));
  split_class(ds.m2(), 1, tr, te);
  for (auto i : tr) train.add_negative(ds.negative(i));
  for (auto i : te) test.add_negative(ds.negative(i));
  return {std::move(train), std::move(test)};
}

std::vector<Fold> kfold_indices(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold: k must be >= 2");
  if (ds.m1() < k || ds.m2() < k)
    throw std::invalid_argument("kfold: a class has fewer than k samples (m1=" +
                                std::to_string(ds.m1()) + ", m2=" + std::to_string(ds.m2()) +
                                ", k=" + std::to_string(k) + ")");

  auto deal = [&](std::size_t m, std::uint64_t sub) {
    Rng rng(derive_seed(seed, sub));
    auto idx = shuffled_indices(m, rng);
    std::vector<std::vector<std::uint32_t>> chunks(k);
    const std::size_t base = m / k, rem = m % k;
    std::size_t at = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const std::size_t len = base + (f < rem ? 1 : 0);
      chunks[f].assign(idx.begin() + at, idx.begin() + at + len);
      std::sort(chunks[f].begin(), chunks[f].end());
      at += len;
    }
    return chunks;
  };

  auto pos_chunks = deal(ds.m1(), 0);
  auto neg_chunks = deal(ds.m2(), 1);
  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    folds[f].val_pos = pos_chunks[f];
    folds[f].val_neg = neg_chunks[f];
    for (std::size_t g = 0; g < k; ++g) {
      if (g == f) continue;
      folds[f].train_pos.insert(folds[f].train_pos.end(), pos_chunks[g].begin(), pos_chunks[g].end());
      folds[f].train_neg.insert(folds[f].train_neg.end(), neg_chunks[g].begin(), neg_chunks[g].end());
    }
    std::sort(folds[f].train_pos.begin(), folds[f].train_pos.end());
    std::sort(folds[f].train_neg.begin(), folds[f].train_neg.end());
  }
  return folds;
}

Dataset subset(const Dataset& ds, std::span<const std::uint32_t> pos_idx,
               std::span<const std::uint32_t> neg_idx) {
  Dataset out(ds.dim());
  for (auto i : pos_idx) out.add_positive(ds.positive(i));
  for (auto i : neg_idx) out.add_negative(ds.negative(i));
  out.validate();
  return out;
}

Dataset scale_minmax(const Dataset& ds) {
  const std::size_t n = ds.dim();
  std::vector<double> lo(n, std::numeric_limits<double>::infinity());
  std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
  auto scan = [&](std::span<const double> x) {
    for (std::size_t j = 0; j < n; ++j) {
      lo[j] = std::min(lo[j], x[j]);
      hi[j] = std::max(hi[j], x[j]);
    }
  };
  for (std::size_t i = 0; i < ds.m1(); ++i) scan(ds.positive(i));
  for (std::size_t i = 0; i < ds.m2(); ++i) scan(ds.negative(i));

  Dataset out(n);
  std::vector<double> row(n);
  auto emit = [&](std::span<const double> x, bool pos) {
    for (std::size_t j = 0; j < n; ++j)
      row[j] = hi[j] > lo[j] ? (x[j] - lo[j]) / (hi[j] - lo[j]) : x[j];
    if (pos)
      out.add_positive(row);
    else
      out.add_negative(row);
  };
  for (std::size_t i = 0; i < ds.m1(); ++i) emit(ds.positive(i), true);
  for (std::size_t i = 0; i < ds.m2(); ++i) emit(ds.negative(i), false);
  return out;
}

}  // namespace twinsgd

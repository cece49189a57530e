#include "twinsgd/experiments.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "twinsgd/rng.hpp"

namespace twinsgd {

namespace {

void append_real(std::string& out, double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  out.append(buf, res.ptr);
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

std::size_t worker_count(std::size_t jobs) {
  std::size_t cap = std::thread::hardware_concurrency();
  if (cap == 0) cap = 1;
  if (const char* env = std::getenv("TWINSGD_THREADS")) {
    unsigned long long v = 0;
    auto res = std::from_chars(env, env + std::string_view(env).size(), v);
    if (res.ec == std::errc{} && v >= 1) cap = static_cast<std::size_t>(v);
  }
  return std::min(jobs, cap);
}

void parallel_trials(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = worker_count(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double find_boundary_1d(const std::function<int(double)>& classify, double lo,
                        double hi, double tol) {
  int side_lo = classify(lo);
  if (side_lo == classify(hi)) return std::numeric_limits<double>::quiet_NaN();
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (classify(mid) == side_lo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<StabilityRow> run_stability(const StabilityConfig& cfg) {
  if (cfg.runs == 0) throw std::invalid_argument("stability: runs must be >= 1");
  SamplingMask mask;
  const SamplingMask* mask_ptr = nullptr;
  if (cfg.mask_interval) {
    mask = interval_mask(cfg.mask_label, cfg.mask_interval->first,
                         cfg.mask_interval->second);
    mask_ptr = &mask;
  }
  // tol far below any reachable per-step delta: both methods consume the
  // whole iteration budget, which keeps the comparison fair.
  const double tol_off = 1e-300;

  std::vector<StabilityRow> rows(cfg.runs);
  parallel_trials(cfg.runs, [&](std::size_t r) {
    const std::uint64_t s = derive_seed(cfg.seed, r);
    const Dataset train_ds = gen_gaussian_1d(cfg.m_per_class, cfg.mean_sep, derive_seed(s, 0));
    const Dataset test_ds = gen_gaussian_1d(cfg.m_per_class, cfg.mean_sep, derive_seed(s, 1));
    StabilityRow row;
    row.run = r;

    if (cfg.algo != Algo::Pegasos) {
      TrainConfig tc;
      tc.c1 = tc.c2 = tc.c3 = tc.c4 = cfg.c;
      tc.tol = tol_off;
      tc.max_iter = cfg.iterations;
      tc.policy = {SamplingKind::IidUniform, derive_seed(s, 2)};
      const TwinModel model = train(train_ds, tc, nullptr, mask_ptr).model;
      row.sg_boundary = find_boundary_1d(
          [&](double x) { return predict(model, {&x, 1}); });
      row.sg_accuracy = evaluate(model, test_ds).accuracy;
    }
    if (cfg.algo != Algo::Sgtsvm) {
      PegasosConfig pc;
      pc.c = cfg.c;
      pc.tol = tol_off;
      pc.max_iter = cfg.iterations;
      pc.with_bias = cfg.pegasos_bias;
      pc.policy = {SamplingKind::IidUniform, derive_seed(s, 3)};
      const PegasosModel model = pegasos_train(train_ds, pc, mask_ptr).model;
      row.peg_boundary = find_boundary_1d(
          [&](double x) { return pegasos_predict(model, {&x, 1}); });
      std::size_t correct = 0;
      for (std::size_t i = 0; i < test_ds.m1(); ++i)
        correct += pegasos_predict(model, test_ds.positive(i)) > 0;
      for (std::size_t j = 0; j < test_ds.m2(); ++j)
        correct += pegasos_predict(model, test_ds.negative(j)) < 0;
      row.peg_accuracy = double(correct) / double(test_ds.size());
    }
    rows[r] = row;
  });
  return rows;
}

void write_stability_csv(std::ostream& out, std::span<const StabilityRow> rows) {
  out << "run,sg_boundary,sg_accuracy,peg_boundary,peg_accuracy\n";
  std::string line;
  for (const StabilityRow& r : rows) {
    line = std::to_string(r.run);
    for (double v : {r.sg_boundary, r.sg_accuracy, r.peg_boundary, r.peg_accuracy}) {
      line.push_back(',');
      if (std::isfinite(v)) append_real(line, v);
    }
    line.push_back('\n');
    out << line;
  }
}

SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    ++s.count;
  }
  if (s.count == 0) return SummaryStats{};
  s.mean = sum / double(s.count);
  double ss = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    ss += (v - s.mean) * (v - s.mean);
  }
  s.stddev = s.count > 1 ? std::sqrt(ss / double(s.count - 1)) : 0.0;
  return s;
}

std::vector<BenchRow> run_bench(const Dataset& ds, const BenchConfig& cfg) {
  if (cfg.tols.empty()) throw std::invalid_argument("bench: need at least one tol");
  const bool both = cfg.algo == Algo::Both;
  const std::size_t algos = both ? 2 : 1;
  std::vector<BenchRow> rows(cfg.tols.size() * cfg.runs * algos);

  parallel_trials(cfg.tols.size() * cfg.runs, [&](std::size_t job) {
    const std::size_t ti = job / cfg.runs;
    const std::size_t r = job % cfg.runs;
    const double tol = cfg.tols[ti];
    const std::uint64_t s = derive_seed(cfg.seed, job);
    std::size_t slot = (ti * cfg.runs + r) * algos;

    if (cfg.algo != Algo::Pegasos) {
      TrainConfig tc;
      tc.c1 = tc.c2 = tc.c3 = tc.c4 = cfg.c;
      tc.tol = tol;
      tc.max_iter = cfg.max_iter;
      tc.policy = {SamplingKind::IidUniform, derive_seed(s, 0)};
      const double t0 = now_seconds();
      const TrainResult res = train(ds, tc);
      rows[slot++] = {"sgtsvm", tol, r, res.iterations, now_seconds() - t0,
                      res.model.meta.converged1 && res.model.meta.converged2};
    }
    if (cfg.algo != Algo::Sgtsvm) {
      PegasosConfig pc;
      pc.c = cfg.c;
      pc.tol = tol;
      pc.max_iter = cfg.max_iter;
      pc.with_bias = cfg.pegasos_bias;
      pc.policy = {SamplingKind::IidUniform, derive_seed(s, 1)};
      const double t0 = now_seconds();
      const PegasosResult res = pegasos_train(ds, pc);
      rows[slot++] = {"pegasos", tol, r, res.model.iterations, now_seconds() - t0,
                      res.model.converged};
    }
  });
  return rows;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "algo,tol,run,iterations,seconds,converged\n";
  std::string line;
  for (const BenchRow& r : rows) {
    line = r.algo;
    line.push_back(',');
    append_real(line, r.tol);
    line += "," + std::to_string(r.run) + "," + std::to_string(r.iterations) + ",";
    append_real(line, r.seconds);
    line += r.converged ? ",1" : ",0";
    line.push_back('\n');
    out << line;
  }
}

CvResult run_cv(const Dataset& ds, const CvConfig& cfg) {
  const auto folds = kfold_indices(ds, cfg.k, cfg.seed);
  CvResult res;
  res.fold_accuracy.assign(folds.size(), 0.0);

  parallel_trials(folds.size(), [&](std::size_t f) {
    const Fold& fold = folds[f];
    const Dataset train_ds = subset(ds, fold.train_pos, fold.train_neg);
    const Dataset val_ds = subset(ds, fold.val_pos, fold.val_neg);

    TrainConfig tc = cfg.train;
    tc.policy.seed = derive_seed(cfg.seed, 1000 + f);

    KernelSpec spec;
    const KernelSpec* spec_ptr = nullptr;
    if (cfg.use_kernel) {
      const std::size_t r = std::min(cfg.reduced_size, train_ds.size());
      spec = select_reference(train_ds, r, cfg.mu, derive_seed(cfg.seed, 2000 + f));
      spec_ptr = &spec;
    }
    const TwinModel model = train(train_ds, tc, spec_ptr).model;
    res.fold_accuracy[f] = evaluate(model, val_ds).accuracy;
  });

  const SummaryStats s = summarize(res.fold_accuracy);
  res.mean = s.mean;
  res.stddev = s.stddev;
  return res;
}

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int i = -8; i <= 1; ++i) grid.push_back(std::ldexp(1.0, i));
  return grid;
}

std::vector<double> default_mu_grid() {
  std::vector<double> grid;
  for (int i = -10; i <= -1; ++i) grid.push_back(std::ldexp(1.0, i));
  return grid;
}

GridResult grid_search(const Dataset& ds, const CvConfig& cfg,
                       std::vector<double> c13_grid, std::vector<double> c24_grid,
                       std::vector<double> mu_grid) {
  if (!cfg.use_kernel) mu_grid = {cfg.mu};
  GridResult out;
  out.best.mean = -1.0;
  for (double mu : mu_grid) {
    for (double c13 : c13_grid) {
      for (double c24 : c24_grid) {
        CvConfig point = cfg;
        point.train.c1 = point.train.c3 = c13;  // tied pairs
        point.train.c2 = point.train.c4 = c24;
        point.mu = mu;
        const CvResult cv = run_cv(ds, point);
        GridEntry entry{c13, c24, cfg.use_kernel ? mu : 0.0, cv.mean, cv.stddev};
        out.table.push_back(entry);
        if (entry.mean > out.best.mean) out.best = entry;
      }
    }
  }
  return out;
}

CompareResult run_compare(const Dataset& ds, TrainConfig cfg, const KernelSpec* kernel,
                          const OracleConfig& ocfg) {
  cfg.trace = TraceMode::Objectives;
  TrainResult tr = train(ds, cfg, kernel);
  const OracleResult oracle =
      solve(ds, cfg.c1, cfg.c2, cfg.c3, cfg.c4, kernel, ocfg);
  CompareResult res;
  res.trace = std::move(tr.trace);
  res.iterations = tr.iterations;
  res.f1_star = oracle.f1_star;
  res.f2_star = oracle.f2_star;
  return res;
}

void write_compare_csv(std::ostream& out, const CompareResult& res) {
  out << "iteration,f1,f2,f1_star,f2_star\n";
  std::string line;
  for (const TraceRecord& r : res.trace) {
    line = std::to_string(r.t);
    line.push_back(',');
    append_real(line, r.f1);
    line.push_back(',');
    append_real(line, r.f2);
    line.push_back(',');
    append_real(line, res.f1_star);
    line.push_back(',');
    append_real(line, res.f2_star);
    line.push_back('\n');
    out << line;
  }
}

}  // namespace twinsgd

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <doctest.h>

#include "helpers.hpp"
#include "twinsgd/experiments.hpp"

using namespace twinsgd;

TEST_SUITE("experiments") {

TEST_CASE("boundary bisection finds the flip point") {
  const double boundary = find_boundary_1d(
      [](double x) { return x < 1.25 ? -1 : +1; }, -6.0, 6.0, 1e-6);
  CHECK(boundary == doctest::Approx(1.25).epsilon(1e-5));

  const double none = find_boundary_1d([](double) { return +1; });
  CHECK(std::isnan(none));

  // flipped orientation works too
  const double rev = find_boundary_1d(
      [](double x) { return x < -0.5 ? +1 : -1; }, -6.0, 6.0, 1e-6);
  CHECK(rev == doctest::Approx(-0.5).epsilon(1e-5));
}

TEST_CASE("stability driver: masked runs and summaries") {
  StabilityConfig cfg;
  cfg.runs = 5;
  cfg.m_per_class = 300;
  cfg.iterations = 150;
  cfg.seed = 31;
  cfg.mask_interval = {{-1.0, 0.0}};
  cfg.mask_label = -1;
  const auto rows = run_stability(cfg);
  REQUIRE(rows.size() == 5);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.sg_boundary));
    CHECK(std::isfinite(r.peg_boundary));
    CHECK(r.sg_accuracy > 0.5);
    CHECK(r.peg_accuracy > 0.5);
  }
  std::ostringstream csv;
  write_stability_csv(csv, rows);
  std::size_t lines = 0;
  for (char ch : csv.str()) lines += ch == '\n';
  CHECK(lines == 6);  // header + 5 rows

  // masking out an entire class must fail loudly
  StabilityConfig bad = cfg;
  bad.mask_interval = {{-100.0, 100.0}};
  CHECK_THROWS_AS(run_stability(bad), std::invalid_argument);
}

TEST_CASE("stability driver is deterministic across thread counts") {
  StabilityConfig cfg;
  cfg.runs = 6;
  cfg.m_per_class = 200;
  cfg.iterations = 100;
  cfg.seed = 77;

  setenv("TWINSGD_THREADS", "1", 1);
  const auto serial = run_stability(cfg);
  setenv("TWINSGD_THREADS", "4", 1);
  const auto parallel = run_stability(cfg);
  unsetenv("TWINSGD_THREADS");
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].sg_boundary == parallel[i].sg_boundary);
    CHECK(serial[i].sg_accuracy == parallel[i].sg_accuracy);
    CHECK(serial[i].peg_boundary == parallel[i].peg_boundary);
  }
}

TEST_CASE("cv runs stratified folds and respects fold feasibility") {
  const Dataset ds = gen_cross_planes(60, 0.05, 91);
  CvConfig cfg;
  cfg.k = 5;
  cfg.train.tol = 1e-3;
  cfg.seed = 4;
  const CvResult res = run_cv(ds, cfg);
  REQUIRE(res.fold_accuracy.size() == 5);
  for (double acc : res.fold_accuracy) CHECK(acc > 0.6);
  CHECK(res.mean > 0.6);

  Dataset tiny(1);
  for (double v : {1.0, 2.0, 3.0}) tiny.add_positive({&v, 1});
  for (double v : {-1.0, -2.0, -3.0}) tiny.add_negative({&v, 1});
  CvConfig small;
  small.k = 2;
  small.train.tol = 1e-2;
  CHECK_NOTHROW(run_cv(tiny, small));
  small.k = 4;
  CHECK_THROWS_AS(run_cv(tiny, small), std::invalid_argument);
}

TEST_CASE("kernel cv keeps reference selection inside the training folds") {
  const Dataset ds = gen_cross_planes(50, 0.05, 92);
  CvConfig cfg;
  cfg.k = 5;
  cfg.use_kernel = true;
  cfg.mu = 0.5;
  cfg.reduced_size = 30;
  cfg.train.tol = 1e-3;
  const CvResult res = run_cv(ds, cfg);
  CHECK(res.fold_accuracy.size() == 5);
  CHECK(res.mean > 0.5);
}

TEST_CASE("grid search honors the tied-penalty protocol and reports a best point") {
  const Dataset ds = gen_cross_planes(30, 0.05, 93);
  CvConfig cfg;
  cfg.k = 3;
  cfg.train.tol = 1e-2;
  cfg.train.max_iter = 2000;
  const GridResult res = grid_search(ds, cfg, {0.1, 1.0}, {0.1, 1.0});
  CHECK(res.table.size() == 4);
  CHECK(res.best.mean >= res.table.front().mean);
  for (const auto& e : res.table) {
    CHECK((e.c13 == 0.1 || e.c13 == 1.0));
    CHECK((e.c24 == 0.1 || e.c24 == 1.0));
  }
}

TEST_CASE("default grids match the experiment protocol") {
  const auto cs = default_c_grid();
  REQUIRE(cs.size() == 10);
  CHECK(cs.front() == std::ldexp(1.0, -8));
  CHECK(cs.back() == 2.0);
  const auto mus = default_mu_grid();
  REQUIRE(mus.size() == 10);
  CHECK(mus.front() == std::ldexp(1.0, -10));
  CHECK(mus.back() == 0.5);
}

TEST_CASE("compare driver joins traces with oracle optima") {
  const Dataset ds = gen_cross_planes(40, 0.05, 94);
  TrainConfig cfg;
  cfg.tol = 1e-4;
  cfg.policy = {SamplingKind::LcmBalanced, 5};
  const CompareResult res = run_compare(ds, cfg);
  REQUIRE(!res.trace.empty());
  CHECK(res.trace.size() == res.iterations);
  CHECK(res.f1_star > 0.0);
  CHECK(res.f2_star > 0.0);

  std::ostringstream csv;
  write_compare_csv(csv, res);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "iteration,f1,f2,f1_star,f2_star");
  std::string row;
  std::getline(lines, row);
  std::size_t commas = 0;
  for (char ch : row) commas += ch == ',';
  CHECK(commas == 4);  // five columns
}

TEST_CASE("compare with a huge tolerance emits exactly one row") {
  const Dataset ds = testutil::toy_10();
  TrainConfig cfg;
  cfg.tol = 1e9;
  const CompareResult res = run_compare(ds, cfg);
  CHECK(res.trace.size() == 1);
}

TEST_CASE("bench produces rows for every tol/run/algo combination") {
  const Dataset ds = gen_gaussian_1d(500, 2.0, 95);
  BenchConfig cfg;
  cfg.tols = {1e-2, 1e-3};
  cfg.runs = 3;
  cfg.seed = 6;
  const auto rows = run_bench(ds, cfg);
  REQUIRE(rows.size() == 12);
  for (const auto& r : rows) {
    CHECK(r.iterations >= 1);
    CHECK((r.algo == "sgtsvm" || r.algo == "pegasos"));
  }
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  CHECK(csv.str().rfind("algo,tol,run,iterations,seconds,converged", 0) == 0);
}

}  // TEST_SUITE

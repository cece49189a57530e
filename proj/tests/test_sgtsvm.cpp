#include <cmath>
#include <cstring>

#include <doctest.h>

#include "helpers.hpp"
#include "twinsgd/sgtsvm.hpp"

using namespace twinsgd;

namespace {

// Kink-avoiding random state for the half-1 instantaneous objective.
struct RandomState {
  std::vector<double> w, x, xhat;
  double b;
};

RandomState random_state_away_from_kink(Rng& rng, std::size_t n, bool half1) {
  for (;;) {
    RandomState st{testutil::random_vec(rng, n), testutil::random_vec(rng, n),
                   testutil::random_vec(rng, n), rng.gaussian()};
    const double arg = half1 ? 1.0 + (dot(st.w, st.xhat) + st.b)
                             : 1.0 - (dot(st.w, st.x) + st.b);
    if (std::fabs(arg) > 1e-3) return st;
  }
}

}  // namespace

TEST_SUITE("sgtsvm") {

TEST_CASE("subgrad_f1 zero state: hinge active") {
  Rng rng(1);
  const auto x = testutil::random_vec(rng, 4);
  const auto xhat = testutil::random_vec(rng, 4);
  const std::vector<double> w(4, 0.0);
  std::vector<double> gw(4);
  double gb = 0.0;
  subgrad_f1(w, 0.0, x, xhat, 0.3, 0.7, gw, gb);
  for (std::size_t i = 0; i < 4; ++i) CHECK(gw[i] == 0.7 * xhat[i]);
  CHECK(gb == 0.7);
}

TEST_CASE("subgrad_f1 inactive hinge branch") {
  // 1 + w'xhat + b < 0: only the regularizer and proximal terms remain.
  const std::vector<double> w = {2.0};
  const std::vector<double> x = {0.5};
  const std::vector<double> xhat = {-3.0};
  const double b = 0.0, c1 = 0.4, c2 = 5.0;
  std::vector<double> gw(1);
  double gb = 0.0;
  subgrad_f1(w, b, x, xhat, c1, c2, gw, gb);
  const double prox = c1 * (2.0 * 0.5 + 0.0);
  CHECK(gw[0] == doctest::Approx(2.0 + prox * 0.5));
  CHECK(gb == doctest::Approx(0.0 + prox));
}

TEST_CASE("subgrad_f2 zero state and inactive branch") {
  Rng rng(2);
  const auto x = testutil::random_vec(rng, 3);
  const auto xhat = testutil::random_vec(rng, 3);
  const std::vector<double> w0(3, 0.0);
  std::vector<double> gw(3);
  double gb = 0.0;
  subgrad_f2(w0, 0.0, x, xhat, 0.2, 0.9, gw, gb);
  for (std::size_t i = 0; i < 3; ++i) CHECK(gw[i] == -0.9 * x[i]);
  CHECK(gb == -0.9);

  // 1 - w'x - b < 0: the hinge drops out.
  const std::vector<double> w = {3.0};
  const std::vector<double> xx = {1.0};
  const std::vector<double> xh = {-0.5};
  subgrad_f2(w, 0.0, xx, xh, 0.2, 0.9, gw = std::vector<double>(1), gb);
  const double prox = 0.2 * (3.0 * -0.5);
  CHECK(gw[0] == doctest::Approx(3.0 + prox * -0.5));
  CHECK(gb == doctest::Approx(prox));
}

TEST_CASE("subgradients match finite differences away from the kink") {
  Rng rng(3);
  const std::size_t n = 5;
  double worst1 = 0.0, worst2 = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double c1 = 0.05 + rng.uniform01(), c2 = 0.05 + rng.uniform01();
    {
      const auto st = random_state_away_from_kink(rng, n, true);
      std::vector<double> gw(n);
      double gb = 0.0;
      subgrad_f1(st.w, st.b, st.x, st.xhat, c1, c2, gw, gb);
      gw.push_back(gb);
      auto u = st.w;
      u.push_back(st.b);
      const auto fd = testutil::fd_gradient(
          [&](std::span<const double> v) {
            return inst_f1(v.first(n), v[n], st.x, st.xhat, c1, c2);
          },
          u);
      worst1 = std::max(worst1, testutil::max_rel_err(gw, fd));
    }
    {
      const auto st = random_state_away_from_kink(rng, n, false);
      std::vector<double> gw(n);
      double gb = 0.0;
      subgrad_f2(st.w, st.b, st.x, st.xhat, c1, c2, gw, gb);
      gw.push_back(gb);
      auto u = st.w;
      u.push_back(st.b);
      const auto fd = testutil::fd_gradient(
          [&](std::span<const double> v) {
            return inst_f2(v.first(n), v[n], st.x, st.xhat, c1, c2);
          },
          u);
      worst2 = std::max(worst2, testutil::max_rel_err(gw, fd));
    }
  }
  CHECK(worst1 < 1e-6);
  CHECK(worst2 < 1e-6);
}

TEST_CASE("step: zero gradient moves nothing; eta must be positive") {
  std::vector<double> w = {1.0, -2.0};
  double b = 0.5;
  const std::vector<double> zero(2, 0.0);
  step_update(w, b, zero, 0.0, 0.25);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == -2.0);
  CHECK(b == 0.5);
  CHECK_THROWS_AS(step_update(w, b, zero, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("one-step composition from zeros: w_2 = -c2 xhat, b_2 = -c2") {
  const std::vector<double> x = {1.0, 2.0};
  const std::vector<double> xhat = {-3.0, 0.5};
  std::vector<double> w(2, 0.0), gw(2);
  double b = 0.0, gb = 0.0;
  const double c2 = 0.7;
  subgrad_f1(w, b, x, xhat, 0.3, c2, gw, gb);
  step_update(w, b, gw, gb, 1.0);  // eta_1 = 1
  CHECK(w[0] == -c2 * xhat[0]);
  CHECK(w[1] == -c2 * xhat[1]);
  CHECK(b == -c2);
}

TEST_CASE("step∘subgrad equals the augmented closed-form update bit for bit") {
  Rng rng(4);
  const std::size_t n = 6;
  for (int trial = 0; trial < 100; ++trial) {
    const double c1 = 0.05 + rng.uniform01(), c2 = 0.05 + rng.uniform01();
    const double c3 = 0.05 + rng.uniform01(), c4 = 0.05 + rng.uniform01();
    const std::uint64_t t = 1 + rng.bounded(1000);
    const auto x = testutil::random_vec(rng, n);
    const auto xhat = testutil::random_vec(rng, n);
    const auto z = testutil::augment(x);
    const auto zhat = testutil::augment(xhat);

    {
      auto w = testutil::random_vec(rng, n);
      const double b = rng.gaussian();
      auto u = testutil::augment(w);
      u[n] = b;
      const auto closed = testutil::aug_update_f1(u, z, zhat, c1, c2, t);
      std::vector<double> gw(n);
      double gb = 0.0;
      subgrad_f1(w, b, x, xhat, c1, c2, gw, gb);
      double bb = b;
      step_update(w, bb, gw, gb, 1.0 / double(t));
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::memcmp(&w[i], &closed[i], sizeof(double)) == 0);
      CHECK(std::memcmp(&bb, &closed[n], sizeof(double)) == 0);
    }
    {
      auto w = testutil::random_vec(rng, n);
      const double b = rng.gaussian();
      auto u = testutil::augment(w);
      u[n] = b;
      const auto closed = testutil::aug_update_f2(u, z, zhat, c3, c4, t);
      std::vector<double> gw(n);
      double gb = 0.0;
      subgrad_f2(w, b, x, xhat, c3, c4, gw, gb);
      double bb = b;
      step_update(w, bb, gw, gb, 1.0 / double(t));
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::memcmp(&w[i], &closed[i], sizeof(double)) == 0);
      CHECK(std::memcmp(&bb, &closed[n], sizeof(double)) == 0);
    }
  }
}

TEST_CASE("objective at u = 0 equals c2 (and c4 for half 2)") {
  const Dataset ds = testutil::toy_10();
  const std::vector<double> w(2, 0.0);
  CHECK(objective_f1(w, 0.0, ds, 0.3, 0.45) == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(objective_f2(w, 0.0, ds, 0.3, 0.45) == doctest::Approx(0.45).epsilon(1e-15));
}

TEST_CASE("average instantaneous objective over an lcm block equals the full objective") {
  const Dataset ds = gen_cross_planes(4, 0.1, 6);  // m1 = m2 = 4, d = 4
  Dataset uneven(2);
  for (std::size_t i = 0; i < 4; ++i) uneven.add_positive(ds.positive(i));
  for (std::size_t j = 0; j < 3; ++j) uneven.add_negative(ds.negative(j));
  // m1 = 4, m2 = 3 -> d = 12
  PairSampler sampler(uneven, {SamplingKind::LcmBalanced, 44});
  Rng rng(7);
  const auto w = testutil::random_vec(rng, 2);
  const double b = rng.gaussian();
  const double c1 = 0.2, c2 = 0.5;
  double sum = 0.0;
  for (int t = 0; t < 12; ++t) {
    const auto [i, j] = sampler.next();
    sum += inst_f1(w, b, uneven.positive(i), uneven.negative(j), c1, c2);
  }
  CHECK(sum / 12.0 ==
        doctest::Approx(objective_f1(w, b, uneven, c1, c2)).epsilon(1e-12));
}

TEST_CASE("objective matches a naive per-sample loop on a 5-sample instance") {
  Dataset ds(2);
  const double p[3][2] = {{1.0, 0.5}, {2.0, -1.0}, {0.25, 0.75}};
  const double q[2][2] = {{-1.0, -0.5}, {-2.0, 1.0}};
  for (auto& r : p) ds.add_positive({r, 2});
  for (auto& r : q) ds.add_negative({r, 2});
  const std::vector<double> w = {0.3, -0.8};
  const double b = 0.2, c1 = 0.6, c2 = 1.1;

  double naive = 0.5 * (w[0] * w[0] + w[1] * w[1] + b * b);
  for (auto& r : p) {
    const double v = w[0] * r[0] + w[1] * r[1] + b;
    naive += c1 / (2.0 * 3.0) * v * v;
  }
  for (auto& r : q) {
    const double h = 1.0 + w[0] * r[0] + w[1] * r[1] + b;
    naive += c2 / 2.0 * std::max(0.0, h);
  }
  CHECK(objective_f1(w, b, ds, c1, c2) == doctest::Approx(naive).epsilon(1e-14));
}

TEST_CASE("objective convexity witness") {
  const Dataset ds = testutil::toy_10();
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = testutil::random_vec(rng, 3, 2.0);
    const auto v = testutil::random_vec(rng, 3, 2.0);
    const double lam = rng.uniform01();
    std::vector<double> mix(3);
    for (int i = 0; i < 3; ++i) mix[i] = lam * u[i] + (1.0 - lam) * v[i];
    const double lhs = objective_f1_aug(mix, ds, 0.3, 0.4);
    const double rhs = lam * objective_f1_aug(u, ds, 0.3, 0.4) +
                       (1.0 - lam) * objective_f1_aug(v, ds, 0.3, 0.4);
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("training on symmetric data yields mirrored halves") {
  const Dataset ds = testutil::symmetric_1d(1.0);
  TrainConfig cfg;
  cfg.c1 = cfg.c3 = 0.1;
  cfg.c2 = cfg.c4 = 0.1;
  cfg.tol = 1e-5;
  cfg.policy.seed = 3;
  const TrainResult res = train(ds, cfg);
  REQUIRE(res.model.meta.converged1);
  REQUIRE(res.model.meta.converged2);
  // Reflecting the line and swapping classes maps half 1 onto half 2 with
  // w intact and b negated.
  CHECK(std::fabs(res.model.half1.w[0] - res.model.half2.w[0]) < 2.0 * cfg.tol);
  CHECK(std::fabs(res.model.half1.b + res.model.half2.b) < 2.0 * cfg.tol);
}

TEST_CASE("training is deterministic in the seed") {
  const Dataset ds = gen_cross_planes(50, 0.05, 9);
  TrainConfig cfg;
  cfg.tol = 1e-4;
  cfg.policy = {SamplingKind::IidUniform, 1234};
  const TrainResult a = train(ds, cfg);
  const TrainResult b = train(ds, cfg);
  CHECK(a.iterations == b.iterations);
  CHECK(a.model.half1.w == b.model.half1.w);
  CHECK(a.model.half1.b == b.model.half1.b);
  CHECK(a.model.half2.w == b.model.half2.w);
  CHECK(a.model.half2.b == b.model.half2.b);
}

TEST_CASE("a frozen half stays bit-identical for the rest of the run") {
  const Dataset ds = gen_cross_planes(30, 0.05, 10);
  TrainConfig cfg;
  // Asymmetric penalties so one half converges first.
  cfg.c1 = 0.01;
  cfg.c2 = 0.01;
  cfg.c3 = 0.9;
  cfg.c4 = 0.9;
  cfg.tol = 5e-3;
  cfg.trace = TraceMode::Objectives;
  cfg.policy.seed = 77;
  const TrainResult res = train(ds, cfg);
  REQUIRE(res.model.meta.converged1);
  REQUIRE(res.model.meta.converged2);
  REQUIRE(res.trace.size() == res.iterations);

  // Find the first iteration where half 1 froze; afterwards delta1 == 0 and
  // its objective value never changes by a single bit.
  std::size_t frozen_at = res.trace.size();
  for (std::size_t i = 0; i + 1 < res.trace.size(); ++i) {
    if (res.trace[i + 1].delta1 == 0.0) {
      frozen_at = i;
      break;
    }
  }
  REQUIRE(frozen_at < res.trace.size());
  const double f1_frozen = res.trace[frozen_at].f1;
  for (std::size_t i = frozen_at + 1; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].delta1 == 0.0);
    CHECK(res.trace[i].f1 == f1_frozen);
  }
}

TEST_CASE("trace records one row per iteration with objectives when asked") {
  const Dataset ds = testutil::toy_10();
  TrainConfig cfg;
  cfg.tol = 1e-4;
  cfg.max_iter = 200;
  cfg.trace = TraceMode::Objectives;
  cfg.policy.seed = 5;
  const TrainResult res = train(ds, cfg);
  REQUIRE(res.trace.size() == res.iterations);
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].t == i + 1);
    CHECK(res.trace[i].delta1 >= 0.0);
    CHECK(std::isfinite(res.trace[i].f1));
  }
  // Spot-check a traced objective value against a recomputation at the end.
  const double f1_end = objective_f1(res.model.half1.w, res.model.half1.b, ds,
                                     cfg.c1, cfg.c2);
  CHECK(res.trace.back().f1 == f1_end);
}

TEST_CASE("huge tolerance stops after a single iteration") {
  const Dataset ds = testutil::toy_10();
  TrainConfig cfg;
  cfg.tol = 1e9;
  cfg.trace = TraceMode::Deltas;
  const TrainResult res = train(ds, cfg);
  CHECK(res.iterations == 1);
  CHECK(res.trace.size() == 1);
  CHECK(res.model.meta.converged1);
  CHECK(res.model.meta.converged2);
}

TEST_CASE("cross-planes training recovers both generating lines") {
  const Dataset ds = gen_cross_planes(500, 0.05, 21);
  TrainConfig cfg;  // all penalties at the experiment default 0.1
  cfg.tol = 1e-5;
  cfg.policy.seed = 2;
  const TrainResult res = train(ds, cfg);
  const auto line_cosine = [](const HalfModel& h, double dx, double dy) {
    // plane w'x + b = 0 contains direction (-w[1], w[0])
    const double lx = -h.w[1], ly = h.w[0];
    const double denom = std::hypot(lx, ly) * std::hypot(dx, dy);
    return std::fabs(lx * dx + ly * dy) / denom;
  };
  CHECK(line_cosine(res.model.half1, 1.0, 1.0) > 0.98);
  CHECK(line_cosine(res.model.half2, 1.0, -1.0) > 0.98);
}

TEST_CASE("non-finite iterates abort loudly naming the iteration") {
  const Dataset ds = testutil::toy_10();
  TrainConfig cfg;
  cfg.step = [](std::uint64_t) { return 1e160; };  // deliberately divergent
  cfg.max_iter = 50;
  CHECK_THROWS_WITH_AS(train(ds, cfg), doctest::Contains("iteration"),
                       std::runtime_error);
}

TEST_CASE("config validation rejects bad parameters") {
  TrainConfig cfg;
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.c2 = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

}  // TEST_SUITE

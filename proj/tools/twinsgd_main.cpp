// twinsgd command-line tool: dataset generation, training, prediction,
// cross-validation, oracle comparison, and the stability/convergence
// experiment drivers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "twinsgd/experiments.hpp"
#include "twinsgd/model.hpp"
#include "twinsgd/oracle.hpp"
#include "twinsgd/pegasos.hpp"
#include "twinsgd/sgtsvm.hpp"

namespace {

using namespace twinsgd;

double wall_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

Dataset load_data(const std::string& path, const std::string& format,
                  std::optional<std::size_t> label_column) {
  std::string fmt = format;
  if (fmt == "auto") {
    const auto dotpos = path.rfind('.');
    const std::string ext = dotpos == std::string::npos ? "" : path.substr(dotpos + 1);
    fmt = ext == "csv" ? "csv" : "libsvm";
  }
  if (fmt == "csv") return load_csv(path, label_column);
  return load_libsvm(path);
}

SamplingKind parse_sampling(const std::string& name) {
  if (name == "iid") return SamplingKind::IidUniform;
  if (name == "epoch") return SamplingKind::EpochPermutation;
  if (name == "lcm") return SamplingKind::LcmBalanced;
  throw CLI::ValidationError("--sampling", "unknown sampling policy '" + name + "'");
}

std::pair<double, double> parse_interval(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw CLI::ValidationError("--mask", "expected lo:hi, got '" + text + "'");
  try {
    const double lo = std::stod(text.substr(0, colon));
    const double hi = std::stod(text.substr(colon + 1));
    if (!(lo <= hi)) throw std::invalid_argument("lo > hi");
    return {lo, hi};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--mask", "expected numeric lo:hi, got '" + text + "'");
  }
}

std::string peek_model_mode(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::string line;
  for (int i = 0; i < 3 && std::getline(in, line); ++i)
    if (line.rfind("mode ", 0) == 0) return line.substr(5);
  throw std::runtime_error(path + ": not a model file (no mode field)");
}

struct CommonTrainFlags {
  double c1 = 0.1, c2 = 0.1, c3 = 0.1, c4 = 0.1;
  double c = 0.1;
  double tol = 1e-3;
  std::uint64_t max_iter = 1000000;
  std::string sampling = "iid";
  std::uint64_t seed = 1;
  std::string kernel = "none";
  double mu = 0.1;
  std::size_t reduced_size = 100;
};

void add_train_flags(CLI::App* cmd, CommonTrainFlags& f) {
  cmd->add_option("--c1", f.c1, "penalty c1")->check(CLI::PositiveNumber);
  cmd->add_option("--c2", f.c2, "penalty c2")->check(CLI::PositiveNumber);
  cmd->add_option("--c3", f.c3, "penalty c3")->check(CLI::PositiveNumber);
  cmd->add_option("--c4", f.c4, "penalty c4")->check(CLI::PositiveNumber);
  cmd->add_option("--c", f.c, "PEGASOS penalty c")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "stopping tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", f.max_iter, "iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--sampling", f.sampling, "sampling policy: iid|epoch|lcm")
      ->check(CLI::IsMember({"iid", "epoch", "lcm"}));
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--kernel", f.kernel, "kernel: none|gaussian")
      ->check(CLI::IsMember({"none", "gaussian"}));
  cmd->add_option("--mu", f.mu, "Gaussian kernel width")->check(CLI::PositiveNumber);
  cmd->add_option("--reduced-size", f.reduced_size, "reference point count")
      ->check(CLI::PositiveNumber);
}

TrainConfig to_train_config(const CommonTrainFlags& f) {
  TrainConfig cfg;
  cfg.c1 = f.c1;
  cfg.c2 = f.c2;
  cfg.c3 = f.c3;
  cfg.c4 = f.c4;
  cfg.tol = f.tol;
  cfg.max_iter = f.max_iter;
  cfg.policy = {parse_sampling(f.sampling), f.seed};
  return cfg;
}

int cmd_gen(const std::string& type, std::size_t m_per_class, double noise,
            double mean_sep, std::uint64_t seed, const std::string& out,
            const std::string& format) {
  Dataset ds = type == "cross-planes" ? gen_cross_planes(m_per_class, noise, seed)
                                      : gen_gaussian_1d(m_per_class, mean_sep, seed);
  if (format == "csv")
    save_csv(ds, out);
  else
    save_libsvm(ds, out);
  std::cout << "wrote " << ds.size() << " samples (n=" << ds.dim() << ") to " << out
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic gradient twin SVM toolkit"};
  app.require_subcommand(1);

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  std::string gen_type = "cross-planes";
  std::size_t gen_m = 500;
  double gen_noise = 0.05, gen_sep = 2.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out, gen_format = "csv";
  gen->add_option("--type", gen_type, "cross-planes|gaussian-1d")
      ->check(CLI::IsMember({"cross-planes", "gaussian-1d"}));
  gen->add_option("--m-per-class", gen_m, "samples per class")->check(CLI::PositiveNumber);
  gen->add_option("--noise", gen_noise, "ordinate noise std (cross-planes)")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--mean-sep", gen_sep, "class mean separation (gaussian-1d)");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_out, "output path")->required();
  gen->add_option("--format", gen_format, "csv|libsvm")
      ->check(CLI::IsMember({"csv", "libsvm"}));

  // --- train ---
  auto* tr = app.add_subcommand("train", "train a model");
  std::string tr_algo = "sgtsvm", tr_data, tr_format = "auto", tr_out = "model.twinsgd";
  std::string tr_trace;
  bool tr_trace_obj = false, tr_pegasos_bias = false, tr_normalize = false;
  std::optional<std::size_t> tr_label_column;
  CommonTrainFlags tr_flags;
  tr->add_option("--algo", tr_algo, "sgtsvm|pegasos")
      ->check(CLI::IsMember({"sgtsvm", "pegasos"}));
  tr->add_option("--data", tr_data, "training data")->required()->check(CLI::ExistingFile);
  tr->add_option("--format", tr_format, "auto|csv|libsvm")
      ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
  tr->add_option("--label-column", tr_label_column, "CSV label column (default last)");
  tr->add_option("--out", tr_out, "model output path");
  tr->add_option("--trace", tr_trace, "write per-iteration trace CSV here");
  tr->add_flag("--trace-objectives", tr_trace_obj,
               "also record full objectives in the trace (costly)");
  tr->add_flag("--pegasos-bias", tr_pegasos_bias, "PEGASOS offset-term variant");
  tr->add_flag("--normalize", tr_normalize, "min-max scale features to [0,1] first");
  add_train_flags(tr, tr_flags);

  // --- predict ---
  auto* pr = app.add_subcommand("predict", "predict labels with a trained model");
  std::string pr_model, pr_data, pr_format = "auto", pr_out;
  std::optional<std::size_t> pr_label_column;
  pr->add_option("--model", pr_model, "model file")->required()->check(CLI::ExistingFile);
  pr->add_option("--data", pr_data, "data file")->required()->check(CLI::ExistingFile);
  pr->add_option("--format", pr_format, "auto|csv|libsvm")
      ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
  pr->add_option("--label-column", pr_label_column, "CSV label column (default last)");
  pr->add_option("--out", pr_out, "per-sample prediction CSV");

  // --- cv ---
  auto* cv = app.add_subcommand("cv", "k-fold cross-validation, optionally a grid search");
  std::string cv_data, cv_format = "auto";
  std::size_t cv_folds = 10;
  bool cv_grid = false, cv_normalize = false;
  std::optional<std::size_t> cv_label_column;
  CommonTrainFlags cv_flags;
  cv->add_option("--data", cv_data, "data file")->required()->check(CLI::ExistingFile);
  cv->add_option("--format", cv_format, "auto|csv|libsvm")
      ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
  cv->add_option("--label-column", cv_label_column, "CSV label column (default last)");
  cv->add_option("--folds", cv_folds, "fold count")->check(CLI::Range(2, 1000000));
  cv->add_flag("--grid", cv_grid, "grid-search penalties (tied c1=c3, c2=c4) and mu");
  cv->add_flag("--normalize", cv_normalize, "min-max scale features first");
  add_train_flags(cv, cv_flags);

  // --- compare ---
  auto* cp = app.add_subcommand("compare",
                                "trace SGTSVM objectives against the batch oracle optimum");
  std::string cp_data, cp_format = "auto", cp_out;
  std::optional<std::size_t> cp_label_column;
  double cp_oracle_tol = 1e-10;
  std::uint64_t cp_oracle_max_iter = 100000;
  bool cp_force = false;
  CommonTrainFlags cp_flags;
  cp->add_option("--data", cp_data, "data file")->required()->check(CLI::ExistingFile);
  cp->add_option("--format", cp_format, "auto|csv|libsvm")
      ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
  cp->add_option("--label-column", cp_label_column, "CSV label column (default last)");
  cp->add_option("--out", cp_out, "output CSV")->required();
  cp->add_option("--oracle-tol", cp_oracle_tol, "oracle objective tolerance")
      ->check(CLI::PositiveNumber);
  cp->add_option("--oracle-max-iter", cp_oracle_max_iter, "oracle iteration cap")
      ->check(CLI::PositiveNumber);
  cp->add_flag("--force-large", cp_force, "override the oracle size guard");
  add_train_flags(cp, cp_flags);

  // --- stability ---
  auto* st = app.add_subcommand("stability",
                                "repeated 1-D runs; decision-boundary spread and accuracy");
  std::size_t st_runs = 100, st_m = 5000;
  double st_sep = 2.0, st_c = 0.1;
  std::uint64_t st_iters = 200, st_seed = 1;
  std::string st_algo = "both", st_mask, st_mask_class = "neg", st_out;
  bool st_pegasos_nobias = false;
  st->add_option("--runs", st_runs, "number of seeded runs")->check(CLI::PositiveNumber);
  st->add_option("--m-per-class", st_m, "samples per class")->check(CLI::PositiveNumber);
  st->add_option("--mean-sep", st_sep, "class mean separation");
  st->add_option("--iters", st_iters, "iteration budget per run")->check(CLI::PositiveNumber);
  st->add_option("--c", st_c, "penalty for both methods")->check(CLI::PositiveNumber);
  st->add_option("--seed", st_seed, "master seed");
  st->add_option("--algo", st_algo, "sgtsvm|pegasos|both")
      ->check(CLI::IsMember({"sgtsvm", "pegasos", "both"}));
  st->add_option("--mask", st_mask, "lo:hi feature interval invisible to sampling");
  st->add_option("--mask-class", st_mask_class, "pos|neg class the mask hides")
      ->check(CLI::IsMember({"pos", "neg"}));
  st->add_flag("--pegasos-no-bias", st_pegasos_nobias,
               "drop the PEGASOS offset term (pins the 1-D boundary at 0)");
  st->add_option("--out", st_out, "per-run CSV output");

  // --- bench ---
  auto* be = app.add_subcommand("bench", "iterations and time to converge per tolerance");
  std::string be_data, be_format = "auto", be_tols = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6";
  std::string be_out, be_algo = "both";
  std::optional<std::size_t> be_label_column;
  std::size_t be_runs = 10, be_m = 10000;
  double be_sep = 2.0, be_c = 0.1;
  std::uint64_t be_seed = 1, be_max_iter = 1000000;
  bool be_pegasos_nobias = false;
  be->add_option("--data", be_data, "data file (default: generated gaussian-1d)")
      ->check(CLI::ExistingFile);
  be->add_option("--format", be_format, "auto|csv|libsvm")
      ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
  be->add_option("--label-column", be_label_column, "CSV label column (default last)");
  be->add_option("--tols", be_tols, "comma-separated tolerance list");
  be->add_option("--runs", be_runs, "seeded trials per tolerance")->check(CLI::PositiveNumber);
  be->add_option("--m-per-class", be_m, "generator size when --data absent");
  be->add_option("--mean-sep", be_sep, "generator separation when --data absent");
  be->add_option("--c", be_c, "penalty for both methods")->check(CLI::PositiveNumber);
  be->add_option("--seed", be_seed, "master seed");
  be->add_option("--max-iter", be_max_iter, "iteration cap")->check(CLI::PositiveNumber);
  be->add_option("--algo", be_algo, "sgtsvm|pegasos|both")
      ->check(CLI::IsMember({"sgtsvm", "pegasos", "both"}));
  be->add_flag("--pegasos-no-bias", be_pegasos_nobias, "drop the PEGASOS offset term");
  be->add_option("--out", be_out, "per-run CSV output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen)
      return cmd_gen(gen_type, gen_m, gen_noise, gen_sep, gen_seed, gen_out, gen_format);

    if (*tr) {
      Dataset ds = load_data(tr_data, tr_format, tr_label_column);
      if (tr_normalize) ds = scale_minmax(ds);
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<TraceRecord> trace;
      if (tr_algo == "sgtsvm") {
        TrainConfig cfg = to_train_config(tr_flags);
        if (!tr_trace.empty())
          cfg.trace = tr_trace_obj ? TraceMode::Objectives : TraceMode::Deltas;
        KernelSpec spec;
        const KernelSpec* spec_ptr = nullptr;
        if (tr_flags.kernel == "gaussian") {
          spec = select_reference(ds, std::min(tr_flags.reduced_size, ds.size()),
                                  tr_flags.mu, tr_flags.seed);
          spec_ptr = &spec;
        }
        TrainResult res = train(ds, cfg, spec_ptr);
        save_model(res.model, tr_out);
        trace = std::move(res.trace);
        std::cout << "sgtsvm: converged1=" << res.model.meta.converged1
                  << " converged2=" << res.model.meta.converged2
                  << " iterations=" << res.iterations << " wall_ms=" << wall_ms(t0)
                  << "\n";
      } else {
        PegasosConfig cfg;
        cfg.c = tr_flags.c;
        cfg.tol = tr_flags.tol;
        cfg.max_iter = tr_flags.max_iter;
        cfg.with_bias = tr_pegasos_bias;
        cfg.policy = {parse_sampling(tr_flags.sampling), tr_flags.seed};
        if (!tr_trace.empty())
          cfg.trace = tr_trace_obj ? TraceMode::Objectives : TraceMode::Deltas;
        PegasosResult res = pegasos_train(ds, cfg);
        save_pegasos(res.model, tr_out);
        trace = std::move(res.trace);
        std::cout << "pegasos: converged=" << res.model.converged
                  << " iterations=" << res.model.iterations << " wall_ms=" << wall_ms(t0)
                  << "\n";
      }
      if (!tr_trace.empty()) {
        std::ofstream out(tr_trace);
        if (!out) throw std::runtime_error(tr_trace + ": cannot open for writing");
        write_trace_csv(out, trace);
      }
      return 0;
    }

    if (*pr) {
      const Dataset ds = load_data(pr_data, pr_format, pr_label_column);
      const std::string mode = peek_model_mode(pr_model);
      std::vector<int> predicted(ds.size());
      auto run_all = [&](auto&& classify) {
        std::size_t at = 0;
        for (std::size_t i = 0; i < ds.m1(); ++i) predicted[at++] = classify(ds.positive(i));
        for (std::size_t j = 0; j < ds.m2(); ++j) predicted[at++] = classify(ds.negative(j));
      };
      if (mode == "pegasos") {
        const PegasosModel model = load_pegasos(pr_model);
        run_all([&](std::span<const double> x) { return pegasos_predict(model, x); });
      } else {
        const TwinModel model = load_model(pr_model);
        run_all([&](std::span<const double> x) { return predict(model, x); });
      }
      std::size_t correct = 0;
      for (std::size_t i = 0; i < ds.m1(); ++i) correct += predicted[i] > 0;
      for (std::size_t j = 0; j < ds.m2(); ++j) correct += predicted[ds.m1() + j] < 0;
      if (!pr_out.empty()) {
        std::ofstream out(pr_out);
        if (!out) throw std::runtime_error(pr_out + ": cannot open for writing");
        out << "index,predicted,actual\n";
        for (std::size_t i = 0; i < ds.size(); ++i)
          out << i << "," << predicted[i] << "," << (i < ds.m1() ? 1 : -1) << "\n";
      }
      std::printf("accuracy %.6f (%zu/%zu)\n", double(correct) / double(ds.size()),
                  correct, ds.size());
      return 0;
    }

    if (*cv) {
      Dataset ds = load_data(cv_data, cv_format, cv_label_column);
      if (cv_normalize) ds = scale_minmax(ds);
      CvConfig cfg;
      cfg.k = cv_folds;
      cfg.train = to_train_config(cv_flags);
      cfg.use_kernel = cv_flags.kernel == "gaussian";
      cfg.mu = cv_flags.mu;
      cfg.reduced_size = cv_flags.reduced_size;
      cfg.seed = cv_flags.seed;
      if (cv_grid) {
        const GridResult grid = grid_search(ds, cfg);
        for (const GridEntry& e : grid.table)
          std::printf("grid c1=c3=%g c2=c4=%g mu=%g accuracy %.2f +- %.2f\n", e.c13,
                      e.c24, e.mu, 100.0 * e.mean, 100.0 * e.stddev);
        std::printf("best c1=c3=%g c2=c4=%g mu=%g accuracy %.2f +- %.2f\n",
                    grid.best.c13, grid.best.c24, grid.best.mu, 100.0 * grid.best.mean,
                    100.0 * grid.best.stddev);
      } else {
        const CvResult res = run_cv(ds, cfg);
        for (std::size_t f = 0; f < res.fold_accuracy.size(); ++f)
          std::printf("fold %zu accuracy %.4f\n", f, res.fold_accuracy[f]);
        std::printf("cv accuracy %.2f +- %.2f (%%)\n", 100.0 * res.mean,
                    100.0 * res.stddev);
      }
      return 0;
    }

    if (*cp) {
      const Dataset ds = load_data(cp_data, cp_format, cp_label_column);
      TrainConfig cfg = to_train_config(cp_flags);
      OracleConfig ocfg;
      ocfg.obj_tol = cp_oracle_tol;
      ocfg.max_iter = cp_oracle_max_iter;
      ocfg.override_guard = cp_force;
      KernelSpec spec;
      const KernelSpec* spec_ptr = nullptr;
      if (cp_flags.kernel == "gaussian") {
        spec = select_reference(ds, std::min(cp_flags.reduced_size, ds.size()),
                                cp_flags.mu, cp_flags.seed);
        spec_ptr = &spec;
      }
      const CompareResult res = run_compare(ds, cfg, spec_ptr, ocfg);
      std::ofstream out(cp_out);
      if (!out) throw std::runtime_error(cp_out + ": cannot open for writing");
      write_compare_csv(out, res);
      std::printf("f1_star %.12g f2_star %.12g over %llu iterations -> %s\n",
                  res.f1_star, res.f2_star,
                  static_cast<unsigned long long>(res.iterations), cp_out.c_str());
      return 0;
    }

    if (*st) {
      StabilityConfig cfg;
      cfg.runs = st_runs;
      cfg.m_per_class = st_m;
      cfg.mean_sep = st_sep;
      cfg.iterations = st_iters;
      cfg.c = st_c;
      cfg.seed = st_seed;
      cfg.algo = st_algo == "sgtsvm" ? Algo::Sgtsvm
               : st_algo == "pegasos" ? Algo::Pegasos
                                      : Algo::Both;
      cfg.pegasos_bias = !st_pegasos_nobias;
      if (!st_mask.empty()) {
        cfg.mask_interval = parse_interval(st_mask);
        cfg.mask_label = st_mask_class == "pos" ? +1 : -1;
      }
      const auto rows = run_stability(cfg);
      if (!st_out.empty()) {
        std::ofstream out(st_out);
        if (!out) throw std::runtime_error(st_out + ": cannot open for writing");
        write_stability_csv(out, rows);
      }
      std::vector<double> sgb, sga, pgb, pga;
      for (const auto& r : rows) {
        sgb.push_back(r.sg_boundary);
        sga.push_back(r.sg_accuracy);
        pgb.push_back(r.peg_boundary);
        pga.push_back(r.peg_accuracy);
      }
      if (cfg.algo != Algo::Pegasos) {
        const auto b = summarize(sgb), a = summarize(sga);
        std::printf("sgtsvm  boundary %+.4f +- %.4f | accuracy [%.4f, %.4f]\n", b.mean,
                    b.stddev, a.min, a.max);
      }
      if (cfg.algo != Algo::Sgtsvm) {
        const auto b = summarize(pgb), a = summarize(pga);
        std::printf("pegasos boundary %+.4f +- %.4f | accuracy [%.4f, %.4f]\n", b.mean,
                    b.stddev, a.min, a.max);
      }
      return 0;
    }

    if (*be) {
      Dataset ds = be_data.empty() ? gen_gaussian_1d(be_m, be_sep, derive_seed(be_seed, 999))
                                   : load_data(be_data, be_format, be_label_column);
      BenchConfig cfg;
      cfg.tols.clear();
      std::string tok;
      std::istringstream tols(be_tols);
      while (std::getline(tols, tok, ',')) cfg.tols.push_back(std::stod(tok));
      cfg.runs = be_runs;
      cfg.seed = be_seed;
      cfg.c = be_c;
      cfg.max_iter = be_max_iter;
      cfg.pegasos_bias = !be_pegasos_nobias;
      cfg.algo = be_algo == "sgtsvm" ? Algo::Sgtsvm
               : be_algo == "pegasos" ? Algo::Pegasos
                                      : Algo::Both;
      const auto rows = run_bench(ds, cfg);
      if (!be_out.empty()) {
        std::ofstream out(be_out);
        if (!out) throw std::runtime_error(be_out + ": cannot open for writing");
        write_bench_csv(out, rows);
      }
      for (double tol : cfg.tols) {
        for (const char* algo : {"sgtsvm", "pegasos"}) {
          std::vector<double> iters, secs;
          for (const auto& r : rows)
            if (r.tol == tol && r.algo == algo) {
              iters.push_back(double(r.iterations));
              secs.push_back(r.seconds);
            }
          if (iters.empty()) continue;
          std::printf("tol %-8g %-7s iterations %10.1f  seconds %.4f\n", tol, algo,
                      summarize(iters).mean, summarize(secs).mean);
        }
      }
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

#include "twinsgd/pegasos.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "twinsgd/rng.hpp"
#include "twinsgd/vec.hpp"

namespace twinsgd {

namespace {

void append_real(std::string& out, double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  out.append(buf, res.ptr);
}

}  // namespace

void PegasosConfig::validate() const {
  if (!(c > 0.0)) throw std::invalid_argument("PegasosConfig: c must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("PegasosConfig: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("PegasosConfig: max_iter must be >= 1");
  if (step == nullptr) throw std::invalid_argument("PegasosConfig: missing step schedule");
}

std::uint64_t PegasosConfig::hash() const {
  std::string s = "pegasos|";
  append_real(s, c);
  s.push_back('|');
  append_real(s, tol);
  s += "|" + std::to_string(max_iter) + "|" + (with_bias ? "b1" : "b0") + "|" +
       std::to_string(int(policy.kind)) + "|" + std::to_string(policy.seed);
  return fnv1a64(s);
}

void pegasos_subgrad(std::span<const double> w, std::span<const double> x, int y,
                     double c, std::span<double> grad_w) {
  const double yd = double(y);
  const double s = (1.0 - yd * dot(w, x) > 0.0) ? 1.0 : 0.0;
  const double a = c * yd * s;
  for (std::size_t i = 0; i < w.size(); ++i) grad_w[i] = w[i] - a * x[i];
}

double pegasos_objective(std::span<const double> w, double b, const Dataset& ds,
                         double c) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < ds.m1(); ++i) {
    const double h = 1.0 - (dot(w, ds.positive(i)) + b);
    if (h > 0.0) hinge += h;
  }
  for (std::size_t j = 0; j < ds.m2(); ++j) {
    const double h = 1.0 + (dot(w, ds.negative(j)) + b);
    if (h > 0.0) hinge += h;
  }
  return 0.5 * norm_sq(w) + c / double(ds.size()) * hinge;
}

PegasosResult pegasos_train(const Dataset& ds, const PegasosConfig& cfg,
                            const SamplingMask* mask) {
  cfg.validate();
  ds.validate();
  const std::size_t n = ds.dim();

  PooledSampler sampler(ds, cfg.policy, mask);
  std::vector<double> w(n, 0.0);
  double b = 0.0;

  PegasosResult res;
  res.model.with_bias = cfg.with_bias;
  if (cfg.trace != TraceMode::None)
    res.trace.reserve(std::min<std::uint64_t>(cfg.max_iter, 1u << 20));

  std::uint64_t iterations = 0;
  bool converged = false;
  for (std::uint64_t t = 1; t <= cfg.max_iter; ++t) {
    iterations = t;
    const double eta = cfg.step(t);
    const auto [y, idx] = sampler.next();
    const std::span<const double> x = ds.sample(y, idx);

    const double yd = double(y);
    const double margin = yd * (dot(w, x) + b);
    const double s = (1.0 - margin > 0.0) ? 1.0 : 0.0;
    const double a = cfg.c * yd * s;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = w[i] - a * x[i];
      w[i] -= eta * g;
      sum_sq += g * g;
    }
    double db = 0.0;
    if (cfg.with_bias) {
      const double gb = -a;  // the bias is not regularized
      b -= eta * gb;
      db = eta * std::fabs(gb);
    }
    const double dw = eta * std::sqrt(sum_sq);
    if (!std::isfinite(dw + db))
      throw std::runtime_error("pegasos: non-finite iterate at iteration " +
                               std::to_string(t));

    if (cfg.trace != TraceMode::None) {
      TraceRecord rec;
      rec.t = t;
      rec.delta1 = dw;
      rec.delta2 = db;
      if (cfg.trace == TraceMode::Objectives)
        rec.f1 = pegasos_objective(w, b, ds, cfg.c);
      res.trace.push_back(rec);
    }

    if (dw + db < cfg.tol) {
      converged = true;
      break;
    }
  }

  res.model.w = std::move(w);
  res.model.b = b;
  res.model.converged = converged;
  res.model.iterations = iterations;
  res.model.config_hash = cfg.hash();
  res.model.seed = cfg.policy.seed;
  return res;
}

int pegasos_predict(const PegasosModel& model, std::span<const double> x) {
  if (x.size() != model.w.size())
    throw std::invalid_argument("pegasos_predict: dimension mismatch");
  return dot(model.w, x) + model.b < 0.0 ? -1 : +1;
}

void save_pegasos(const PegasosModel& model, const std::string& path) {
  std::string body = "mode pegasos\n";
  body += "n " + std::to_string(model.w.size()) + "\n";
  body += "with_bias ";
  body += model.with_bias ? "1" : "0";
  body.push_back('\n');
  body += "w " + std::to_string(model.w.size());
  for (double v : model.w) {
    body.push_back(' ');
    append_real(body, v);
  }
  body.push_back('\n');
  body += "b ";
  append_real(body, model.b);
  body.push_back('\n');
  body += "meta config_hash=" + std::to_string(model.config_hash) +
          " seed=" + std::to_string(model.seed) +
          " iterations=" + std::to_string(model.iterations) +
          " converged=" + (model.converged ? "1" : "0") + "\n";
  body += "end\n";

  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  char sum[17];
  std::snprintf(sum, sizeof(sum), "%016llx",
                static_cast<unsigned long long>(fnv1a64(body)));
  out << "format_version 1\n";
  out << "checksum " << sum << "\n";
  out << body;
  if (!out) throw std::runtime_error(path + ": write failed");
}

PegasosModel load_pegasos(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::string line;
  auto next_line = [&](const char* what) -> std::string& {
    if (!std::getline(in, line))
      throw std::runtime_error(path + ": truncated file (missing " + what + ")");
    return line;
  };
  auto expect_key = [&](const std::string& l, const std::string& key) {
    if (l.rfind(key + " ", 0) != 0)
      throw std::runtime_error(path + ": expected '" + key + "', got '" + l + "'");
    return l.substr(key.size() + 1);
  };
  const std::string ver = expect_key(next_line("format_version"), "format_version");
  if (ver != "1") throw std::runtime_error(path + ": unsupported format_version " + ver);
  const std::string stored_sum = expect_key(next_line("checksum"), "checksum");
  std::string body;
  {
    std::ostringstream rest;
    rest << in.rdbuf();
    body = rest.str();
  }
  char sum[17];
  std::snprintf(sum, sizeof(sum), "%016llx",
                static_cast<unsigned long long>(fnv1a64(body)));
  if (stored_sum != sum) throw std::runtime_error(path + ": checksum mismatch");

  std::istringstream is(body);
  auto body_line = [&](const char* what) -> std::string& {
    if (!std::getline(is, line))
      throw std::runtime_error(path + ": truncated file (missing " + what + ")");
    return line;
  };
  auto parse_real = [&](const std::string& tok) {
    double v = 0.0;
    auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size())
      throw std::runtime_error(path + ": malformed real '" + tok + "'");
    return v;
  };

  PegasosModel model;
  if (expect_key(body_line("mode"), "mode") != "pegasos")
    throw std::runtime_error(path + ": not a pegasos model file");
  const std::size_t n = std::stoull(expect_key(body_line("n"), "n"));
  model.with_bias = expect_key(body_line("with_bias"), "with_bias") == "1";
  {
    std::istringstream row(expect_key(body_line("w"), "w"));
    std::size_t len = 0;
    row >> len;
    if (len != n) throw std::runtime_error(path + ": weight length disagrees with header");
    model.w.resize(len);
    std::string tok;
    for (std::size_t i = 0; i < len; ++i) {
      if (!(row >> tok)) throw std::runtime_error(path + ": truncated weight vector");
      model.w[i] = parse_real(tok);
    }
  }
  model.b = parse_real(expect_key(body_line("b"), "b"));
  std::istringstream meta(expect_key(body_line("meta"), "meta"));
  std::string kv;
  while (meta >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ": malformed meta entry '" + kv + "'");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "config_hash") model.config_hash = std::stoull(val);
    else if (key == "seed") model.seed = std::stoull(val);
    else if (key == "iterations") model.iterations = std::stoull(val);
    else if (key == "converged") model.converged = val == "1";
    else throw std::runtime_error(path + ": unknown meta key '" + key + "'");
  }
  if (body_line("end") != "end")
    throw std::runtime_error(path + ": truncated file (missing end marker)");
  return model;
}

}  // namespace twinsgd

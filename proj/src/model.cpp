#include "twinsgd/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "twinsgd/rng.hpp"
#include "twinsgd/vec.hpp"

namespace twinsgd {

namespace {

constexpr int kFormatVersion = 1;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void append_real(std::string& out, double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  out.append(buf, res.ptr);
}

double parse_real(const std::string& path, const std::string& tok) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    fail(path + ": malformed real '" + tok + "'");
  return v;
}

}  // namespace

HalfModel HalfModel::make(std::vector<double> w, double b) {
  HalfModel h;
  h.w = std::move(w);
  h.b = b;
  h.w_norm = norm(h.w);
  return h;
}

int predict(const TwinModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim())
    throw std::invalid_argument("predict: expected dimension " +
                                std::to_string(model.input_dim()) + ", got " +
                                std::to_string(x.size()));
  std::vector<double> mapped;
  std::span<const double> phi = x;
  if (model.kernel) {
    mapped = feature_map(*model.kernel, x);
    phi = mapped;
  }
  const double inf = std::numeric_limits<double>::infinity();
  const bool z1 = model.half1.w_norm == 0.0;
  const bool z2 = model.half2.w_norm == 0.0;
  if (z1 && z2) return +1;
  const double d1 = z1 ? inf : std::fabs(dot(model.half1.w, phi) + model.half1.b) / model.half1.w_norm;
  const double d2 = z2 ? inf : std::fabs(dot(model.half2.w, phi) + model.half2.b) / model.half2.w_norm;
  return d1 <= d2 ? +1 : -1;
}

Metrics evaluate(const TwinModel& model, const Dataset& ds) {
  ds.validate();
  Metrics m;
  std::vector<double> mapped(model.kernel ? model.kernel->r : 0);
  // Same rule as predict(); the map buffer is reused across samples.
  auto classify = [&](std::span<const double> x) {
    std::span<const double> phi = x;
    if (model.kernel) {
      feature_map(*model.kernel, x, mapped);
      phi = mapped;
    }
    const double inf = std::numeric_limits<double>::infinity();
    const bool z1 = model.half1.w_norm == 0.0;
    const bool z2 = model.half2.w_norm == 0.0;
    if (z1 && z2) return +1;
    const double d1 = z1 ? inf : std::fabs(dot(model.half1.w, phi) + model.half1.b) / model.half1.w_norm;
    const double d2 = z2 ? inf : std::fabs(dot(model.half2.w, phi) + model.half2.b) / model.half2.w_norm;
    return d1 <= d2 ? +1 : -1;
  };
  for (std::size_t i = 0; i < ds.m1(); ++i)
    (classify(ds.positive(i)) > 0 ? m.tp : m.fn)++;
  for (std::size_t i = 0; i < ds.m2(); ++i)
    (classify(ds.negative(i)) < 0 ? m.tn : m.fp)++;
  m.accuracy = double(m.tp + m.tn) / double(m.total());
  return m;
}

void save_model(const TwinModel& model, const std::string& path) {
  std::string body;
  body += "mode ";
  body += model.kernel ? "gaussian-reduced" : "linear";
  body.push_back('\n');
  body += "n " + std::to_string(model.input_dim()) + "\n";
  body += "r " + std::to_string(model.kernel ? model.kernel->r : 0) + "\n";
  body += "mu ";
  append_real(body, model.kernel ? model.kernel->mu : 0.0);
  body.push_back('\n');
  if (model.kernel) {
    body += "reference_points " + std::to_string(model.kernel->r) + "\n";
    for (std::size_t i = 0; i < model.kernel->r; ++i) {
      auto row = model.kernel->ref_point(i);
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) body.push_back(' ');
        append_real(body, row[j]);
      }
      body.push_back('\n');
    }
  } else {
    body += "reference_points 0\n";
  }
  auto emit_half = [&](const char* tag, const HalfModel& h) {
    body += std::string(tag) + " " + std::to_string(h.w.size());
    for (double v : h.w) {
      body.push_back(' ');
      append_real(body, v);
    }
    body.push_back('\n');
  };
  emit_half("w1", model.half1);
  body += "b1 ";
  append_real(body, model.half1.b);
  body.push_back('\n');
  emit_half("w2", model.half2);
  body += "b2 ";
  append_real(body, model.half2.b);
  body.push_back('\n');
  body += "meta config_hash=" + std::to_string(model.meta.config_hash) +
          " seed=" + std::to_string(model.meta.seed) +
          " iterations=" + std::to_string(model.meta.iterations) +
          " converged1=" + (model.meta.converged1 ? "1" : "0") +
          " converged2=" + (model.meta.converged2 ? "1" : "0") + "\n";
  body += "end\n";

  std::ofstream out(path);
  if (!out) fail(path + ": cannot open for writing");
  char sum[17];
  std::snprintf(sum, sizeof(sum), "%016llx",
                static_cast<unsigned long long>(fnv1a64(body)));
  out << "format_version " << kFormatVersion << "\n";
  out << "checksum " << sum << "\n";
  out << body;
  if (!out) fail(path + ": write failed");
}

TwinModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path + ": cannot open file");

  std::string line;
  auto next_line = [&](const char* what) -> std::string& {
    if (!std::getline(in, line)) fail(path + ": truncated file (missing " + what + ")");
    return line;
  };
  auto expect_key = [&](const std::string& l, const std::string& key) -> std::string {
    if (l.rfind(key + " ", 0) != 0) fail(path + ": expected '" + key + "', got '" + l + "'");
    return l.substr(key.size() + 1);
  };

  const std::string ver = expect_key(next_line("format_version"), "format_version");
  if (ver != std::to_string(kFormatVersion))
    fail(path + ": unsupported format_version " + ver + " (expected " +
         std::to_string(kFormatVersion) + ")");
  const std::string stored_sum = expect_key(next_line("checksum"), "checksum");

  // Everything after the checksum line is covered by it.
  std::string body;
  {
    std::ostringstream rest;
    rest << in.rdbuf();
    body = rest.str();
  }
  char sum[17];
  std::snprintf(sum, sizeof(sum), "%016llx",
                static_cast<unsigned long long>(fnv1a64(body)));
  if (stored_sum != sum) fail(path + ": checksum mismatch (file corrupted?)");
  if (body.size() < 4 || body.substr(body.size() - 4) != "end\n")
    fail(path + ": truncated file (missing end marker)");

  std::istringstream is(body);
  auto body_line = [&](const char* what) -> std::string& {
    if (!std::getline(is, line)) fail(path + ": truncated file (missing " + what + ")");
    return line;
  };

  const std::string mode = expect_key(body_line("mode"), "mode");
  if (mode != "linear" && mode != "gaussian-reduced")
    fail(path + ": unknown mode '" + mode + "'");
  const std::size_t n = std::stoull(expect_key(body_line("n"), "n"));
  const std::size_t r = std::stoull(expect_key(body_line("r"), "r"));
  const double mu = parse_real(path, expect_key(body_line("mu"), "mu"));
  const std::size_t ref_rows = std::stoull(
      expect_key(body_line("reference_points"), "reference_points"));
  if (ref_rows != r) fail(path + ": reference_points count disagrees with r");

  TwinModel model;
  if (mode == "gaussian-reduced") {
    std::vector<double> ref;
    ref.reserve(r * n);
    for (std::size_t i = 0; i < r; ++i) {
      std::istringstream row(body_line("reference point row"));
      std::string tok;
      std::size_t count = 0;
      while (row >> tok) {
        ref.push_back(parse_real(path, tok));
        ++count;
      }
      if (count != n) fail(path + ": reference point row has wrong arity");
    }
    model.kernel = make_gaussian(mu, n, std::move(ref));
  } else if (r != 0) {
    fail(path + ": linear model with nonzero r");
  }

  auto read_vec = [&](const char* tag) {
    std::istringstream row(expect_key(body_line(tag), tag));
    std::size_t len = 0;
    row >> len;
    std::vector<double> w(len);
    std::string tok;
    for (std::size_t i = 0; i < len; ++i) {
      if (!(row >> tok)) fail(path + ": truncated " + std::string(tag));
      w[i] = parse_real(path, tok);
    }
    return w;
  };
  auto w1 = read_vec("w1");
  const double b1 = parse_real(path, expect_key(body_line("b1"), "b1"));
  auto w2 = read_vec("w2");
  const double b2 = parse_real(path, expect_key(body_line("b2"), "b2"));
  const std::size_t expect_len = mode == "linear" ? n : r;
  if (w1.size() != expect_len || w2.size() != expect_len)
    fail(path + ": weight vector length disagrees with header");
  model.half1 = HalfModel::make(std::move(w1), b1);
  model.half2 = HalfModel::make(std::move(w2), b2);

  std::istringstream meta(expect_key(body_line("meta"), "meta"));
  std::string kv;
  while (meta >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) fail(path + ": malformed meta entry '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    if (key == "config_hash") model.meta.config_hash = std::stoull(val);
    else if (key == "seed") model.meta.seed = std::stoull(val);
    else if (key == "iterations") model.meta.iterations = std::stoull(val);
    else if (key == "converged1") model.meta.converged1 = val == "1";
    else if (key == "converged2") model.meta.converged2 = val == "1";
    else fail(path + ": unknown meta key '" + key + "'");
  }
  return model;
}

}  // namespace twinsgd

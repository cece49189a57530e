#include "twinsgd/trace.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace twinsgd {

namespace {

void append_real(std::string& out, double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  out.append(buf, res.ptr);
}

}  // namespace

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
  out << "t,delta1,delta2,f1,f2\n";
  std::string line;
  for (const TraceRecord& r : trace) {
    line = std::to_string(r.t);
    line.push_back(',');
    append_real(line, r.delta1);
    line.push_back(',');
    append_real(line, r.delta2);
    line.push_back(',');
    if (std::isfinite(r.f1)) append_real(line, r.f1);
    line.push_back(',');
    if (std::isfinite(r.f2)) append_real(line, r.f2);
    line.push_back('\n');
    out << line;
  }
}

}  // namespace twinsgd

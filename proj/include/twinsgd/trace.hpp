#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

namespace twinsgd {

enum class TraceMode {
  None,        // empty trace
  Deltas,      // per-iteration iterate-change norms
  Objectives,  // deltas plus full-batch objective values (O(m*n) per iteration)
};

/// Step-size schedule eta_t; only 1/t is registered, but the hook stays
/// pluggable.
using StepSchedule = double (*)(std::uint64_t t);

inline double inv_t_step(std::uint64_t t) { return 1.0 / static_cast<double>(t); }

/// Per-iteration diagnostics. delta1/delta2 are ||u_{t+1} - u_t|| for the two
/// halves (for PEGASOS: ||dw|| and |db|). f1/f2 hold full objectives when
/// objective tracing is on, NaN otherwise (PEGASOS uses only f1).
struct TraceRecord {
  std::uint64_t t = 0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double f1 = std::numeric_limits<double>::quiet_NaN();
  double f2 = std::numeric_limits<double>::quiet_NaN();
};

/// CSV shape: `t,delta1,delta2,f1,f2` with empty f-fields when objective
/// tracing is disabled.
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);

}  // namespace twinsgd

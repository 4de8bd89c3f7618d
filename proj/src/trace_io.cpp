// Copyright 2026 The moffo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "moffo/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace moffo {

namespace {

void Field(std::ostream& out, double v) {
  out << ',';
  if (std::isnan(v)) return;
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace, bool include_f_diag) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.level << ',' << r.iter << ',' << ToString(r.kind);
    Field(out, r.grad_norm);
    Field(out, r.step_norm);
    Field(out, r.delta_hat_norm);
    Field(out, r.delta_norm);
    Field(out, r.w_min);
    Field(out, r.w_max);
    Field(out, r.cost_cum);
    Field(out, include_f_diag ? r.f_diag : std::nan(""));
    out << '\n';
  }
}

std::string trace_csv(const Trace& trace, bool include_f_diag) {
  std::ostringstream out;
  write_trace_csv(out, trace, include_f_diag);
  return out.str();
}

void write_trace_csv_file(const std::string& path, const Trace& trace, bool include_f_diag) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_trace_csv(out, trace, include_f_diag);
}

}  // namespace moffo

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

// CSV export of iteration traces.

#ifndef MOFFO_TRACE_IO_HPP_
#define MOFFO_TRACE_IO_HPP_

#include <ostream>
#include <string>

#include "moffo/solver.hpp"

namespace moffo {

inline constexpr const char* kTraceHeader =
    "level,iter,kind,grad_norm,step_norm,delta_hat_norm,delta_norm,w_min,w_max,cost_cum,f_diag";

/// One line per record, numbers in shortest round-trip form, NaN as an
/// empty field. With `include_f_diag` false the last column is left empty.
void write_trace_csv(std::ostream& out, const Trace& trace, bool include_f_diag = true);
std::string trace_csv(const Trace& trace, bool include_f_diag = true);
void write_trace_csv_file(const std::string& path, const Trace& trace, bool include_f_diag = true);

}  // namespace moffo

#endif  // MOFFO_TRACE_IO_HPP_

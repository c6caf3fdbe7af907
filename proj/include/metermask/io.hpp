// Copyright 2026 The metermask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// File formats: JSON/TOML run configuration, CSV consumption traces with
// carry-forward quantization, the bound-sweep CSV, and the codebook JSON
// dump. Column orders and field names here are contract: golden tests pin
// them.

#ifndef METERMASK_IO_HPP_
#define METERMASK_IO_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "metermask/bounds.hpp"
#include "metermask/codes.hpp"
#include "metermask/types.hpp"

namespace metermask {

// Everything a CLI run needs. unit_scale_kwh converts kWh to integer energy
// units (e.g. 2.1 kWh per unit); step_minutes documents the sampling period.
struct RunConfig {
  SystemConfig system;
  TariffSchedule tariff;
  double unit_scale_kwh = 1.0;
  int step_minutes = 30;
};

// Loads JSON (.json) or TOML (.toml) by extension, with content sniffing as
// a fallback. System fields may be given in integer units (beta, alpha, s0,
// y_min, y_max) or in kWh (beta_kwh, ...), which must divide evenly by
// unit_scale_kwh. Throws kConfig with the offending key on any violation.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json_text(const std::string& text);
RunConfig run_config_from_toml_text(const std::string& text);

// CSV trace: rows "timestamp,kwh" or bare "kwh"; a non-numeric first row is
// treated as a header. Returns kWh per step. Throws kConfig on parse errors.
std::vector<double> load_trace_csv(const std::string& path);

// Carry-forward quantization of a kWh trace into consumption units: the
// running total is floored each step, so the emitted integers conserve the
// cumulative energy to within one unit over the horizon. Throws kInfeasible
// when a quantized step exceeds alpha, kConfig on negative readings.
ConsumptionSeq quantize_trace(const std::vector<double>& kwh,
                              double unit_scale_kwh, Energy alpha);

// Sweep CSV, header exactly:
//   delta,i_inf_lower,i_inf_upper,i_gamma,upper_thm4,single_letter
// Infinite delta prints as "inf"; rows whose solver failed leave i_gamma and
// upper_thm4 empty.
void write_sweep_csv(std::ostream& os, const std::vector<BoundReport>& rows);

// Codebook JSON with fixed field names: n, beta, alpha, s0_lo, s0_hi, l,
// lambda, kappa, log2_size, head, block_keep, block_refill, predicate.
std::string codebook_to_json(const CoveringCodebook& cb);

// Simulation trace CSV, header exactly: step,x,y,state_after
void write_simulation_csv(std::ostream& os, const ConsumptionSeq& x,
                          const RequestSeq& y,
                          const std::vector<Energy>& states);

}  // namespace metermask

#endif  // METERMASK_IO_HPP_

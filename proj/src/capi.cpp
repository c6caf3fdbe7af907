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

#include "metermask/metermask.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include "metermask/bounds.hpp"
#include "metermask/codes.hpp"
#include "metermask/io.hpp"
#include "metermask/model.hpp"
#include "metermask/oracle.hpp"
#include "metermask/tariff.hpp"
#include "metermask/types.hpp"

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Runs fn, translating exceptions into error codes + thread-local message.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MM_OK;
  } catch (const metermask::Error& e) {
    return fail(static_cast<int>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MM_ERR_OTHER, "out of memory");
  } catch (const std::exception& e) {
    return fail(MM_ERR_OTHER, e.what());
  } catch (...) {
    return fail(MM_ERR_OTHER, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mm_bound_row to_row(const metermask::BoundReport& r) {
  mm_bound_row row;
  row.delta = r.delta;
  row.i_inf_lower = r.i_inf_lower;
  row.i_inf_upper = r.i_inf_upper;
  row.i_gamma = r.gamma ? r.gamma->bits_per_step
                        : std::numeric_limits<double>::quiet_NaN();
  const auto u = r.upper_thm4();
  row.upper_thm4 = u ? *u : std::numeric_limits<double>::quiet_NaN();
  row.single_letter = r.single_letter;
  row.delta_max = r.delta_max;
  row.gamma_converged = (r.gamma && r.gamma->converged) ? 1 : 0;
  return row;
}

}  // namespace

struct mm_config {
  metermask::RunConfig rc;
};

struct mm_codebook {
  metermask::CoveringCodebook cb;
};

extern "C" {

const char* mm_version(void) { return "metermask 1.0.0"; }

const char* mm_last_error(void) { return g_last_error.c_str(); }

void mm_string_free(char* s) { std::free(s); }

void mm_buffer_free(void* p) { std::free(p); }

int mm_config_load(const char* path, mm_config** out) {
  if (!path || !out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    auto* h = new mm_config{metermask::load_run_config(path)};
    *out = h;
  });
}

int mm_config_from_json(const char* json_text, mm_config** out) {
  if (!json_text || !out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    auto* h = new mm_config{metermask::run_config_from_json_text(json_text)};
    *out = h;
  });
}

void mm_config_free(mm_config* cfg) { delete cfg; }

int mm_config_info(const mm_config* cfg, mm_system_info* out) {
  if (!cfg || !out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    const metermask::SystemConfig& s = cfg->rc.system;
    out->n = static_cast<int32_t>(s.n);
    out->beta = s.beta;
    out->alpha = s.alpha;
    out->s0 = s.s0;
    out->y_min = s.y_min;
    out->y_max = s.y_max;
    out->unit_scale_kwh = cfg->rc.unit_scale_kwh;
    out->step_minutes = cfg->rc.step_minutes;
    out->tariff_blocks = static_cast<int32_t>(cfg->rc.tariff.blocks.size());
  });
}

int mm_config_prices(const mm_config* cfg, double* prices_out) {
  if (!cfg || !prices_out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    const std::vector<double> m =
        metermask::expand_tariff(cfg->rc.tariff, cfg->rc.system.n);
    std::memcpy(prices_out, m.data(), m.size() * sizeof(double));
  });
}

int mm_bounds_eval(const mm_config* cfg, double delta, double tol,
                   uint64_t seed, mm_bound_row* out) {
  if (!cfg || !out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    const std::vector<metermask::BoundReport> rows = metermask::sweep_bounds(
        cfg->rc.system, cfg->rc.tariff, {delta}, tol, seed);
    *out = to_row(rows.front());
  });
}

int mm_bounds_sweep(const mm_config* cfg, const double* deltas, size_t count,
                    double tol, uint64_t seed, mm_bound_row* rows_out) {
  if (!cfg || !deltas || !rows_out) return fail(MM_ERR_CONFIG, "null argument");
  if (count == 0) return fail(MM_ERR_CONFIG, "empty budget grid");
  return guarded([&] {
    const std::vector<double> grid(deltas, deltas + count);
    const std::vector<metermask::BoundReport> rows =
        metermask::sweep_bounds(cfg->rc.system, cfg->rc.tariff, grid, tol, seed);
    for (size_t i = 0; i < rows.size(); ++i) rows_out[i] = to_row(rows[i]);
  });
}

int mm_bounds_sweep_csv(const mm_config* cfg, const double* deltas,
                        size_t count, double tol, uint64_t seed,
                        char** csv_out) {
  if (!cfg || !deltas || !csv_out) return fail(MM_ERR_CONFIG, "null argument");
  if (count == 0) return fail(MM_ERR_CONFIG, "empty budget grid");
  return guarded([&] {
    const std::vector<double> grid(deltas, deltas + count);
    const std::vector<metermask::BoundReport> rows =
        metermask::sweep_bounds(cfg->rc.system, cfg->rc.tariff, grid, tol, seed);
    std::ostringstream os;
    metermask::write_sweep_csv(os, rows);
    *csv_out = dup_string(os.str());
  });
}

int mm_delta_max(const mm_config* cfg, double* out) {
  if (!cfg || !out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    *out = metermask::delta_max(cfg->rc.system, cfg->rc.tariff);
  });
}

int mm_codebook_build(const mm_config* cfg, mm_codebook** out) {
  if (!cfg || !out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    auto* h = new mm_codebook{metermask::covering_codebook(
        cfg->rc.system, cfg->rc.system.s0, cfg->rc.system.s0)};
    *out = h;
  });
}

void mm_codebook_free(mm_codebook* cb) { delete cb; }

int mm_codebook_kappa(const mm_codebook* cb) {
  if (!cb) return -1;
  return static_cast<int>(cb->cb.kappa);
}

int mm_codebook_json(const mm_codebook* cb, char** json_out) {
  if (!cb || !json_out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] { *json_out = dup_string(metermask::codebook_to_json(cb->cb)); });
}

int mm_codebook_apply(const mm_config* cfg, const mm_codebook* cb, int64_t s0,
                      const int64_t* x, size_t n, int64_t* y_out,
                      int32_t* block_choice_out) {
  if (!cfg || !cb || !x || !y_out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    if (n != static_cast<size_t>(cfg->rc.system.n)) {
      throw metermask::Error(metermask::ErrorKind::kConfig,
                             "trace length != configured n");
    }
    const metermask::ConsumptionSeq xs(x, x + n);
    const metermask::CoveringPolicyRun run =
        metermask::apply_covering_policy(cfg->rc.system, cb->cb, s0, xs);
    for (size_t i = 0; i < n; ++i) y_out[i] = run.y[i];
    if (block_choice_out) {
      for (size_t b = 0; b < run.block_choice.size(); ++b) {
        block_choice_out[b] = run.block_choice[b] ? 1 : 0;
      }
    }
  });
}

int mm_trajectory(const mm_config* cfg, int64_t s0, const int64_t* x,
                  const int64_t* y, size_t n, int64_t* states_out,
                  int32_t* feasible_out) {
  if (!cfg || !x || !y || !states_out || !feasible_out) {
    return fail(MM_ERR_CONFIG, "null argument");
  }
  return guarded([&] {
    if (n != static_cast<size_t>(cfg->rc.system.n)) {
      throw metermask::Error(metermask::ErrorKind::kConfig,
                             "trace length != configured n");
    }
    const metermask::ConsumptionSeq xs(x, x + n);
    const metermask::RequestSeq ys(y, y + n);
    const metermask::BatteryTrajectory t =
        metermask::battery_trajectory(cfg->rc.system, s0, xs, ys);
    for (size_t i = 0; i < t.states.size(); ++i) states_out[i] = t.states[i];
    *feasible_out = metermask::is_feasible(cfg->rc.system, s0, xs, ys) ? 1 : 0;
  });
}

int mm_optimal_bill(const mm_config* cfg, int64_t s0, const int64_t* x,
                    size_t n, int64_t* ystar_out, double* bill_out) {
  if (!cfg || !x || !bill_out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    if (n != static_cast<size_t>(cfg->rc.system.n)) {
      throw metermask::Error(metermask::ErrorKind::kConfig,
                             "trace length != configured n");
    }
    const metermask::ConsumptionSeq xs(x, x + n);
    const metermask::BillResult r =
        metermask::optimal_bill(cfg->rc.system, cfg->rc.tariff, s0, xs);
    if (ystar_out) {
      for (size_t i = 0; i < n; ++i) ystar_out[i] = r.y[i];
    }
    *bill_out = r.bill;
  });
}

int mm_load_trace(const char* path, double** kwh_out, size_t* count_out) {
  if (!path || !kwh_out || !count_out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    const std::vector<double> kwh = metermask::load_trace_csv(path);
    double* buf = static_cast<double*>(std::malloc(
        std::max<size_t>(1, kwh.size()) * sizeof(double)));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, kwh.data(), kwh.size() * sizeof(double));
    *kwh_out = buf;
    *count_out = kwh.size();
  });
}

int mm_quantize(const mm_config* cfg, const double* kwh, size_t count,
                int64_t* x_out) {
  if (!cfg || !kwh || !x_out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    const std::vector<double> in(kwh, kwh + count);
    const metermask::ConsumptionSeq x = metermask::quantize_trace(
        in, cfg->rc.unit_scale_kwh, cfg->rc.system.alpha);
    for (size_t i = 0; i < x.size(); ++i) x_out[i] = x[i];
  });
}

int mm_oracle_bracket(const mm_config* cfg, double delta,
                      int32_t grid_resolution, uint64_t seed, double* upper_out,
                      double* lower_out) {
  if (!cfg || !upper_out || !lower_out) return fail(MM_ERR_CONFIG, "null argument");
  return guarded([&] {
    std::optional<metermask::TariffSchedule> tariff;
    if (std::isfinite(delta)) tariff = cfg->rc.tariff;
    const metermask::LeakageBracket b = metermask::exact_min_worstcase_leakage(
        cfg->rc.system, tariff, delta, grid_resolution, seed);
    *upper_out = b.upper_bits_per_step;
    *lower_out = b.lower_bits_per_step;
  });
}

}  // extern "C"

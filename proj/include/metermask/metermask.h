/* Copyright 2026 The metermask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the metermask shared library.
 *
 * Conventions:
 *   - Every function returns MM_OK (0) on success or an MM_ERR_* code; the
 *     message for the most recent failure on this thread is available from
 *     mm_last_error().
 *   - Objects are opaque handles created by *_build/_load functions and
 *     released by the matching *_free. Passing NULL where an object is
 *     required yields MM_ERR_CONFIG.
 *   - Callers own output buffers. Array sizes derive from mm_config_info
 *     (n, tariff_blocks) or mm_codebook_kappa. Strings/buffers returned via
 *     out-pointers are released with mm_string_free / mm_buffer_free.
 */

#ifndef METERMASK_H_
#define METERMASK_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define MM_OK 0
#define MM_ERR_OTHER 1
#define MM_ERR_CONFIG 2
#define MM_ERR_INFEASIBLE 3
#define MM_ERR_SOLVER 4

typedef struct mm_config mm_config;
typedef struct mm_codebook mm_codebook;

const char* mm_version(void);

/* Message for the most recent error on the calling thread ("" if none). */
const char* mm_last_error(void);

void mm_string_free(char* s);
void mm_buffer_free(void* p);

/* ---- configuration ---------------------------------------------------- */

int mm_config_load(const char* path, mm_config** out);
int mm_config_from_json(const char* json_text, mm_config** out);
void mm_config_free(mm_config* cfg);

typedef struct {
  int32_t n;
  int64_t beta;
  int64_t alpha;
  int64_t s0;
  int64_t y_min;
  int64_t y_max;
  double unit_scale_kwh;
  int32_t step_minutes;
  int32_t tariff_blocks;
} mm_system_info;

int mm_config_info(const mm_config* cfg, mm_system_info* out);

/* Per-step prices; prices_out must hold n doubles. */
int mm_config_prices(const mm_config* cfg, double* prices_out);

/* ---- bounds ------------------------------------------------------------ */

typedef struct {
  double delta;         /* may be +infinity */
  double i_inf_lower;
  double i_inf_upper;
  double i_gamma;       /* NaN when the solver failed for this row */
  double upper_thm4;    /* i_inf_upper + i_gamma; NaN when solver failed */
  double single_letter;
  double delta_max;
  int32_t gamma_converged;
} mm_bound_row;

int mm_bounds_eval(const mm_config* cfg, double delta, double tol,
                   uint64_t seed, mm_bound_row* out);

/* Evaluates an ascending grid; rows carry the running i_gamma minimum
 * forward, so the emitted columns are monotone non-increasing. rows_out
 * must hold `count` entries. */
int mm_bounds_sweep(const mm_config* cfg, const double* deltas, size_t count,
                    double tol, uint64_t seed, mm_bound_row* rows_out);

/* Same sweep rendered as the documented CSV (header
 * delta,i_inf_lower,i_inf_upper,i_gamma,upper_thm4,single_letter). */
int mm_bounds_sweep_csv(const mm_config* cfg, const double* deltas,
                        size_t count, double tol, uint64_t seed,
                        char** csv_out);

int mm_delta_max(const mm_config* cfg, double* out);

/* ---- covering codebook / policy ---------------------------------------- */

int mm_codebook_build(const mm_config* cfg, mm_codebook** out);
void mm_codebook_free(mm_codebook* cb);
int mm_codebook_kappa(const mm_codebook* cb); /* log2 codebook size, or -1 */
int mm_codebook_json(const mm_codebook* cb, char** json_out);

/* Runs the covering policy. y_out must hold n entries; block_choice_out is
 * optional (kappa entries, 0 = keep codeword, 1 = refill codeword). */
int mm_codebook_apply(const mm_config* cfg, const mm_codebook* cb, int64_t s0,
                      const int64_t* x, size_t n, int64_t* y_out,
                      int32_t* block_choice_out);

/* ---- model / billing ---------------------------------------------------- */

/* states_out must hold n+1 entries; feasible_out receives 0/1. */
int mm_trajectory(const mm_config* cfg, int64_t s0, const int64_t* x,
                  const int64_t* y, size_t n, int64_t* states_out,
                  int32_t* feasible_out);

/* Cheapest feasible request sequence for x. ystar_out (n entries) may be
 * NULL when only the bill is needed. */
int mm_optimal_bill(const mm_config* cfg, int64_t s0, const int64_t* x,
                    size_t n, int64_t* ystar_out, double* bill_out);

/* ---- traces ------------------------------------------------------------- */

int mm_load_trace(const char* path, double** kwh_out, size_t* count_out);

/* Carry-forward quantization into consumption units; x_out holds count
 * entries. MM_ERR_INFEASIBLE when a quantized step exceeds alpha. */
int mm_quantize(const mm_config* cfg, const double* kwh, size_t count,
                int64_t* x_out);

/* ---- oracle ------------------------------------------------------------- */

/* Exact-leakage bracket on a tiny instance (n <= 3, beta <= 2, alpha <= 1).
 * Pass an infinite delta for the unconstrained problem. */
int mm_oracle_bracket(const mm_config* cfg, double delta,
                      int32_t grid_resolution, uint64_t seed, double* upper_out,
                      double* lower_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* METERMASK_H_ */

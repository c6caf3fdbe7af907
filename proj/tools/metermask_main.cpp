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
// Command-line front end. Talks to the library exclusively through the C API
// in metermask/metermask.h; exit codes mirror the API error codes
// (0 ok, 2 config, 3 infeasible, 4 solver, 1 other).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "metermask/metermask.h"

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;

struct ConfigDeleter {
  void operator()(mm_config* c) const { mm_config_free(c); }
};
using ConfigPtr = std::unique_ptr<mm_config, ConfigDeleter>;

struct CodebookDeleter {
  void operator()(mm_codebook* c) const { mm_codebook_free(c); }
};
using CodebookPtr = std::unique_ptr<mm_codebook, CodebookDeleter>;

int fail_api(int rc) {
  std::cerr << "error: " << mm_last_error() << "\n";
  return rc;
}

int fail_config(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kExitConfig;
}

ConfigPtr load_config(const std::string& path, int* rc_out) {
  mm_config* raw = nullptr;
  const int rc = mm_config_load(path.c_str(), &raw);
  *rc_out = rc;
  return ConfigPtr(raw);
}

bool parse_double(const std::string& s, double* out) {
  if (s == "inf" || s == "+inf" || s == "infinity") {
    *out = std::numeric_limits<double>::infinity();
    return true;
  }
  try {
    std::size_t used = 0;
    *out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

// Grid specs: "auto" (25 points spanning [0, delta_max]), "lo:hi:count",
// or a comma-separated list. Values may be "inf".
int parse_grid(const std::string& spec, const mm_config* cfg,
               std::vector<double>* out) {
  out->clear();
  if (spec == "auto") {
    double dmax = 0.0;
    const int rc = mm_delta_max(cfg, &dmax);
    if (rc != MM_OK) return fail_api(rc);
    if (dmax <= 0) {
      out->push_back(0.0);
      return MM_OK;
    }
    const int count = 25;
    for (int i = 0; i < count; ++i) {
      out->push_back(dmax * static_cast<double>(i) / (count - 1));
    }
    return MM_OK;
  }
  const std::size_t c1 = spec.find(':');
  if (c1 != std::string::npos) {
    const std::size_t c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos) {
      return fail_config("grid spec must be lo:hi:count, a comma list, or auto");
    }
    double lo = 0.0, hi = 0.0;
    long count = 0;
    if (!parse_double(spec.substr(0, c1), &lo) ||
        !parse_double(spec.substr(c1 + 1, c2 - c1 - 1), &hi)) {
      return fail_config("cannot parse grid endpoints in '" + spec + "'");
    }
    try {
      count = std::stol(spec.substr(c2 + 1));
    } catch (const std::exception&) {
      return fail_config("cannot parse grid count in '" + spec + "'");
    }
    if (count < 1 || lo > hi || !std::isfinite(lo) || !std::isfinite(hi)) {
      return fail_config("grid spec '" + spec + "' is not a valid range");
    }
    if (count == 1) {
      out->push_back(lo);
      return MM_OK;
    }
    for (long i = 0; i < count; ++i) {
      out->push_back(lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(count - 1));
    }
    return MM_OK;
  }
  std::istringstream is(spec);
  std::string item;
  while (std::getline(is, item, ',')) {
    double v = 0.0;
    if (!parse_double(item, &v)) {
      return fail_config("cannot parse grid value '" + item + "'");
    }
    out->push_back(v);
  }
  if (out->empty()) return fail_config("empty budget grid");
  return MM_OK;
}

// Writes text to `path`, or to the fallback stream when path is empty.
int write_text(const std::string& path, const std::string& text,
               std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return MM_OK;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) return fail_config("cannot write '" + path + "'");
  f << text;
  return MM_OK;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// ----- subcommands ----------------------------------------------------------

int cmd_bounds(const std::string& config_path, const std::string& grid_spec,
               const std::string& out_path, double tol, std::uint64_t seed) {
  int rc = MM_OK;
  ConfigPtr cfg = load_config(config_path, &rc);
  if (rc != MM_OK) return fail_api(rc);

  std::vector<double> grid;
  rc = parse_grid(grid_spec, cfg.get(), &grid);
  if (rc != MM_OK) return rc;

  char* csv = nullptr;
  rc = mm_bounds_sweep_csv(cfg.get(), grid.data(), grid.size(), tol, seed, &csv);
  if (rc != MM_OK) return fail_api(rc);
  const std::string csv_text(csv);
  mm_string_free(csv);

  rc = write_text(out_path, csv_text, std::cout);
  if (rc != MM_OK) return rc;

  // Headline: the zero-budget single-letter value, when the grid starts there.
  std::vector<mm_bound_row> rows(grid.size());
  const int rc2 = mm_bounds_sweep(cfg.get(), grid.data(), grid.size(), tol,
                                  seed, rows.data());
  if (rc2 == MM_OK && !rows.empty() && rows.front().delta == 0.0) {
    std::ostream& os = out_path.empty() ? std::cerr : std::cout;
    os << "single-letter bound at delta=0: " << fmt_g(rows.front().single_letter)
       << " bits/step\n";
  }
  return MM_OK;
}

int cmd_simulate(const std::string& config_path, const std::string& trace_path,
                 const std::string& out_path) {
  int rc = MM_OK;
  ConfigPtr cfg = load_config(config_path, &rc);
  if (rc != MM_OK) return fail_api(rc);
  mm_system_info info;
  rc = mm_config_info(cfg.get(), &info);
  if (rc != MM_OK) return fail_api(rc);

  double* kwh = nullptr;
  std::size_t count = 0;
  rc = mm_load_trace(trace_path.c_str(), &kwh, &count);
  if (rc != MM_OK) return fail_api(rc);
  std::vector<double> kwh_vec(kwh, kwh + count);
  mm_buffer_free(kwh);
  if (count != static_cast<std::size_t>(info.n)) {
    return fail_config("trace has " + std::to_string(count) + " steps, config n=" +
                       std::to_string(info.n));
  }

  std::vector<std::int64_t> x(count);
  rc = mm_quantize(cfg.get(), kwh_vec.data(), count, x.data());
  if (rc != MM_OK) return fail_api(rc);

  mm_codebook* cb_raw = nullptr;
  rc = mm_codebook_build(cfg.get(), &cb_raw);
  if (rc != MM_OK) return fail_api(rc);
  CodebookPtr cb(cb_raw);
  const int kappa = mm_codebook_kappa(cb.get());

  std::vector<std::int64_t> y(count);
  std::vector<std::int32_t> choice(static_cast<std::size_t>(kappa) + 1, 0);
  rc = mm_codebook_apply(cfg.get(), cb.get(), info.s0, x.data(), count, y.data(),
                         choice.data());
  if (rc != MM_OK) return fail_api(rc);

  std::vector<std::int64_t> states(count + 1);
  std::int32_t feasible = 0;
  rc = mm_trajectory(cfg.get(), info.s0, x.data(), y.data(), count,
                     states.data(), &feasible);
  if (rc != MM_OK) return fail_api(rc);

  std::vector<double> prices(count);
  rc = mm_config_prices(cfg.get(), prices.data());
  if (rc != MM_OK) return fail_api(rc);
  double bill = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    bill += prices[i] * static_cast<double>(y[i]);
  }
  double bill_opt = 0.0;
  rc = mm_optimal_bill(cfg.get(), info.s0, x.data(), count, nullptr, &bill_opt);
  if (rc != MM_OK) return fail_api(rc);

  std::ostringstream csv;
  csv << "step,x,y,state_after\n";
  for (std::size_t i = 0; i < count; ++i) {
    csv << i << ',' << x[i] << ',' << y[i] << ',' << states[i + 1] << '\n';
  }
  rc = write_text(out_path, csv.str(), std::cout);
  if (rc != MM_OK) return rc;

  std::ostream& os = out_path.empty() ? std::cerr : std::cout;
  os << "feasible: " << (feasible ? "yes" : "no") << "\n";
  os << "leaked-bits budget: " << kappa << " bits/day (log2 codebook size)\n";
  os << "block choices:";
  for (int b = 0; b < kappa; ++b) {
    os << ' ' << (choice[static_cast<std::size_t>(b)] ? "refill" : "keep");
  }
  os << "\nbill: " << fmt_g(bill) << "\n";
  os << "optimal bill: " << fmt_g(bill_opt) << "\n";
  os << "excess cost g: " << fmt_g(bill - bill_opt) << "\n";
  return MM_OK;
}

int cmd_bill(const std::string& config_path, const std::string& trace_path,
             const std::string& out_path) {
  int rc = MM_OK;
  ConfigPtr cfg = load_config(config_path, &rc);
  if (rc != MM_OK) return fail_api(rc);
  mm_system_info info;
  rc = mm_config_info(cfg.get(), &info);
  if (rc != MM_OK) return fail_api(rc);

  double* kwh = nullptr;
  std::size_t count = 0;
  rc = mm_load_trace(trace_path.c_str(), &kwh, &count);
  if (rc != MM_OK) return fail_api(rc);
  std::vector<double> kwh_vec(kwh, kwh + count);
  mm_buffer_free(kwh);
  if (count != static_cast<std::size_t>(info.n)) {
    return fail_config("trace has " + std::to_string(count) + " steps, config n=" +
                       std::to_string(info.n));
  }

  std::vector<std::int64_t> x(count);
  rc = mm_quantize(cfg.get(), kwh_vec.data(), count, x.data());
  if (rc != MM_OK) return fail_api(rc);

  std::vector<std::int64_t> ystar(count);
  double bill = 0.0;
  rc = mm_optimal_bill(cfg.get(), info.s0, x.data(), count, ystar.data(), &bill);
  if (rc != MM_OK) return fail_api(rc);

  std::vector<double> prices(count);
  rc = mm_config_prices(cfg.get(), prices.data());
  if (rc != MM_OK) return fail_api(rc);
  double naive = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    naive += prices[i] * static_cast<double>(x[i]);
  }
  double dmax = 0.0;
  rc = mm_delta_max(cfg.get(), &dmax);
  if (rc != MM_OK) return fail_api(rc);

  std::ostringstream os;
  os << "optimal bill: " << fmt_g(bill) << "\n";
  os << "bill without battery: " << fmt_g(naive) << "\n";
  os << "savings: " << fmt_g(naive - bill) << "\n";
  os << "budget headroom delta_max: " << fmt_g(dmax) << "\n";
  os << "y*:";
  for (std::size_t i = 0; i < count; ++i) os << ' ' << ystar[i];
  os << "\n";
  return write_text(out_path, os.str(), std::cout);
}

int cmd_oracle(const std::string& config_path, const std::string& grid_spec,
               const std::string& out_path, std::uint64_t seed) {
  int rc = MM_OK;
  ConfigPtr cfg = load_config(config_path, &rc);
  if (rc != MM_OK) return fail_api(rc);

  double delta = std::numeric_limits<double>::infinity();
  if (!grid_spec.empty() && grid_spec != "auto") {
    std::vector<double> grid;
    rc = parse_grid(grid_spec, cfg.get(), &grid);
    if (rc != MM_OK) return rc;
    if (grid.size() != 1) {
      return fail_config("oracle takes a single budget value, not a grid");
    }
    delta = grid.front();
  }

  double upper = 0.0, lower = 0.0;
  rc = mm_oracle_bracket(cfg.get(), delta, 4, seed, &upper, &lower);
  if (rc != MM_OK) return fail_api(rc);

  // Closed-form bracket for the unconstrained problem, for cross-checking.
  mm_bound_row row;
  const double inf = std::numeric_limits<double>::infinity();
  rc = mm_bounds_eval(cfg.get(), inf, 1e-6, seed, &row);
  if (rc != MM_OK) return fail_api(rc);

  const bool consistent = lower <= row.i_inf_upper + 1e-9 &&
                          row.i_inf_lower <= upper + 1e-9;
  std::ostringstream os;
  os << "exact bracket: [" << fmt_g(lower) << ", " << fmt_g(upper)
     << "] bits/step (delta=" << (std::isfinite(delta) ? fmt_g(delta) : "inf")
     << ")\n";
  os << "closed-form bracket: [" << fmt_g(row.i_inf_lower) << ", "
     << fmt_g(row.i_inf_upper) << "] bits/step\n";
  os << "verdict: " << (consistent ? "PASS" : "FAIL")
     << " (brackets overlap)\n";
  return write_text(out_path, os.str(), std::cout);
}

int cmd_codebook(const std::string& config_path, const std::string& out_path) {
  int rc = MM_OK;
  ConfigPtr cfg = load_config(config_path, &rc);
  if (rc != MM_OK) return fail_api(rc);

  mm_codebook* cb_raw = nullptr;
  rc = mm_codebook_build(cfg.get(), &cb_raw);
  if (rc != MM_OK) return fail_api(rc);
  CodebookPtr cb(cb_raw);

  char* json = nullptr;
  rc = mm_codebook_json(cb.get(), &json);
  if (rc != MM_OK) return fail_api(rc);
  std::string text(json);
  mm_string_free(json);
  text += "\n";
  return write_text(out_path, text, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"battery-policy privacy bounds and simulation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string trace_path;
  std::string grid_spec = "auto";
  std::string out_path;
  std::uint64_t seed = 0x5eed;
  double tol = 1e-6;

  auto* bounds = app.add_subcommand("bounds", "evaluate the bound sweep as CSV");
  bounds->add_option("--config", config_path, "run configuration (JSON or TOML)")
      ->required();
  bounds->add_option("--delta-grid", grid_spec,
                     "budget grid: auto | lo:hi:count | v1,v2,...");
  bounds->add_option("--out", out_path, "output CSV path (default stdout)");
  bounds->add_option("--seed", seed, "solver restart seed");
  bounds->add_option("--tol", tol, "solver tolerance in bits");

  auto* simulate =
      app.add_subcommand("simulate", "run the covering policy on a trace");
  simulate->add_option("--config", config_path, "run configuration")->required();
  simulate->add_option("--trace", trace_path, "consumption trace CSV")->required();
  simulate->add_option("--out", out_path, "output CSV path (default stdout)");

  auto* bill = app.add_subcommand("bill", "cheapest feasible request for a trace");
  bill->add_option("--config", config_path, "run configuration")->required();
  bill->add_option("--trace", trace_path, "consumption trace CSV")->required();
  bill->add_option("--out", out_path, "output path (default stdout)");

  auto* oracle =
      app.add_subcommand("oracle", "exact leakage bracket on a tiny instance");
  oracle->add_option("--config", config_path, "run configuration")->required();
  oracle->add_option("--delta-grid", grid_spec,
                     "single budget value (default unconstrained)");
  oracle->add_option("--out", out_path, "output path (default stdout)");
  oracle->add_option("--seed", seed, "search seed");

  auto* codebook = app.add_subcommand("codebook", "emit the covering codebook JSON");
  codebook->add_option("--config", config_path, "run configuration")->required();
  codebook->add_option("--out", out_path, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bounds->parsed()) return cmd_bounds(config_path, grid_spec, out_path, tol, seed);
    if (simulate->parsed()) return cmd_simulate(config_path, trace_path, out_path);
    if (bill->parsed()) return cmd_bill(config_path, trace_path, out_path);
    if (oracle->parsed()) {
      const std::string spec = oracle->count("--delta-grid") ? grid_spec : "";
      return cmd_oracle(config_path, spec, out_path, seed);
    }
    if (codebook->parsed()) return cmd_codebook(config_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}

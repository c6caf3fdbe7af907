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

#include "metermask/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "metermask/model.hpp"

namespace metermask {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// ----- JSON -> RunConfig ----------------------------------------------------

Energy require_int(const Json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw Error(ErrorKind::kConfig, "field '" + key + "' must be an integer");
  }
  return v.get<Energy>();
}

// Reads `key` (integer units) or `key_kwh` (divided by unit_scale_kwh, must
// land on an integer). Returns fallback when neither is present.
Energy read_energy(const Json& j, const std::string& key, double unit,
                   std::optional<Energy> fallback) {
  const std::string kwh_key = key + "_kwh";
  const bool has_u = j.contains(key);
  const bool has_k = j.contains(kwh_key);
  if (has_u && has_k) {
    throw Error(ErrorKind::kConfig,
                "give '" + key + "' or '" + kwh_key + "', not both");
  }
  if (has_u) return require_int(j.at(key), key);
  if (has_k) {
    if (!j.at(kwh_key).is_number()) {
      throw Error(ErrorKind::kConfig, "field '" + kwh_key + "' must be a number");
    }
    const double v = j.at(kwh_key).get<double>();
    const double q = v / unit;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) {
      throw Error(ErrorKind::kConfig, "field '" + kwh_key + "' (" + fmt_g(v) +
                                          " kWh) is not a whole number of " +
                                          fmt_g(unit) + " kWh units");
    }
    return static_cast<Energy>(std::llround(r));
  }
  if (fallback) return *fallback;
  throw Error(ErrorKind::kConfig,
              "missing field '" + key + "' (or '" + kwh_key + "')");
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) {
    throw Error(ErrorKind::kConfig, "configuration root must be an object");
  }
  RunConfig rc;
  if (j.contains("unit_scale_kwh")) {
    if (!j.at("unit_scale_kwh").is_number()) {
      throw Error(ErrorKind::kConfig, "field 'unit_scale_kwh' must be a number");
    }
    rc.unit_scale_kwh = j.at("unit_scale_kwh").get<double>();
  }
  if (!(rc.unit_scale_kwh > 0)) {
    throw Error(ErrorKind::kConfig, "field 'unit_scale_kwh' must be positive");
  }
  if (j.contains("step_minutes")) {
    rc.step_minutes = static_cast<int>(require_int(j.at("step_minutes"), "step_minutes"));
    if (rc.step_minutes < 1) {
      throw Error(ErrorKind::kConfig, "field 'step_minutes' must be >= 1");
    }
  }

  if (!j.contains("n")) throw Error(ErrorKind::kConfig, "missing field 'n'");
  rc.system.n = require_int(j.at("n"), "n");
  const double u = rc.unit_scale_kwh;
  rc.system.beta = read_energy(j, "beta", u, std::nullopt);
  rc.system.alpha = read_energy(j, "alpha", u, std::nullopt);
  rc.system.s0 = read_energy(j, "s0", u, Energy{0});
  rc.system.y_min = read_energy(j, "y_min", u, Energy{0});
  rc.system.y_max = read_energy(j, "y_max", u, rc.system.alpha);

  if (!j.contains("tariff") || !j.at("tariff").is_object() ||
      !j.at("tariff").contains("blocks") || !j.at("tariff").at("blocks").is_array()) {
    throw Error(ErrorKind::kConfig, "missing 'tariff.blocks' array");
  }
  for (const Json& b : j.at("tariff").at("blocks")) {
    if (!b.is_object() || !b.contains("price") || !b.contains("length")) {
      throw Error(ErrorKind::kConfig,
                  "each tariff block needs 'price' and 'length'");
    }
    if (!b.at("price").is_number()) {
      throw Error(ErrorKind::kConfig, "field 'price' must be a number");
    }
    TariffBlock blk;
    blk.price = b.at("price").get<double>();
    blk.length = static_cast<int>(require_int(b.at("length"), "length"));
    rc.tariff.blocks.push_back(blk);
  }

  validate_config(rc.system);
  expand_tariff(rc.tariff, rc.system.n);  // lengths must tile the horizon
  return rc;
}

// ----- minimal TOML reader --------------------------------------------------
//
// Supports the subset these configs use: comments, [table] and
// [[array-of-tables]] headers with dotted paths, and scalar values (integer,
// float, string, boolean) plus flat arrays of scalars.

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_path(const std::string& s, int line_no) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == '.') {
      if (cur.empty()) {
        throw Error(ErrorKind::kConfig,
                    "toml line " + std::to_string(line_no) + ": empty key segment");
      }
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cur = trim(cur);
  if (cur.empty()) {
    throw Error(ErrorKind::kConfig,
                "toml line " + std::to_string(line_no) + ": empty key segment");
  }
  parts.push_back(cur);
  return parts;
}

Json parse_toml_scalar(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (v.empty()) {
    throw Error(ErrorKind::kConfig,
                "toml line " + std::to_string(line_no) + ": missing value");
  }
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') {
      throw Error(ErrorKind::kConfig,
                  "toml line " + std::to_string(line_no) + ": unterminated string");
    }
    return Json(v.substr(1, v.size() - 2));
  }
  if (v == "true") return Json(true);
  if (v == "false") return Json(false);
  if (v.front() == '[') {
    if (v.back() != ']') {
      throw Error(ErrorKind::kConfig,
                  "toml line " + std::to_string(line_no) + ": unterminated array");
    }
    Json arr = Json::array();
    std::string inner = v.substr(1, v.size() - 2);
    std::string item;
    std::istringstream is(inner);
    while (std::getline(is, item, ',')) {
      if (!trim(item).empty()) arr.push_back(parse_toml_scalar(item, line_no));
    }
    return arr;
  }
  // Number: integer unless it carries a fraction or exponent.
  const bool floaty = v.find_first_of(".eE") != std::string::npos;
  try {
    std::size_t used = 0;
    if (floaty) {
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return Json(d);
    }
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return Json(i);
  } catch (const std::exception&) {
    throw Error(ErrorKind::kConfig, "toml line " + std::to_string(line_no) +
                                        ": cannot parse value '" + v + "'");
  }
}

Json toml_to_json(const std::string& text) {
  Json root = Json::object();
  Json* cur = &root;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    // Strip comments outside of strings.
    bool in_str = false;
    std::string clean;
    for (char c : line) {
      if (c == '"') in_str = !in_str;
      if (c == '#' && !in_str) break;
      clean += c;
    }
    clean = trim(clean);
    if (clean.empty()) continue;

    if (clean.size() >= 4 && clean.front() == '[' && clean[1] == '[') {
      if (clean.substr(clean.size() - 2) != "]]") {
        throw Error(ErrorKind::kConfig,
                    "toml line " + std::to_string(line_no) + ": malformed table array");
      }
      const auto path = split_path(clean.substr(2, clean.size() - 4), line_no);
      Json* node = &root;
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        node = &(*node)[path[k]];
        if (node->is_null()) *node = Json::object();
      }
      Json& arr = (*node)[path.back()];
      if (arr.is_null()) arr = Json::array();
      arr.push_back(Json::object());
      cur = &arr.back();
      continue;
    }
    if (clean.front() == '[') {
      if (clean.back() != ']') {
        throw Error(ErrorKind::kConfig,
                    "toml line " + std::to_string(line_no) + ": malformed table header");
      }
      const auto path = split_path(clean.substr(1, clean.size() - 2), line_no);
      Json* node = &root;
      for (const std::string& part : path) {
        node = &(*node)[part];
        if (node->is_null()) *node = Json::object();
      }
      cur = node;
      continue;
    }
    const std::size_t eq = clean.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kConfig,
                  "toml line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(clean.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorKind::kConfig,
                  "toml line " + std::to_string(line_no) + ": empty key");
    }
    (*cur)[key] = parse_toml_scalar(clean.substr(eq + 1), line_no);
  }
  return root;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kConfig, "cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool parses_as_double(const std::string& s, double* out) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && (s[used] == ' ' || s[used] == '\t' || s[used] == '\r')) ++used;
    if (used != s.size()) return false;
    *out = v;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

RunConfig run_config_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("json parse error: ") + e.what());
  }
  return run_config_from_json(j);
}

RunConfig run_config_from_toml_text(const std::string& text) {
  return run_config_from_json(toml_to_json(text));
}

RunConfig load_run_config(const std::string& path) {
  const std::string text = read_file(path);
  auto ends_with = [&](const std::string& suf) {
    return path.size() >= suf.size() &&
           path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with(".json")) return run_config_from_json_text(text);
  if (ends_with(".toml")) return run_config_from_toml_text(text);
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return run_config_from_json_text(text);
  }
  return run_config_from_toml_text(text);
}

std::vector<double> load_trace_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream is(text);
  std::string line;
  std::vector<double> kwh;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string clean = trim(line);
    if (clean.empty()) continue;
    // The reading is the last comma-separated field (rows may carry a
    // leading timestamp column).
    const std::size_t comma = clean.find_last_of(',');
    const std::string field =
        trim(comma == std::string::npos ? clean : clean.substr(comma + 1));
    double v = 0.0;
    if (!parses_as_double(field, &v)) {
      if (kwh.empty() && line_no == 1) continue;  // header row
      throw Error(ErrorKind::kConfig, "trace line " + std::to_string(line_no) +
                                          ": cannot parse reading '" + field + "'");
    }
    kwh.push_back(v);
  }
  return kwh;
}

ConsumptionSeq quantize_trace(const std::vector<double>& kwh,
                              double unit_scale_kwh, Energy alpha) {
  if (!(unit_scale_kwh > 0)) {
    throw Error(ErrorKind::kConfig, "unit_scale_kwh must be positive");
  }
  if (alpha < 1) {
    throw Error(ErrorKind::kConfig, "alpha must be >= 1");
  }
  ConsumptionSeq out;
  out.reserve(kwh.size());
  double acc = 0.0;
  Energy emitted = 0;
  for (std::size_t i = 0; i < kwh.size(); ++i) {
    if (kwh[i] < -1e-12) {
      throw Error(ErrorKind::kConfig,
                  "trace step " + std::to_string(i) + " is negative");
    }
    acc += kwh[i] / unit_scale_kwh;
    // Floor the running total, not the step: the emitted integers then track
    // cumulative energy to within one unit across the horizon. The epsilon
    // keeps exact multiples from landing one unit low.
    const Energy total = static_cast<Energy>(std::floor(acc + 1e-9));
    const Energy step = total - emitted;
    emitted = total;
    if (step > alpha) {
      throw Error(ErrorKind::kInfeasible,
                  "trace step " + std::to_string(i) + " quantizes to " +
                      std::to_string(step) + " > alpha");
    }
    out.push_back(step);
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<BoundReport>& rows) {
  os << "delta,i_inf_lower,i_inf_upper,i_gamma,upper_thm4,single_letter\n";
  for (const BoundReport& r : rows) {
    os << (std::isfinite(r.delta) ? fmt_g(r.delta) : "inf") << ','
       << fmt_g(r.i_inf_lower) << ',' << fmt_g(r.i_inf_upper) << ',';
    if (r.gamma) os << fmt_g(r.gamma->bits_per_step);
    os << ',';
    if (const auto u = r.upper_thm4()) os << fmt_g(*u);
    os << ',' << fmt_g(r.single_letter) << '\n';
  }
}

std::string codebook_to_json(const CoveringCodebook& cb) {
  Json j = Json::object();
  j["n"] = cb.n;
  j["beta"] = cb.beta;
  j["alpha"] = cb.alpha;
  j["s0_lo"] = cb.s0_lo;
  j["s0_hi"] = cb.s0_hi;
  j["l"] = cb.head_len;
  j["lambda"] = cb.lambda;
  j["kappa"] = cb.kappa;
  j["log2_size"] = cb.log2_size();
  j["head"] = cb.head;
  j["block_keep"] = cb.block_keep;
  j["block_refill"] = cb.block_refill;
  j["predicate"] =
      "refill the block unless the battery can carry it: emit block_keep when "
      "state_at_block_start - sum(consumption over the block) >= 0, else "
      "block_refill";
  return j.dump(2);
}

void write_simulation_csv(std::ostream& os, const ConsumptionSeq& x,
                          const RequestSeq& y,
                          const std::vector<Energy>& states) {
  if (y.size() != x.size() || states.size() != x.size() + 1) {
    throw Error(ErrorKind::kConfig, "simulation trace lengths disagree");
  }
  os << "step,x,y,state_after\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << i << ',' << x[i] << ',' << y[i] << ',' << states[i + 1] << '\n';
  }
}

}  // namespace metermask

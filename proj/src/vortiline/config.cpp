#include "vortiline/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vortiline/csvio.hpp"

namespace vortiline {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_int(const std::string& s, long long& out) {
  try {
    std::size_t pos = 0;
    out = std::stoll(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0") {
    out = false;
    return true;
  }
  return false;
}

const char* kKnownKeys[] = {
    "model",          "grid.n",
    "dt",             "cfl",
    "t_end",          "snapshot_interval",
    "nu_h",           "p",
    "output_dir",     "ic.name",
    "rng.seed",       "segment.target_length",
    "segment.trace_mode", "segment.reproject",
    "segment.reseed_interval", "constants.c0",
    "constants.C0",   "constants.Cl",
    "constants.Cu",   "constants.Cw",
    "constants.T",    "monitor.fit_window",
    "appendix.lambdas", "appendix.probes",
    "appendix.rho",   "appendix.delta",
    "appendix.n",
};

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    std::vector<std::string>& errors) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (kv.count(key)) {
      errors.push_back("duplicate key '" + key + "'");
      continue;
    }
    kv[key] = val;
  }
  return kv;
}

RunConfig make_run_config(const std::map<std::string, std::string>& kv) {
  std::vector<std::string> errors;
  RunConfig c;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto want_double = [&](const char* key, double& out, bool positive) {
    if (const std::string* s = get(key)) {
      double v;
      if (!parse_double(*s, v))
        errors.push_back(std::string("key '") + key + "': not a number: '" + *s + "'");
      else if (positive && v <= 0.0)
        errors.push_back(std::string("key '") + key + "': must be > 0");
      else
        out = v;
    }
  };
  auto want_opt = [&](const char* key, std::optional<double>& out) {
    if (const std::string* s = get(key)) {
      double v;
      if (!parse_double(*s, v))
        errors.push_back(std::string("key '") + key + "': not a number: '" + *s + "'");
      else
        out = v;
    }
  };

  // unknown keys (ic.param.* is a free-form namespace validated by the IC factory)
  for (auto& [key, val] : kv) {
    (void)val;
    if (key.rfind("ic.param.", 0) == 0) continue;
    bool known = false;
    for (const char* k : kKnownKeys)
      if (key == k) known = true;
    if (!known) errors.push_back("unknown key '" + key + "'");
  }

  if (const std::string* s = get("model")) {
    if (*s != "sqg" && *s != "euler3d")
      errors.push_back("key 'model': expected sqg or euler3d, got '" + *s + "'");
    else
      c.model = *s;
  }

  if (const std::string* s = get("grid.n")) {
    std::vector<long long> parts;
    std::stringstream ss(*s);
    std::string tok;
    bool ok = true;
    while (std::getline(ss, tok, ',')) {
      long long v;
      if (!parse_int(trim(tok), v) || v < 4) {
        ok = false;
        break;
      }
      parts.push_back(v);
    }
    if (!ok || parts.empty() || parts.size() > 3)
      errors.push_back("key 'grid.n': expected one to three integers >= 4");
    else if (parts.size() == 1)  // one value: square for sqg, cube for euler3d
      c.grid_n = c.model == "euler3d"
                     ? std::array<int, 3>{int(parts[0]), int(parts[0]), int(parts[0])}
                     : std::array<int, 3>{int(parts[0]), int(parts[0]), 1};
    else if (parts.size() == 2)
      c.grid_n = {int(parts[0]), int(parts[1]), 1};
    else
      c.grid_n = {int(parts[0]), int(parts[1]), int(parts[2])};
  }

  if (get("dt") && get("cfl")) errors.push_back("keys 'dt' and 'cfl' are mutually exclusive");
  want_double("dt", c.dt, true);
  want_double("cfl", c.cfl, true);
  if (const std::string* s = get("t_end")) {
    double v;
    if (!parse_double(*s, v) || v < 0.0)
      errors.push_back("key 't_end': must be a number >= 0 (0 = write the initial state only)");
    else
      c.t_end = v;
  }
  want_double("snapshot_interval", c.snapshot_interval, true);
  if (const std::string* s = get("nu_h")) {
    double v;
    if (!parse_double(*s, v) || v < 0.0)
      errors.push_back("key 'nu_h': must be a number >= 0");
    else
      c.nu_h = v;
  }
  if (const std::string* s = get("p")) {
    long long v;
    if (!parse_int(*s, v) || v < 1 || v > 4)
      errors.push_back("key 'p': expected integer in [1,4]");
    else
      c.p = int(v);
  }
  if (const std::string* s = get("output_dir")) c.output_dir = *s;
  if (const std::string* s = get("ic.name")) c.ic_name = *s;
  for (auto& [key, val] : kv) {
    if (key.rfind("ic.param.", 0) != 0) continue;
    double v;
    if (!parse_double(val, v))
      errors.push_back("key '" + key + "': not a number: '" + val + "'");
    else
      c.ic_params[key.substr(9)] = v;
  }
  if (const std::string* s = get("rng.seed")) {
    long long v;
    if (!parse_int(*s, v) || v < 0)
      errors.push_back("key 'rng.seed': expected nonnegative integer");
    else
      c.seed = std::uint64_t(v);
  }
  want_double("segment.target_length", c.segment_target_length, true);
  if (const std::string* s = get("segment.trace_mode")) {
    if (*s != "one-sided" && *s != "both")
      errors.push_back("key 'segment.trace_mode': expected one-sided or both");
    else
      c.segment_trace_mode = *s;
  }
  if (const std::string* s = get("segment.reproject")) {
    bool b;
    if (!parse_bool(*s, b))
      errors.push_back("key 'segment.reproject': expected true or false");
    else
      c.segment_reproject = b;
  }
  if (const std::string* s = get("segment.reseed_interval")) {
    double v;
    if (!parse_double(*s, v) || v < 0.0)
      errors.push_back("key 'segment.reseed_interval': must be a number >= 0");
    else
      c.segment_reseed_interval = v;
  }
  want_opt("constants.c0", c.const_c0);
  want_opt("constants.C0", c.const_C0);
  want_opt("constants.Cl", c.const_Cl);
  want_opt("constants.Cu", c.const_Cu);
  want_double("constants.Cw", c.const_Cw, true);
  want_opt("constants.T", c.monitor_T);
  want_double("monitor.fit_window", c.monitor_fit_window, true);

  if (const std::string* s = get("appendix.lambdas")) {
    std::vector<double> vals;
    std::stringstream ss(*s);
    std::string tok;
    bool ok = true;
    while (std::getline(ss, tok, ',')) {
      double v;
      if (!parse_double(trim(tok), v) || v < 1.0) {
        ok = false;
        break;
      }
      vals.push_back(v);
    }
    if (!ok || vals.empty())
      errors.push_back("key 'appendix.lambdas': expected comma-separated numbers >= 1");
    else
      c.appendix_lambdas = std::move(vals);
  }
  if (const std::string* s = get("appendix.probes")) {
    long long v;
    if (!parse_int(*s, v) || v < 1)
      errors.push_back("key 'appendix.probes': expected integer >= 1");
    else
      c.appendix_probes = int(v);
  }
  if (const std::string* s = get("appendix.rho")) {
    double v;
    if (!parse_double(*s, v) || v <= 0.0 || v >= 3.141592653589793)
      errors.push_back("key 'appendix.rho': must lie in (0, pi)");
    else
      c.appendix_rho = v;
  }
  if (const std::string* s = get("appendix.delta")) {
    double v;
    if (!parse_double(*s, v) || v < 0.0)
      errors.push_back("key 'appendix.delta': must be a number >= 0");
    else
      c.appendix_delta = v;
  }
  if (const std::string* s = get("appendix.n")) {
    long long v;
    if (!parse_int(*s, v) || v < 64)
      errors.push_back("key 'appendix.n': expected integer >= 64");
    else
      c.appendix_n = int(v);
  }

  if (c.const_c0 && (*c.const_c0 <= 0.0 || *c.const_c0 > 1.0))
    errors.push_back("key 'constants.c0': must lie in (0,1]");
  if (c.const_Cw >= 1.0) errors.push_back("key 'constants.Cw': must lie in (0,1)");
  if (c.monitor_fit_window > 1.0)
    errors.push_back("key 'monitor.fit_window': expected fraction in (0,1]");

  if (c.model == "sqg" && c.grid_n[2] != 1)
    errors.push_back("key 'grid.n': sqg runs are 2D (one or two values)");
  if (c.model == "euler3d" && c.grid_n[2] == 1)
    errors.push_back("key 'grid.n': euler3d runs need three values (or one for a cube)");

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  std::vector<std::string> errors;
  auto kv = parse_key_values(text, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return make_run_config(kv);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string RunConfig::canonical_text() const {
  std::map<std::string, std::string> kv;
  kv["model"] = model;
  {
    std::string n = std::to_string(grid_n[0]) + "," + std::to_string(grid_n[1]);
    if (grid_n[2] != 1) n += "," + std::to_string(grid_n[2]);
    kv["grid.n"] = n;
  }
  if (dt > 0.0)
    kv["dt"] = csv_double(dt);
  else
    kv["cfl"] = csv_double(cfl);
  kv["t_end"] = csv_double(t_end);
  kv["snapshot_interval"] = csv_double(snapshot_interval);
  kv["nu_h"] = csv_double(nu_h);
  kv["p"] = std::to_string(p);
  kv["output_dir"] = output_dir;
  if (!ic_name.empty()) kv["ic.name"] = ic_name;
  for (auto& [k, v] : ic_params) kv["ic.param." + k] = csv_double(v);
  kv["rng.seed"] = std::to_string(seed);
  kv["segment.target_length"] = csv_double(segment_target_length);
  kv["segment.trace_mode"] = segment_trace_mode;
  kv["segment.reproject"] = segment_reproject ? "true" : "false";
  kv["segment.reseed_interval"] = csv_double(segment_reseed_interval);
  if (const_c0) kv["constants.c0"] = csv_double(*const_c0);
  if (const_C0) kv["constants.C0"] = csv_double(*const_C0);
  if (const_Cl) kv["constants.Cl"] = csv_double(*const_Cl);
  if (const_Cu) kv["constants.Cu"] = csv_double(*const_Cu);
  kv["constants.Cw"] = csv_double(const_Cw);
  if (monitor_T) kv["constants.T"] = csv_double(*monitor_T);
  kv["monitor.fit_window"] = csv_double(monitor_fit_window);
  {
    std::string ls;
    for (std::size_t i = 0; i < appendix_lambdas.size(); ++i)
      ls += (i ? "," : "") + csv_double(appendix_lambdas[i]);
    kv["appendix.lambdas"] = ls;
  }
  kv["appendix.probes"] = std::to_string(appendix_probes);
  kv["appendix.rho"] = csv_double(appendix_rho);
  kv["appendix.delta"] = csv_double(appendix_delta);
  kv["appendix.n"] = std::to_string(appendix_n);

  std::string out;
  for (auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

}  // namespace vortiline

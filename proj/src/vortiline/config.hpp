#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vortiline {

struct ConfigError : std::runtime_error {
  std::vector<std::string> issues;
  explicit ConfigError(std::vector<std::string> list)
      : std::runtime_error(join(list)), issues(std::move(list)) {}
  static std::string join(const std::vector<std::string>& list) {
    std::string s = "config errors:";
    for (auto& e : list) s += "\n  - " + e;
    return s;
  }
};

// Flat key=value text, '#' comments, dotted keys for grouping.
std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    std::vector<std::string>& errors);

struct RunConfig {
  std::string model = "sqg";  // sqg | euler3d
  std::array<int, 3> grid_n{128, 128, 1};
  double dt = 0.0;   // > 0: fixed step
  double cfl = 0.5;  // used when dt == 0
  double t_end = 1.0;
  double snapshot_interval = 0.1;
  double nu_h = 0.0;  // hyperdiffusion coefficient, 0 = inviscid
  int p = 2;          // (-Laplacian)^p exponent
  std::string output_dir = "out";
  std::string ic_name;
  std::map<std::string, double> ic_params;
  std::uint64_t seed = 1;

  double segment_target_length = 1.0;
  std::string segment_trace_mode = "one-sided";  // one-sided | both
  bool segment_reproject = true;
  double segment_reseed_interval = 0.0;  // 0 = pure material tracking

  std::optional<double> const_c0, const_C0, const_Cl, const_Cu;
  double const_Cw = 0.9;
  std::optional<double> monitor_T;
  double monitor_fit_window = 0.5;  // trailing fraction used by the exponent fit

  // appendix-check: synthetic vortex-tube family and velocity-split sweep
  std::vector<double> appendix_lambdas{1.0, 2.0, 4.0, 8.0, 16.0};
  int appendix_probes = 4;      // probe points per family member
  double appendix_rho = 0.75;   // outer cutoff radius of the split
  double appendix_delta = 0.0;  // inner radius; 0 = automatic
  int appendix_n = 512;         // horizontal grid size for the family

  std::string canonical_text() const;  // sorted key=value form of the effective config
};

// Validates and fills defaults; throws ConfigError listing every problem.
RunConfig make_run_config(const std::map<std::string, std::string>& kv);
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace vortiline

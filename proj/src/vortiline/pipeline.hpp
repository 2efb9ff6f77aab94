#pragma once
#include <string>

#include "vortiline/config.hpp"

namespace vortiline {

// Orchestration entry points behind the CLI subcommands.  Each returns the
// process exit code (0 success, 1 numerical failure, 2 usage/config error)
// and reports problems on stderr.  config_text is echoed verbatim into the
// manifest; command records the invocation.

// run-sqg / run-euler3d: integrate cfg.model from its initial condition,
// writing snap_NNNNNN.vln on the snapshot cadence, series.csv with one row
// per step (plus the initial state), and manifest.json.
int run_solver(const RunConfig& cfg, const std::string& config_text, const std::string& command);

// trace: trace one segment through a snapshot and dump its samples as CSV.
// seed_spec is "x,y" / "x,y,z" or empty for the grid argmax of the field.
int run_trace(const RunConfig& cfg, const std::string& snapshot_path,
              const std::string& seed_spec, const std::string& out_csv);

// diagnose: track a segment materially through the snapshots of a run and
// write diagnostics.csv, identity.csv, envelope.csv, optional monitor.csv,
// report.svg, and diagnose_manifest.json into out_dir.
int run_diagnose(const RunConfig& cfg, const std::string& config_text,
                 const std::string& command, const std::string& snap_dir,
                 const std::string& out_dir);

// appendix-check: sweep the synthetic vortex-tube family, split the velocity
// at probe points, and write appendix_terms.csv, appendix_fit.csv, and
// manifest.json into out_dir.
int run_appendix_check(const RunConfig& cfg, const std::string& config_text,
                       const std::string& command, const std::string& out_dir);

// report: render report.svg from the CSVs found in in_dir (envelope.csv,
// identity.csv, diagnostics.csv; any subset).
int run_report(const std::string& in_dir, const std::string& out_svg);

}  // namespace vortiline

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "vortiline/config.hpp"
#include "vortiline/pipeline.hpp"
#include "vortiline/version.hpp"

namespace {

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += " ";
    s += argv[i];
  }
  return s;
}

bool slurp(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::stringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace vortiline;
  CLI::App app{"vortiline: vortex-line geometry and vorticity-growth toolkit"};
  app.set_version_flag("--version", std::string("vortiline ") + kVersion);
  app.require_subcommand(1);

  std::string config_path, snapshot_path, seed_spec, out_path, in_dir, snap_dir, out_dir;

  CLI::App* c_sqg = app.add_subcommand("run-sqg", "integrate an sqg run from a config file");
  c_sqg->add_option("--config", config_path, "key = value config file")->required();

  CLI::App* c_eul =
      app.add_subcommand("run-euler3d", "integrate a 3d euler run from a config file");
  c_eul->add_option("--config", config_path, "key = value config file")->required();

  CLI::App* c_tr = app.add_subcommand("trace", "trace one segment through a snapshot");
  c_tr->add_option("--snapshot", snapshot_path, "input .vln snapshot")->required();
  c_tr->add_option("--config", config_path, "config file for the segment options");
  c_tr->add_option("--seed", seed_spec, "seed point x,y[,z] (default: field argmax)");
  c_tr->add_option("--output", out_path, "output CSV path")->required();

  CLI::App* c_dg =
      app.add_subcommand("diagnose", "segment diagnostics and growth envelopes over a run");
  c_dg->add_option("--snapshots", snap_dir, "directory holding snap_*.vln")->required();
  c_dg->add_option("--config", config_path,
                   "config file (default: the config embedded in the run manifest)");
  c_dg->add_option("--output-dir", out_dir, "output directory (default: the snapshot dir)");

  CLI::App* c_ax = app.add_subcommand("appendix-check",
                                      "velocity-split sweep over the synthetic vortex family");
  c_ax->add_option("--config", config_path, "config file with appendix.* keys");
  c_ax->add_option("--output-dir", out_dir, "output directory (default: config output_dir)");

  CLI::App* c_rp = app.add_subcommand("report", "render report.svg from diagnose CSVs");
  c_rp->add_option("--input", in_dir, "directory with envelope/identity/diagnostics CSVs")
      ->required();
  c_rp->add_option("--output", out_path, "output SVG path (default: <input>/report.svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string command = join_args(argc, argv);
  try {
    if (app.got_subcommand(c_sqg) || app.got_subcommand(c_eul)) {
      std::string text;
      if (!slurp(config_path, text)) {
        std::cerr << "config error: cannot open config file: " << config_path << "\n";
        return 2;
      }
      RunConfig cfg = parse_config_text(text);
      const std::string want = app.got_subcommand(c_sqg) ? "sqg" : "euler3d";
      if (cfg.model != want) {
        std::cerr << "config error: config sets model = " << cfg.model
                  << "; use 'vortiline run-" << cfg.model << "'\n";
        return 2;
      }
      return run_solver(cfg, text, command);
    }
    if (app.got_subcommand(c_tr)) {
      RunConfig cfg;
      if (!config_path.empty()) cfg = parse_config_file(config_path);
      return run_trace(cfg, snapshot_path, seed_spec, out_path);
    }
    if (app.got_subcommand(c_dg)) {
      std::string text;
      RunConfig cfg;
      if (!config_path.empty()) {
        if (!slurp(config_path, text)) {
          std::cerr << "config error: cannot open config file: " << config_path << "\n";
          return 2;
        }
      } else {
        std::string mpath = snap_dir + "/manifest.json";
        std::ifstream in(mpath, std::ios::binary);
        if (in) {
          try {
            nlohmann::json j = nlohmann::json::parse(in);
            text = j.value("config", "");
          } catch (const std::exception& e) {
            std::cerr << "diagnose: cannot read '" << mpath << "': " << e.what() << "\n";
            return 2;
          }
        }
      }
      if (text.empty())
        text = cfg.canonical_text();
      else
        cfg = parse_config_text(text);
      return run_diagnose(cfg, text, command, snap_dir,
                          out_dir.empty() ? snap_dir : out_dir);
    }
    if (app.got_subcommand(c_ax)) {
      std::string text;
      RunConfig cfg;
      if (!config_path.empty()) {
        if (!slurp(config_path, text)) {
          std::cerr << "config error: cannot open config file: " << config_path << "\n";
          return 2;
        }
        cfg = parse_config_text(text);
      } else {
        text = cfg.canonical_text();
      }
      return run_appendix_check(cfg, text, command,
                                out_dir.empty() ? cfg.output_dir : out_dir);
    }
    if (app.got_subcommand(c_rp))
      return run_report(in_dir, out_path.empty() ? in_dir + "/report.svg" : out_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>

#include "vortiline/config.hpp"
#include "vortiline/csvio.hpp"
#include "vortiline/manifest.hpp"
#include "vortiline/pipeline.hpp"
#include "vortiline/snapshot.hpp"

using namespace vortiline;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "cannot open ", path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(bool(out));
  out << text;
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::path("pipe_out") / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// every regular file under dir, as relative-path -> bytes
std::map<std::string, std::string> dir_bytes(const fs::path& dir) {
  std::map<std::string, std::string> m;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file())
      m[e.path().lexically_relative(dir).generic_string()] = slurp(e.path().string());
  return m;
}

std::string steady_cfg(const std::string& dir, const std::string& extra = "") {
  return "model = sqg\n"
         "grid.n = 64\n"
         "dt = 5e-3\n"
         "t_end = 0.25\n"
         "snapshot_interval = 0.05\n"
         "ic.name = radial-gaussian\n"
         "ic.param.amplitude = 1\n"
         "ic.param.sigma2 = 0.08\n"
         "segment.target_length = 2\n"
         "output_dir = " + dir + "\n" + extra;
}

// one shared steady 64^2 run (50 steps, 6 snapshots) reused by the
// trace/diagnose/report cases below
const std::string& steady_run() {
  static std::string dir = [] {
    std::string d = fresh_dir("steady").generic_string();
    std::string text = steady_cfg(d);
    REQUIRE(run_solver(parse_config_text(text), text, "test run-sqg steady") == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("appendix config keys: parse, validate, round-trip") {
  RunConfig c = parse_config_text(
      "appendix.lambdas = 1,2,4\nappendix.probes = 3\nappendix.rho = 1.25\n"
      "appendix.delta = 0.1\nappendix.n = 128\n");
  REQUIRE(c.appendix_lambdas.size() == 3);
  CHECK(c.appendix_lambdas[2] == 4.0);
  CHECK(c.appendix_probes == 3);
  CHECK(c.appendix_rho == 1.25);
  CHECK(c.appendix_delta == 0.1);
  CHECK(c.appendix_n == 128);

  RunConfig rt = parse_config_text(c.canonical_text());
  CHECK(rt.canonical_text() == c.canonical_text());

  try {
    parse_config_text(
        "appendix.lambdas = 1,zebra\nappendix.probes = 0\nappendix.rho = 4\n"
        "appendix.n = 8\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.issues.size() == 4);
    std::string all = e.what();
    for (const char* k : {"appendix.lambdas", "appendix.probes", "appendix.rho", "appendix.n"})
      CHECK(all.find(k) != std::string::npos);
  }
}

TEST_CASE("t_end = 0 is a valid zero-step request") {
  RunConfig c = parse_config_text("t_end = 0\n");
  CHECK(c.t_end == 0.0);
  CHECK_THROWS_AS(parse_config_text("t_end = -1\n"), ConfigError);
}

TEST_CASE("solver run: snapshots on cadence, series rows, manifest checksums") {
  std::string dir = fresh_dir("solver").generic_string();
  std::string text =
      "model = sqg\ngrid.n = 64\ndt = 2.5e-3\nt_end = 0.05\nsnapshot_interval = 0.025\n"
      "ic.name = radial-gaussian\nic.param.amplitude = 1\nic.param.sigma2 = 0.02\n"
      "output_dir = " + dir + "\n";
  REQUIRE(run_solver(parse_config_text(text), text, "test run-sqg solver") == 0);

  for (const char* f : {"snap_000000.vln", "snap_000001.vln", "snap_000002.vln", "series.csv",
                        "manifest.json"})
    CHECK_MESSAGE(fs::is_regular_file(dir + "/" + f), f);
  CHECK(!fs::exists(dir + "/snap_000003.vln"));

  CsvTable series = read_csv(dir + "/series.csv");
  REQUIRE(series.columns ==
          std::vector<std::string>({"time", "max_grad_perp_theta", "int_theta2", "dt"}));
  REQUIRE(series.rows.size() == 21);  // initial state + 20 steps
  CHECK(series.rows[0][0] == 0.0);
  CHECK(series.rows[0][3] == 0.0);
  CHECK(series.rows.back()[0] == doctest::Approx(0.05).epsilon(1e-12));
  for (std::size_t i = 1; i < series.rows.size(); ++i)
    CHECK(series.rows[i][3] == doctest::Approx(2.5e-3).epsilon(1e-9));
  // steady radial patch: theta^2 integral is conserved to solver accuracy
  CHECK(std::abs(series.rows.back()[2] - series.rows[0][2]) <=
        1e-6 * std::abs(series.rows[0][2]));

  Snapshot last = read_snapshot(dir + "/snap_000002.vln");
  CHECK(last.time == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(last.g.n[0] == 64);
  REQUIRE(last.comps.size() == 1);

  nlohmann::json j = nlohmann::json::parse(slurp(dir + "/manifest.json"));
  CHECK(j["config"].get<std::string>() == text);  // echoed verbatim
  CHECK(j["steps"].get<int>() == 20);
  CHECK(j["sim_time_end"].get<double>() == doctest::Approx(0.05));
  REQUIRE(j["snapshots"].size() == 3);
  CHECK(j["snapshots"][1]["time"].get<double>() == doctest::Approx(0.025));

  // every file in the directory is listed with a correct checksum
  std::map<std::string, std::uint32_t> listed;
  for (const auto& s : j["snapshots"]) listed[s["file"]] = s["crc32"].get<std::uint32_t>();
  for (const auto& o : j["outputs"]) listed[o["file"]] = o["crc32"].get<std::uint32_t>();
  int files_seen = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string name = e.path().filename().string();
    ++files_seen;
    if (name == "manifest.json") continue;
    REQUIRE_MESSAGE(listed.count(name), name, " missing from manifest");
    CHECK(listed[name] == file_crc32(e.path().string()));
  }
  CHECK(files_seen == int(listed.size()) + 1);
}

TEST_CASE("zero-step run writes the initial snapshot only") {
  std::string dir = fresh_dir("zerostep").generic_string();
  std::string text =
      "model = sqg\ngrid.n = 64\ndt = 1e-2\nt_end = 0\n"
      "ic.name = radial-gaussian\nic.param.amplitude = 1\nic.param.sigma2 = 0.02\n"
      "output_dir = " + dir + "\n";
  REQUIRE(run_solver(parse_config_text(text), text, "test zerostep") == 0);
  CHECK(fs::is_regular_file(dir + "/snap_000000.vln"));
  CHECK(!fs::exists(dir + "/snap_000001.vln"));
  CHECK(read_csv(dir + "/series.csv").rows.size() == 1);
  nlohmann::json j = nlohmann::json::parse(slurp(dir + "/manifest.json"));
  CHECK(j["steps"].get<int>() == 0);
  CHECK(j["snapshots"].size() == 1);
}

TEST_CASE("euler solver writes its own series schema") {
  std::string dir = fresh_dir("euler").generic_string();
  std::string text =
      "model = euler3d\ngrid.n = 32\ndt = 1e-2\nt_end = 0.02\nsnapshot_interval = 0.02\n"
      "ic.name = abc\nic.param.amplitude = 1\n"
      "output_dir = " + dir + "\n";
  REQUIRE(run_solver(parse_config_text(text), text, "test run-euler3d") == 0);
  CsvTable series = read_csv(dir + "/series.csv");
  REQUIRE(series.columns ==
          std::vector<std::string>({"time", "max_omega", "kinetic_energy", "helicity", "dt"}));
  REQUIRE(series.rows.size() == 3);
  int ke = series.col("kinetic_energy");
  CHECK(series.rows.back()[std::size_t(ke)] ==
        doctest::Approx(series.rows[0][std::size_t(ke)]).epsilon(1e-8));
  Snapshot s = read_snapshot(dir + "/snap_000001.vln");
  CHECK(s.comps.size() == 3);
  CHECK(s.g.n[2] == 32);
}

TEST_CASE("solver flags numerical failure with exit code 1") {
  std::string dir = fresh_dir("blowup").generic_string();
  std::string text =
      "model = sqg\ngrid.n = 64\ndt = 0.5\nt_end = 40\nsnapshot_interval = 40\n"
      "ic.name = random-band\nic.param.amplitude = 20\nic.param.kmin = 2\n"
      "ic.param.kmax = 10\nrng.seed = 7\n"
      "output_dir = " + dir + "\n";
  REQUIRE(run_solver(parse_config_text(text), text, "test blowup") == 1);
  nlohmann::json j = nlohmann::json::parse(slurp(dir + "/manifest.json"));
  CHECK(j["flags"].contains("numerical_failure"));
}

TEST_CASE("trace dumps curve samples for a snapshot") {
  std::string dir = steady_run();
  std::string csv = dir + "/curve.csv";
  RunConfig cfg = parse_config_text("segment.target_length = 2\n");
  REQUIRE(run_trace(cfg, dir + "/snap_000000.vln", "", csv) == 0);

  CsvTable t = read_csv(csv);
  REQUIRE(t.columns == std::vector<std::string>({"s", "beta", "x", "y", "w", "kappa", "tau",
                                                 "u_xi", "u_xi_perp", "alpha", "flags"}));
  REQUIRE(t.rows.size() > 20);
  int cs = t.col("s"), cw = t.col("w"), ck = t.col("kappa"), cf = t.col("flags");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (i > 0) CHECK(t.rows[i][std::size_t(cs)] > t.rows[i - 1][std::size_t(cs)]);
    CHECK(t.rows[i][std::size_t(cw)] > 0.0);
    CHECK((int(t.rows[i][std::size_t(cf)]) & 4) == 4);  // closed level set
  }
  // the max-gradient contour of the radial patch is a circle: kappa = 1/r
  double r_peak = std::sqrt(0.08);
  std::size_t mid = t.rows.size() / 2;
  CHECK(t.rows[mid][std::size_t(ck)] == doctest::Approx(1.0 / r_peak).epsilon(0.05));

  CHECK(run_trace(cfg, dir + "/snap_000000.vln", "nonsense", csv) == 2);
  CHECK(run_trace(cfg, dir + "/missing.vln", "", csv) == 2);
  fs::remove(csv);  // keep the run directory pristine for the diagnose cases
}

TEST_CASE("diagnose without snapshots exits 2") {
  std::string dir = fresh_dir("empty").generic_string();
  RunConfig cfg;
  CHECK(run_diagnose(cfg, cfg.canonical_text(), "test", dir, dir) == 2);
  CHECK(run_diagnose(cfg, cfg.canonical_text(), "test", dir + "/nosuch", dir) == 2);
}

TEST_CASE("diagnose writes diagnostics, identity, envelope, and the report") {
  std::string dir = steady_run();
  std::string out = fresh_dir("diag").generic_string();
  RunConfig cfg = parse_config_text(steady_cfg(dir));
  REQUIRE(run_diagnose(cfg, steady_cfg(dir), "test diagnose", dir, out) == 0);

  CsvTable dg = read_csv(out + "/diagnostics.csv");
  REQUIRE(dg.rows.size() == 6);
  int cq = dg.col("Q"), cres = dg.col("resolved"), ccmp = dg.col("comparable");
  REQUIRE(cq >= 0);
  for (const auto& r : dg.rows) {
    CHECK(r[std::size_t(cq)] > 0.0);
    CHECK(r[std::size_t(cres)] == 1.0);
    CHECK(r[std::size_t(ccmp)] == 1.0);
  }

  CsvTable id = read_csv(out + "/identity.csv");
  REQUIRE(id.rows.size() == 4);  // interior snapshots of one epoch
  int cr = id.col("relative_residual");
  for (const auto& r : id.rows) CHECK(r[std::size_t(cr)] <= 1e-2);

  CsvTable env = read_csv(out + "/envelope.csv");
  REQUIRE(env.rows.size() == 6);
  int co = env.col("omega"), ce = env.col("env_single"), cd = env.col("dom_single"),
      cfk = env.col("flags_ok");
  for (const auto& r : env.rows) {
    CHECK(r[std::size_t(co)] > 0.0);
    CHECK(r[std::size_t(ce)] >= r[std::size_t(co)]);
    CHECK(r[std::size_t(cd)] == 1.0);
    CHECK(r[std::size_t(cfk)] == 1.0);
  }

  std::string svg = slurp(out + "/report.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  nlohmann::json j = nlohmann::json::parse(slurp(out + "/diagnose_manifest.json"));
  CHECK(j["flags"]["model"] == "sqg");
  CHECK(j["flags"]["identity_triples"] == "4");
  CHECK(j["flags"]["dominated_on_clean"] == "true");
  for (const auto& o : j["outputs"]) {
    std::string f = o["file"].get<std::string>();
    CHECK(file_crc32(out + "/" + f) == o["crc32"].get<std::uint32_t>());
  }
  CHECK(j["outputs"].size() == 4);  // diagnostics, identity, envelope, report

  // a second diagnose of the same inputs is byte-identical
  std::string out2 = fresh_dir("diag2").generic_string();
  REQUIRE(run_diagnose(cfg, steady_cfg(dir), "test diagnose", dir, out2) == 0);
  CHECK(dir_bytes(out) == dir_bytes(out2));
}

TEST_CASE("reseed interval opens new epochs and splits identity triples") {
  std::string dir = steady_run();
  std::string out = fresh_dir("reseed").generic_string();
  std::string text = steady_cfg(dir, "segment.reseed_interval = 0.1\n");
  RunConfig cfg = parse_config_text(text);
  REQUIRE(run_diagnose(cfg, text, "test reseed", dir, out) == 0);
  CsvTable dg = read_csv(out + "/diagnostics.csv");
  int cep = dg.col("epoch");
  REQUIRE(cep >= 0);
  CHECK(dg.rows.front()[std::size_t(cep)] == 0.0);
  CHECK(dg.rows.back()[std::size_t(cep)] > 0.0);
  // triples spanning an epoch boundary are dropped
  CsvTable id = read_csv(out + "/identity.csv");
  CHECK(id.rows.size() < 4);
  CHECK(!id.rows.empty());
}

TEST_CASE("determinism: identical config and seed reproduce identical bytes") {
  std::string dir = "pipe_out/det";
  std::string text =
      "model = sqg\ngrid.n = 64\ndt = 2.5e-3\nt_end = 0.0125\nsnapshot_interval = 0.0125\n"
      "ic.name = random-band\nic.param.amplitude = 1\nic.param.kmin = 2\nic.param.kmax = 6\n"
      "rng.seed = 42\noutput_dir = " + dir + "\n";
  fs::remove_all(dir);
  REQUIRE(run_solver(parse_config_text(text), text, "test det") == 0);
  std::map<std::string, std::string> first = dir_bytes(dir);
  fs::remove_all(dir);
  REQUIRE(run_solver(parse_config_text(text), text, "test det") == 0);
  CHECK(dir_bytes(dir) == first);

  // and a different seed actually changes the data
  std::string text2 = text;
  text2.replace(text2.find("rng.seed = 42"), 13, "rng.seed = 43");
  fs::remove_all(dir);
  REQUIRE(run_solver(parse_config_text(text2), text2, "test det") == 0);
  CHECK(dir_bytes(dir).at("series.csv") != first.at("series.csv"));
}

TEST_CASE("appendix-check writes the term table and the family fit") {
  std::string out = fresh_dir("appendix").generic_string();
  std::string text =
      "appendix.lambdas = 1,2,4\nappendix.probes = 1\nappendix.n = 256\n"
      "output_dir = " + out + "\n";
  RunConfig cfg = parse_config_text(text);
  REQUIRE(run_appendix_check(cfg, text, "test appendix", out) == 0);

  CsvTable terms = read_csv(out + "/appendix_terms.csv");
  REQUIRE(terms.rows.size() == 3);
  int cg = terms.col("rel_gap"), cc = terms.col("c1"), ccl = terms.col("clipped");
  for (const auto& r : terms.rows) {
    CHECK(r[std::size_t(cg)] < 1e-3);
    CHECK(r[std::size_t(cc)] > 0.2);
    CHECK(r[std::size_t(cc)] < 0.45);
    CHECK(r[std::size_t(ccl)] == 0.0);
  }

  CsvTable fit = read_csv(out + "/appendix_fit.csv");
  REQUIRE(fit.rows.size() == 3);
  int cb = fit.col("bounded"), csp = fit.col("spread"), cfit = fit.col("Cu_fit");
  CHECK(fit.rows[0][std::size_t(cb)] == 1.0);
  CHECK(fit.rows[0][std::size_t(csp)] < 0.25);
  CHECK(fit.rows[0][std::size_t(cfit)] > 0.0);

  nlohmann::json j = nlohmann::json::parse(slurp(out + "/manifest.json"));
  CHECK(j["outputs"].size() == 2);
  CHECK(j["flags"]["bounded"] == "true");
}

TEST_CASE("report golden fixture renders byte-identical svg") {
  std::string golden = std::string(VT_SOURCE_DIR) + "/tests/golden";
  std::string out = fresh_dir("report").generic_string();
  REQUIRE(run_report(golden, out + "/report.svg") == 0);
  CHECK(slurp(out + "/report.svg") == slurp(golden + "/report.svg"));

  CHECK(run_report(fresh_dir("report_empty").generic_string(), out + "/x.svg") == 2);
}

TEST_CASE("cli binary: exit codes and the full pipeline smoke") {
  REQUIRE_MESSAGE(fs::is_regular_file("./vortiline"), "vortiline binary not built");
  auto sh = [](const std::string& cmd) {
    int rc = std::system((cmd + " >pipe_out/cli.log 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  fs::create_directories("pipe_out");

  CHECK(sh("./vortiline --help") == 0);
  CHECK(sh("./vortiline") == 2);                       // missing subcommand
  CHECK(sh("./vortiline frobnicate") == 2);            // unknown subcommand
  CHECK(sh("./vortiline run-sqg") == 2);               // missing --config
  CHECK(sh("./vortiline run-sqg --config pipe_out/nosuch.cfg") == 2);
  CHECK(sh("./vortiline diagnose --snapshots pipe_out/nosuch_dir") == 2);

  spit("pipe_out/bad.cfg", "model = sqg\ngrid.m = 64\nic.name = radial-gaussian\n");
  CHECK(sh("./vortiline run-sqg --config pipe_out/bad.cfg") == 2);
  CHECK(slurp("pipe_out/cli.log").find("grid.m") != std::string::npos);

  spit("pipe_out/wrongmodel.cfg", steady_cfg("pipe_out/wrongmodel"));
  CHECK(sh("./vortiline run-euler3d --config pipe_out/wrongmodel.cfg") == 2);

  // run-sqg (64^2, 50 steps) -> diagnose -> report, end to end through the CLI
  auto t0 = std::chrono::steady_clock::now();
  std::string dir = "pipe_out/smoke";
  fs::remove_all(dir);
  spit("pipe_out/smoke.cfg", steady_cfg(dir));
  CHECK(sh("./vortiline run-sqg --config pipe_out/smoke.cfg") == 0);
  // no --config: diagnose picks the config embedded in the run manifest
  CHECK(sh("./vortiline diagnose --snapshots " + dir) == 0);
  CHECK(sh("./vortiline report --input " + dir + " --output " + dir + "/report2.svg") == 0);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 60.0);
  CHECK(fs::is_regular_file(dir + "/report.svg"));
  CHECK(slurp(dir + "/report2.svg") == slurp(dir + "/report.svg"));
  CsvTable id = read_csv(dir + "/identity.csv");
  CHECK(id.rows.size() == 4);

  // trace through the CLI with an explicit seed equal to the argmax ring
  CHECK(sh("./vortiline trace --snapshot " + dir + "/snap_000000.vln --output " + dir +
           "/curve.csv") == 0);
  CHECK(read_csv(dir + "/curve.csv").rows.size() > 20);
}

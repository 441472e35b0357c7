// End-to-end checks of the jfab binary: exit codes, output files and the
// byte-level determinism contract.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* kCli = JFAB_CLI_PATH;

struct RunResult {
  int exit_code = 0;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args, const std::string& env = "") {
  const fs::path log = fs::temp_directory_path() / "jfab_cli_test.log";
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(kCli) + " " + args +
                          " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = rc == -1 ? -1 : WEXITSTATUS(rc);
  std::ifstream in(log);
  std::ostringstream buf;
  buf << in.rdbuf();
  res.output = buf.str();
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("simulate is byte-identical across reruns and JF_THREADS") {
  const fs::path a = fresh_dir("jfab_cli_a");
  const fs::path b = fresh_dir("jfab_cli_b");
  const fs::path c = fresh_dir("jfab_cli_c");

  CHECK(run("simulate --seed 0 --out " + a.string()).exit_code == 0);
  CHECK(run("simulate --seed 0 --out " + b.string()).exit_code == 0);
  CHECK(run("simulate --seed 0 --out " + c.string(), "JF_THREADS=3").exit_code == 0);

  REQUIRE(fs::exists(a / "dataset.csv"));
  const std::string da = slurp(a / "dataset.csv");
  CHECK(da == slurp(b / "dataset.csv"));
  CHECK(da == slurp(c / "dataset.csv"));
  CHECK(slurp(a / "variation_report.csv") == slurp(c / "variation_report.csv"));

  // a different seed changes the dataset
  const fs::path d = fresh_dir("jfab_cli_d");
  CHECK(run("simulate --seed 1 --out " + d.string()).exit_code == 0);
  CHECK(da != slurp(d / "dataset.csv"));

  // expected artifacts present
  for (const char* f : {"metadata.json", "effective_config.json", "variation_report.txt",
                        "area_resistance_fit.txt"})
    CHECK(fs::exists(a / f));
  CHECK(fs::exists(a / "heatmap_lw_top_nm_0.025.svg"));
  CHECK(fs::exists(a / "heatmap_r_ohm_0.120.pgm"));
}

TEST_CASE("simulate rejects a config with unknown keys, with a line number") {
  const fs::path dir = fresh_dir("jfab_cli_badcfg");
  const fs::path cfg = dir / "bad.json";
  std::ofstream(cfg) << "{\n  \"writer\": {\n    \"filed_size_um\": 100\n  }\n}\n";
  const auto res = run("simulate --config " + cfg.string() + " --out " + dir.string());
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("filed_size_um") != std::string::npos);
  CHECK(res.output.find(":3") != std::string::npos);
}

TEST_CASE("simulate rejects an empty-site layout") {
  const fs::path dir = fresh_dir("jfab_cli_zerosites");
  const fs::path cfg = dir / "zero.json";
  std::ofstream(cfg) << R"({"layout": {"sites_per_chip": [0, 0]}})";
  const auto res = run("simulate --config " + cfg.string() + " --out " + dir.string());
  CHECK(res.exit_code == 2);
}

TEST_CASE("analyze round-trips a simulated dataset") {
  const fs::path sim = fresh_dir("jfab_cli_sim");
  const fs::path ana = fresh_dir("jfab_cli_ana");
  REQUIRE(run("simulate --seed 0 --out " + sim.string()).exit_code == 0);
  REQUIRE(run("analyze --csv " + (sim / "dataset.csv").string() + " --out " + ana.string())
              .exit_code == 0);
  // the analyzer reproduces the simulator's own report
  CHECK(slurp(sim / "variation_report.csv") == slurp(ana / "variation_report.csv"));
  CHECK(slurp(sim / "area_resistance_fit.txt") == slurp(ana / "area_resistance_fit.txt"));
}

TEST_CASE("analyze flags outliers and bad rows") {
  const fs::path dir = fresh_dir("jfab_cli_outlier");
  const fs::path csv = dir / "meas.csv";
  {
    std::ofstream f(csv);
    f << "# jfab-dataset v1.0 units=mm,nm,um2,ohm\n";
    f << "chip_id,x_mm,y_mm,group,nom_w_nm,nom_l_nm,lw_top_nm,lw_bot_nm,regime,area_um2,r_ohm\n";
    for (int i = 0; i < 40; ++i)
      f << "C1," << 1.0 + 0.5 * i << ",2.0,g,150,170,168,149,Full,0.0255," << 5880 + i << "\n";
    f << "C1,3.0,2.0,g,150,170,168,149,Full,0.0255,588000\n";  // 100x outlier
    f << "C1,not_a_number,2.0,g,150,170,168,149,Full,0.0255,5880\n";
  }
  const auto res = run("analyze --csv " + csv.string() + " --out " + dir.string());
  CHECK(res.exit_code == 0);
  const std::string log = slurp(dir / "analyze_log.txt");
  CHECK(log.find("outliers group g: 1") != std::string::npos);
  CHECK(log.find("row_error 44") != std::string::npos);
  CHECK(log.find("x_mm") != std::string::npos);

  const auto strict = run("analyze --strict --csv " + csv.string() + " --out " + dir.string());
  CHECK(strict.exit_code == 1);
}

TEST_CASE("repro: unknown id lists the valid ones") {
  const fs::path dir = fresh_dir("jfab_cli_repro");
  const auto res = run("repro --id fig9z --out " + dir.string());
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("fig2b") != std::string::npos);
  CHECK(res.output.find("suppl-table1") != std::string::npos);
}

TEST_CASE("repro fig2b emits a PASS table and metadata") {
  const fs::path dir = fresh_dir("jfab_cli_fig2b");
  const auto res = run("repro --id fig2b --out " + dir.string());
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("RESULT: PASS") != std::string::npos);
  CHECK(fs::exists(dir / "repro_fig2b.txt"));
  CHECK(fs::exists(dir / "metadata.json"));
}

TEST_CASE("psf rejects too few electrons and is seed-deterministic") {
  const fs::path dir = fresh_dir("jfab_cli_psf");
  const auto res = run("psf --electrons 100 --out " + dir.string());
  CHECK(res.exit_code == 1);
  CHECK(res.output.find("1e4") != std::string::npos);

  // Two identical runs produce identical JSON (same fit, same inputs).
  const fs::path p1 = fresh_dir("jfab_cli_psf1");
  const fs::path p2 = fresh_dir("jfab_cli_psf2");
  REQUIRE(run("psf --electrons 10000 --seed 5 --out " + p1.string()).exit_code == 0);
  REQUIRE(run("psf --electrons 10000 --seed 5 --out " + p2.string(), "JF_THREADS=2").exit_code ==
          0);
  CHECK(slurp(p1 / "psf_params.json") == slurp(p2 / "psf_params.json"));
  CHECK(slurp(p1 / "psf_histogram.csv") == slurp(p2 / "psf_histogram.csv"));
}

TEST_CASE("dose-map writes the grid") {
  const fs::path dir = fresh_dir("jfab_cli_dmap");
  const auto res = run("dose-map --grid 16x12 --preset mma-csar62 --out " + dir.string());
  CHECK(res.exit_code == 0);
  const std::string csv = slurp(dir / "dose_map.csv");
  CHECK(csv.find("preset=mma-csar62") != std::string::npos);
  int lines = 0;
  for (char ch : csv)
    if (ch == '\n') lines++;
  CHECK(lines == 13);  // header + 12 rows
}

TEST_CASE("bundled example config is accepted") {
  const fs::path cfg = fs::path(JFAB_CONFIG_DIR) / "example_small.json";
  REQUIRE(fs::exists(cfg));
  const fs::path dir = fresh_dir("jfab_cli_example");
  const auto res = run("simulate --config " + cfg.string() + " --out " + dir.string());
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir / "dataset.csv"));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spinsync/config.hpp"
#include "spinsync/io.hpp"
#include "spinsync/jw.hpp"
#include "spinsync/metrics.hpp"

using namespace spinsync;
namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "spinsync_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& env = "") {
  std::string out = (work_dir() / "stdout.txt").string();
  std::string err = (work_dir() / "stderr.txt").string();
  std::string cmd = env + (env.empty() ? "" : " ") + SPINSYNC_CLI_BIN + " " + args + " > " + out +
                    " 2> " + err;
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string last_stdout() { return slurp(work_dir() / "stdout.txt"); }
std::string last_stderr() { return slurp(work_dir() / "stderr.txt"); }

nlohmann::json sidecar_of(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  return nlohmann::json::parse(slurp(p));
}

}  // namespace

TEST_CASE("simulate writes a trace with the expected shape") {
  fs::path csv = work_dir() / "t1.csv";
  REQUIRE(run("simulate --tmax 2 --dt 0.05 --out " + csv.string()) == 0);
  CHECK(last_stdout().find("wrote") != std::string::npos);

  auto table = io::read_csv(csv);
  REQUIRE(!table.header.empty());
  CHECK(table.header[0] == "tau");
  for (int u = 1; u <= 6; ++u) CHECK(table.col("sz_" + std::to_string(u)) >= 0);
  CHECK(table.col("purity") < 0);  // scalar channels are opt-in
  CHECK(table.rows.size() == 41);
  CHECK(table.column("sz_1")[0] == doctest::Approx(1.0));
  CHECK(table.column("sz_2")[0] == doctest::Approx(-1.0));

  auto meta = sidecar_of(csv);
  CHECK(meta["command"] == "simulate");
  CHECK(meta["backend"] == "jw");
  CHECK(meta["config"]["n"] == 6);
  CHECK(meta["config"]["gamma"] == doctest::Approx(0.3));
}

TEST_CASE("identical invocations produce identical bytes") {
  fs::path da = work_dir() / "det_a";
  fs::path db = work_dir() / "det_b";
  fs::create_directories(da);
  fs::create_directories(db);
  std::string args = "simulate --tmax 1 --dt 0.05 --out trace.csv";
  REQUIRE(run(args, "SPINSYNC_OUT_DIR=" + da.string()) == 0);
  REQUIRE(run(args, "SPINSYNC_OUT_DIR=" + db.string()) == 0);
  CHECK(slurp(da / "trace.csv") == slurp(db / "trace.csv"));
  CHECK(slurp(da / "trace.json") == slurp(db / "trace.json"));
  CHECK(!slurp(da / "trace.csv").empty());
}

TEST_CASE("full and jw backends agree") {
  fs::path full = work_dir() / "full.csv";
  fs::path red = work_dir() / "red.csv";
  std::string shared = " --n 4 --noise-sites 2 --gamma 0.4 --tmax 1 --dt 0.05 ";
  REQUIRE(run("simulate --backend full" + shared + "--out " + full.string()) == 0);
  REQUIRE(run("simulate --backend jw" + shared + "--out " + red.string()) == 0);
  auto ta = io::read_csv(full);
  auto tb = io::read_csv(red);
  REQUIRE(ta.rows.size() == tb.rows.size());
  for (int u = 1; u <= 4; ++u) {
    auto a = ta.column("sz_" + std::to_string(u));
    auto b = tb.column("sz_" + std::to_string(u));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-8);
  }
}

TEST_CASE("stochastic backend reports means and standard errors") {
  fs::path csv = work_dir() / "stoch.csv";
  REQUIRE(run("simulate --backend stochastic --n 4 --noise-sites 2 --tmax 1 --dt 0.1"
              " --trajectories 16 --seed 9 --out " +
              csv.string()) == 0);
  auto table = io::read_csv(csv);
  CHECK(table.rows.size() == 11);
  for (int u = 1; u <= 4; ++u) {
    CHECK(table.col("sz_" + std::to_string(u)) >= 0);
    CHECK(table.col("se_" + std::to_string(u)) >= 0);
  }
  CHECK(table.column("se_1")[0] == doctest::Approx(0.0));  // deterministic start

  auto meta = sidecar_of(csv);
  CHECK(meta["trajectories"] == 16);
  CHECK(meta["seeds"]["master"] == 9);
  CHECK(meta["seeds"].contains("per_trajectory"));

  CHECK(run("simulate --backend stochastic --channels purity --out " +
            (work_dir() / "bad.csv").string()) != 0);
  CHECK(last_stderr().find("state-carrying backend") != std::string::npos);
}

TEST_CASE("decay-rates tables") {
  fs::path csv = work_dir() / "dr6.csv";
  REQUIRE(run("decay-rates --n 6 --noise-sites 3 --method both --out " + csv.string()) == 0);
  auto table = io::read_csv(csv);
  CHECK(table.header == std::vector<std::string>{"k", "l", "freq", "m_analytic", "m_numeric",
                                                 "rel_err"});
  CHECK(table.rows.size() == 10);
  bool saw_dark = false;
  auto k = table.column("k"), l = table.column("l");
  auto ma = table.column("m_analytic"), mn = table.column("m_numeric");
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] == 2.0 && l[i] == 4.0) {
      saw_dark = true;
      CHECK(std::abs(ma[i]) < 1e-12);
      CHECK(std::abs(mn[i]) < 1e-6);
    }
  }
  CHECK(saw_dark);

  fs::path csv8 = work_dir() / "dr8.csv";
  REQUIRE(run("decay-rates --n 8 --noise-sites 3 --method both --out " + csv8.string()) == 0);
  for (double m : io::read_csv(csv8).column("m_analytic")) CHECK(std::abs(m) > 1e-6);

  fs::path csva = work_dir() / "dra.csv";
  REQUIRE(run("decay-rates --n 6 --noise-sites 1 --method analytic --out " + csva.string()) == 0);
  auto ta = io::read_csv(csva);
  auto kk = ta.column("k"), ll = ta.column("l"), mm = ta.column("m_analytic");
  for (std::size_t i = 0; i < kk.size(); ++i)
    if (kk[i] == 2.0 && ll[i] == 4.0) CHECK(mm[i] == doctest::Approx(0.75));
  for (double v : ta.column("m_numeric")) CHECK(std::isnan(v));
}

TEST_CASE("sync-search enumerates the known configurations") {
  fs::path csv = work_dir() / "sync.csv";
  REQUIRE(run("sync-search --nmax 12 --out " + csv.string()) == 0);
  auto table = io::read_csv(csv);
  CHECK(table.rows.size() == 13);
  auto n = table.column("n"), u = table.column("u"), v = table.column("v");
  auto zero = table.column("zero_pairs"), stable = table.column("stable_sync");
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] == 6 && u[i] == 3 && v[i] == 0) {
      CHECK(zero[i] == 1.0);
      CHECK(stable[i] == 1.0);
    }
    if (n[i] == 12 && u[i] == 6 && v[i] == 0) {
      CHECK(zero[i] == 10.0);
      CHECK(stable[i] == 0.0);
    }
    if (n[i] == 6 && u[i] == 3 && v[i] == 6) CHECK(stable[i] == 1.0);
  }
}

TEST_CASE("metrics on a simulated trace round-trips the in-process values") {
  fs::path trace = work_dir() / "trace8.csv";
  REQUIRE(run("simulate --tmax 8 --dt 0.01 --pairs 1,5 --channels purity,loschmidt --out " +
              trace.string()) == 0);
  fs::path mcsv = work_dir() / "metrics8.csv";
  REQUIRE(run("metrics " + trace.string() + " --out " + mcsv.string()) == 0);

  auto table = io::read_csv(mcsv);
  for (auto name : {"tau", "r_1_5", "d_1_5", "r_2_4", "r_1_2", "conc_1_5", "ef_1_5", "mi_1_5"})
    CHECK(table.col(name) >= 0);
  auto r15 = table.column("r_1_5");
  CHECK(std::isnan(r15.back()));  // tail shorter than the window

  ChainConfig cfg;
  cfg.t_max = 8.0;
  auto gen = jw::ring_generator(cfg);
  Mat z0 = Mat::Zero(6, 6);
  z0(0, 0) = 1.0;
  jw::ZEvolveOptions opt;
  opt.t_max = cfg.t_max;
  opt.dt = cfg.dt;
  Trace t = jw::evolve_z(z0, gen, opt);
  auto want = metrics::windowed_pearson(t, "sz_1", "sz_5", 2.0 * pi);
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(r15[i] - want[i]) < 1e-8);

  auto meta = sidecar_of(mcsv);
  REQUIRE(meta["sync_times"].size() == 3);
  CHECK(meta["sync_times"][0]["pair"] == nlohmann::json({1, 5}));
  CHECK(meta["fft_peaks"].size() == 6);

  fs::path quiet = work_dir() / "quiet.csv";
  REQUIRE(run("simulate --gamma 0 --tmax 8 --dt 0.01 --out " + quiet.string()) == 0);
  fs::path qm = work_dir() / "quiet_metrics.csv";
  REQUIRE(run("metrics " + quiet.string() + " --r 1,5 --out " + qm.string()) == 0);
  CHECK(sidecar_of(qm)["sync_times"][0]["tau_s"].is_null());
}

TEST_CASE("metrics rejects traces missing a requested channel") {
  fs::path csv = work_dir() / "short.csv";
  REQUIRE(run("simulate --n 4 --noise-sites 2 --tmax 8 --dt 0.05 --out " + csv.string()) == 0);
  CHECK(run("metrics " + csv.string() + " --out " + (work_dir() / "m4.csv").string()) != 0);
  CHECK(last_stderr().find("sz_5") != std::string::npos);
  CHECK(run("metrics " + csv.string() + " --r 1,4 --out " +
            (work_dir() / "m4ok.csv").string()) == 0);
}

TEST_CASE("sweep grid") {
  fs::path csv = work_dir() / "sweep.csv";
  REQUIRE(run("sweep --gamma-grid 0,0.3 --delta-grid 0,0.1 --tmax 10 --at 6 --window 3 --out " +
              csv.string()) == 0);
  auto table = io::read_csv(csv);
  CHECK(table.header == std::vector<std::string>{"gamma", "delta", "r_15", "locked"});
  CHECK(table.rows.size() == 4);
  auto gamma = table.column("gamma");
  auto locked = table.column("locked");
  for (std::size_t i = 0; i < locked.size(); ++i) {
    CHECK((locked[i] == 0.0 || locked[i] == 1.0));
    CHECK((gamma[i] == 0.0 || gamma[i] == 0.3));
  }
  auto meta = sidecar_of(csv);
  REQUIRE(meta["widths"].size() == 2);
  CHECK(meta["widths"][0]["gamma"] == 0.0);
  CHECK(meta["widths"][0].contains("locked_points"));
}

TEST_CASE("config files feed defaults and flags override them") {
  fs::path ini = work_dir() / "run.ini";
  std::ofstream(ini) << "gamma=0.1\ntmax=2\ndt=0.05\n";
  fs::path csv = work_dir() / "cfg.csv";
  REQUIRE(run("simulate --config " + ini.string() + " --gamma 0.2 --out " + csv.string()) == 0);
  auto meta = sidecar_of(csv);
  CHECK(meta["config"]["gamma"] == doctest::Approx(0.2));  // flag wins
  CHECK(meta["config"]["tmax"] == doctest::Approx(2.0));   // file value
  CHECK(io::read_csv(csv).rows.size() == 41);
}

TEST_CASE("bad invocations fail with a nonzero status") {
  CHECK(run("simulate --backend warp") != 0);
  CHECK(run("simulate --n 7 --out " + (work_dir() / "odd.csv").string()) != 0);
  CHECK(last_stderr().find("even") != std::string::npos);
  CHECK(run("decay-rates --method guess") != 0);
  CHECK(run("") != 0);  // a subcommand is required
}

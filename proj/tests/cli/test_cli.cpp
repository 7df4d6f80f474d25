#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "hyperweno/io.hpp"
#include "hyperweno/scheme.hpp"

namespace fs = std::filesystem;
using namespace hyperweno;

namespace {

struct Workdir {
  fs::path path;
  Workdir() : path(fs::temp_directory_path() / ("hyperweno_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Workdir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const Workdir& work() {
  static Workdir w;
  return w;
}

// Runs the CLI through the shell; returns its exit status.
int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + HYPERWENO_CLI + " -q " + args + " >" + work() / "stdout.txt" + " 2>" +
                          work() / "stderr.txt";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) { return io::read_file(path); }

}  // namespace

TEST_CASE("converge on smooth Burgers with classical weights") {
  const std::string out = work() / "conv.csv";
  REQUIRE(run("converge --benchmark burgers1 --scheme classical --params 0,1 --T 0.5 --meshes 32,64,128,256 "
              "--reference-mesh 1024 --dt-ratio 0.02 --out " + out) == 0);
  const auto csv = io::read_csv(out);
  CHECK(csv.header == std::vector<std::string>{"N", "mse", "order"});
  REQUIRE(csv.rows.size() == 4);
  CHECK(std::isnan(csv.rows[0][2]));
  // Finest pairs.
  CHECK(csv.rows[2][2] >= 4.0);
  CHECK(csv.rows[3][2] >= 4.0);
}

TEST_CASE("generate, train, roll out and diagnose") {
  const std::string ds = work() / "ds", ckpt = work() / "m.hwck";
  REQUIRE(run("gen-data --benchmark burgers1 --out " + ds + " --n-traj 3 --seed 5") == 0);
  CHECK(fs::exists(ds + "/manifest.json"));
  CHECK(fs::exists(ds + "/traj_2_N64.hwtrj"));

  REQUIRE(run("train --benchmark burgers1 --data " + ds + " --out " + ckpt +
              " --epochs 2 --hyper-layers 3 --hyper-channels 8 --seed 1") == 0);
  const auto loss = io::read_csv(ckpt + ".loss.csv");
  CHECK(loss.header == std::vector<std::string>{"epoch", "loss", "wall_seconds"});
  CHECK(loss.rows.size() == 2);
  const scheme::Model m = scheme::load_model(ckpt);
  CHECK(m.kind == scheme::SchemeKind::HyperCfcnn);
  CHECK(m.hyper.layers == 3);

  const std::string csv = work() / "roll.csv", rec = work() / "roll.hwtrj";
  REQUIRE(run("rollout --ckpt " + ckpt + " --instance burgers1 --mesh 64 --T 3 --out " + csv + " --record " + rec) ==
          0);
  const auto sol = io::read_csv(csv);
  CHECK(sol.header == std::vector<std::string>{"x", "component_0", "t"});
  CHECK(sol.rows.size() == 128);  // first and last snapshot
  CHECK(sol.rows.back()[2] == doctest::Approx(3.0).epsilon(1e-14));

  const std::string diag = work() / "diag.csv";
  REQUIRE(run("diagnose --rollout " + rec + " --relative --out " + diag) == 0);
  const auto c = io::read_csv(diag);
  CHECK(c.header == std::vector<std::string>{"t", "C_q0"});
  CHECK(c.rows.front()[1] == 0.0);
  for (const auto& r : c.rows) CHECK(r[1] <= 1e-12);

  // Default parameter count column: N * P_cell.
  const std::string cost = work() / "cost.csv";
  REQUIRE(run("bench-cost --ckpt " + ckpt + " --meshes 32,64,128,256 --T 0.1 --out " + cost) == 0);
  const auto bc = io::read_csv(cost);
  CHECK(bc.header == std::vector<std::string>{"N", "params", "wall_seconds"});
  for (const auto& r : bc.rows) CHECK(r[1] == r[0] * 78.0);
}

TEST_CASE("outputs are deterministic and the seed falls back to the environment") {
  const std::string a = work() / "da", b = work() / "db", c = work() / "dc";
  REQUIRE(run("gen-data --benchmark burgers1 --out " + a + " --n-traj 2 --seed 9 --mesh-levels 32") == 0);
  REQUIRE(run("gen-data --benchmark burgers1 --out " + b + " --n-traj 2 --mesh-levels 32", "HYPERWENO_SEED=9") == 0);
  REQUIRE(run("gen-data --benchmark burgers1 --out " + c + " --n-traj 2 --mesh-levels 32", "HYPERWENO_SEED=10") == 0);
  CHECK(slurp(a + "/traj_1_N32.hwtrj") == slurp(b + "/traj_1_N32.hwtrj"));
  CHECK(slurp(a + "/traj_1_N32.hwtrj") != slurp(c + "/traj_1_N32.hwtrj"));
  CHECK(slurp(a + "/manifest.json") == slurp(b + "/manifest.json"));
}

TEST_CASE("config file supplies option values") {
  const std::string cfg = work() / "ref.ini", out = work() / "ref.csv";
  {
    std::ofstream f(cfg);
    f << "[reference]\nbenchmark = \"euler\"\nmesh = 64\nT = 0.1\n";
  }
  REQUIRE(run("--config " + cfg + " reference --out " + out) == 0);
  const auto csv = io::read_csv(out);
  CHECK(csv.header == std::vector<std::string>{"x", "component_0", "component_1", "component_2", "t"});
  CHECK(csv.rows.size() == 128);
  // 17 significant digits: values round-trip.
  CHECK(slurp(out).find("e-") != std::string::npos);
}

TEST_CASE("exit codes by error category") {
  CHECK(run("converge --benchmark burgers1 --no-such-flag") == 2);
  CHECK(run("") == 2);
  CHECK(run("converge --benchmark nowhere --scheme classical") == 2);
  CHECK(run("rollout --ckpt " + work() / "missing.hwck" + " --instance burgers1 --mesh 32 --T 1 --out " +
            work() / "x.csv") == 3);
  {
    std::ofstream f(work() / "bad.hwck");
    f << "not a checkpoint";
  }
  CHECK(run("rollout --ckpt " + work() / "bad.hwck" + " --instance burgers1 --mesh 32 --T 1 --out " +
            work() / "x.csv") == 4);
  CHECK(slurp(work() / "stderr.txt").find("offset") != std::string::npos);
  // A blow-up IC leaves the admissible band on the first step.
  CHECK(run("rollout --scheme classical --instance burgers1 --params 0,1e9 --mesh 32 --T 1 --out " +
            work() / "x.csv") == 5);
  CHECK(run("train --benchmark burgers1 --data " + work() / "nodata" + " --out " + work() / "m2.hwck") == 3);
}

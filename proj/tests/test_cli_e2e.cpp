// End-to-end checks against the installed binary: exit codes, file layout,
// and rerun determinism, exercised through a real shell invocation.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "splr/splr.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = SPLR_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path temp_dir() {
  const fs::path dir =
      fs::temp_directory_path() / ("splr_cli_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("cli generate/fit/eval pipeline") {
  const fs::path dir = temp_dir();
  const std::string truth = (dir / "truth").string();
  const std::string fitdir = (dir / "fit").string();

  REQUIRE(run("generate -d 30 -r 2 -n 2000 --seed 4 --out " + truth) == 0);
  REQUIRE(fs::exists(dir / "truth" / "data.csv"));

  REQUIRE(run("fit " + truth + "/data.csv --truth " + truth + " -T 50 --out " +
              fitdir) == 0);
  REQUIRE(fs::exists(dir / "fit" / "trace.csv"));
  REQUIRE(fs::exists(dir / "fit" / "S.txt"));
  REQUIRE(fs::exists(dir / "fit" / "Z.txt"));

  REQUIRE(run("eval " + fitdir + " " + truth + " --out " +
              (dir / "metrics.json").string()) == 0);
  REQUIRE(slurp(dir / "metrics.json").find("err_omega") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = temp_dir();
  SECTION("missing subcommand and bad flags are input errors") {
    REQUIRE(run("") == 2);
    REQUIRE(run("fit") == 2);  // missing positional
    REQUIRE(run("generate --family nonsense") == 2);
  }
  SECTION("help exits zero") { REQUIRE(run("--help") == 0); }
  SECTION("fit without budget or truth is an input error") {
    REQUIRE(run("generate -d 20 -r 1 -n 500 --out " + (dir / "t").string()) ==
            0);
    REQUIRE(run("fit " + (dir / "t" / "data.csv").string()) == 2);
  }
  fs::remove_all(dir);
}

TEST_CASE("cli sweep reruns are byte-identical with timing suppressed") {
  const fs::path dir = temp_dir();
  const std::string common =
      "sweep -d 16 -r 1 -n 300 --seeds 2 -T 8 --no-timing --seed 9 --out ";
  REQUIRE(run(common + (dir / "a.csv").string()) == 0);
  REQUIRE(run(common + (dir / "b.csv").string()) == 0);
  const std::string a = slurp(dir / "a.csv");
  REQUIRE_FALSE(a.empty());
  REQUIRE(a == slurp(dir / "b.csv"));
  fs::remove_all(dir);
}

TEST_CASE("cli config file supplies defaults that flags override") {
  const fs::path dir = temp_dir();
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << "[generate]\n"
        << "dim=24\n"
        << "rank=2\n"
        << "samples=100\n";
  }
  REQUIRE(run("--config " + (dir / "run.ini").string() + " --out " +
              (dir / "t1").string() + " generate") == 0);
  const splr::GroundTruth g1 = splr::harness::read_truth(dir / "t1");
  REQUIRE(g1.sparse.rows() == 24);

  REQUIRE(run("--config " + (dir / "run.ini").string() + " --out " +
              (dir / "t2").string() + " generate -d 16") == 0);
  const splr::GroundTruth g2 = splr::harness::read_truth(dir / "t2");
  REQUIRE(g2.sparse.rows() == 16);  // the flag wins
  fs::remove_all(dir);
}

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "splr/splr.hpp"
#include "test_util.hpp"

using namespace splr;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir =
      fs::temp_directory_path() / ("splr_io_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("matrix text format round-trips bit-exactly") {
  const fs::path dir = temp_dir();
  auto rng = testutil::stream(80);
  Matrix m = testutil::random_matrix(rng, 7, 5, -1e3, 1e3);
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = -2.2250738585072014e-308;  // smallest normal
  m(2, 2) = 1.7976931348623157e308;    // largest finite
  m(3, 3) = 0.1 + 0.2;

  io::write_matrix(dir / "m.txt", m);
  const Matrix back = io::read_matrix(dir / "m.txt");
  REQUIRE(back == m);

  const std::string text = slurp(dir / "m.txt");
  REQUIRE(text.rfind("# rows=7 cols=5\n", 0) == 0);
  REQUIRE(text.find('\r') == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("dataset csv round-trips") {
  const fs::path dir = temp_dir();
  auto rng = testutil::stream(81);
  const Dataset data(testutil::random_matrix(rng, 9, 4));
  io::write_dataset(dir / "data.csv", data);
  const Dataset back = io::read_dataset(dir / "data.csv");
  REQUIRE(back.samples() == data.samples());
  // no header row
  const std::string text = slurp(dir / "data.csv");
  REQUIRE(text.front() != '#');
  fs::remove_all(dir);
}

TEST_CASE("trace csv carries the exact header") {
  const fs::path dir = temp_dir();
  FitTrace trace;
  TraceRecord rec;
  rec.iteration = 0;
  rec.objective = 12.5;
  rec.time_ms = 1.0;
  trace.push_back(rec);
  rec.iteration = 1;
  rec.err_sparse = 0.5;
  rec.err_low_rank = 0.25;
  rec.err_precision = 0.125;
  rec.time_ms = 2.0;
  trace.push_back(rec);

  io::write_trace_csv(dir / "trace.csv", trace);
  const std::string text = slurp(dir / "trace.csv");
  REQUIRE(text.rfind("iter,objective,err_S,err_L,err_Omega,time_ms\n", 0) == 0);
  REQUIRE(text.find("nan") != std::string::npos);  // truthless first row

  std::vector<AdmmTraceRecord> admm_trace(1);
  io::write_admm_trace_csv(dir / "admm.csv", admm_trace);
  REQUIRE(slurp(dir / "admm.csv")
              .rfind("iter,objective,err_S,err_L,err_Omega,time_ms,"
                     "primal_res,dual_res\n",
                     0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("io errors carry the path") {
  const fs::path missing = "/nonexistent/splr/file.txt";
  try {
    io::read_matrix(missing);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    REQUIRE(std::string(e.what()).find("file.txt") != std::string::npos);
  }

  const fs::path dir = temp_dir();
  std::ofstream(dir / "bad.txt") << "# rows=2 cols=2\n1,2\n3,oops\n";
  REQUIRE_THROWS_AS(io::read_matrix(dir / "bad.txt"), InputError);
  std::ofstream(dir / "short.txt") << "# rows=2 cols=2\n1,2\n";
  REQUIRE_THROWS_AS(io::read_matrix(dir / "short.txt"), InputError);
  fs::remove_all(dir);
}

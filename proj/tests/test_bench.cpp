#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tcgw/bench.hpp"
#include "test_support.hpp"

using namespace tcgw;
using tcgw::testing::code_of;

TEST_CASE("memory grows monotonically from a non-empty genesis") {
  auto pts = bench_memory({0, 5, 10, 50, 100, 500, 1000, 5000});
  REQUIRE(pts.size() == 8);
  CHECK(pts[0].occupied_bytes > 0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].occupied_bytes > pts[i - 1].occupied_bytes);
  }
  // Linear beyond a few blocks.
  auto fit = fit_memory(pts, 100);
  CHECK(fit.r_squared >= 0.999);
  CHECK(fit.slope > 100);

  CHECK(code_of([] { bench_memory({10, 5}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { bench_memory({5, 5}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("memory runs are reproducible") {
  auto a = bench_memory({0, 100, 1000});
  auto b = bench_memory({0, 100, 1000});
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].occupied_bytes == b[i].occupied_bytes);
}

TEST_CASE("fit_memory on exact lines") {
  std::vector<BenchPoint> pts;
  for (std::uint64_t n : {0, 10, 100, 1000}) pts.push_back({n, 300 + 2 * n, 0});
  auto fit = fit_memory(pts, 0);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(300.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(code_of([&] { fit_memory(pts, 1000); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("batch time is measured at every level") {
  auto pts = bench_batch_time({0, 100, 1000}, true);
  REQUIRE(pts.size() == 3);
  for (const auto& p : pts) CHECK(p.batch_seconds > 0);
  CHECK(pts[0].n_existing == 0);
  CHECK(pts[2].n_existing == 1000);
}

TEST_CASE("csv layout") {
  std::vector<BenchPoint> pts;
  for (auto n : default_bench_levels()) pts.push_back({n, 1234567 + n, 0.0015});
  auto csv = render_csv(pts);
  std::istringstream in(csv);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  REQUIRE(lines.size() == 13);
  CHECK(lines[0] == "transactions,occupied_mb,batch_seconds");
  CHECK(lines[1] == "0,1.235,0.001500");
  CHECK(lines[12] == "500000,1.735,0.001500");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(lines[i].rfind(std::to_string(pts[i - 1].n_existing) + ",", 0) == 0);
  }

  auto dir = std::filesystem::temp_directory_path() / "tcgw_test_bench";
  std::filesystem::create_directories(dir);
  emit_csv(pts, dir / "a.csv");
  emit_csv(pts, dir / "b.csv");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  CHECK(slurp(dir / "a.csv") == csv);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("default levels") {
  auto levels = default_bench_levels();
  CHECK(levels.size() == 12);
  CHECK(levels.front() == 0);
  CHECK(levels.back() == 500000);
  CHECK(std::is_sorted(levels.begin(), levels.end()));
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tcgw/canonical_json.hpp"

namespace tcgw {

struct BenchPoint {
  std::uint64_t n_existing = 0;
  std::uint64_t occupied_bytes = 0;
  double batch_seconds = 0;
};

inline constexpr std::uint64_t kBenchBatch = 100;

// Standard transaction counts: 0 through 500000.
std::vector<std::uint64_t> default_bench_levels();

// Ledger size after N single-reading transactions, for each level. Levels
// must be ascending.
std::vector<BenchPoint> bench_memory(const std::vector<std::uint64_t>& levels);

// Median wall time (3 repetitions) to submit and commit one batch of 100
// transactions on top of N existing ones; with verify_mode the batch also
// pays for a full verify_chain pass.
std::vector<BenchPoint> bench_batch_time(const std::vector<std::uint64_t>& levels,
                                         bool verify_mode);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

// Least squares of occupied_bytes on n_existing over points with
// n_existing >= min_level.
LinearFit fit_memory(const std::vector<BenchPoint>& points, std::uint64_t min_level);

// "transactions,occupied_mb,batch_seconds", MB = bytes / 1e6 with 3 decimals.
std::string render_csv(const std::vector<BenchPoint>& points);
void emit_csv(const std::vector<BenchPoint>& points, const std::filesystem::path& path);

Json fit_report(const LinearFit& fit, const std::vector<BenchPoint>& points,
                bool verify_mode);

}  // namespace tcgw

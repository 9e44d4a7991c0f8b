#include "tcgw/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "tcgw/error.hpp"
#include "tcgw/private_chain.hpp"
#include "tcgw/workload.hpp"

namespace tcgw {

namespace {

constexpr std::uint64_t kBenchSeed = 0x7463677762656e63ULL;
const std::string kBenchChannel = "bench";
const std::string kBenchSensor = "bench-temp";

void check_ascending(const std::vector<std::uint64_t>& levels) {
  if (!std::is_sorted(levels.begin(), levels.end()) ||
      std::adjacent_find(levels.begin(), levels.end()) != levels.end()) {
    throw Error(ErrorCode::InvalidArgument, "bench levels must be strictly ascending");
  }
}

// Deterministic single-reading transaction stream.
class ReadingSource {
 public:
  Transaction next() {
    SensorReading r;
    r.sensor_id = kBenchSensor;
    r.metric = Metric::TemperatureC;
    auto cents = 500 + static_cast<std::int64_t>(rng_.below(3001));
    r.value = std::to_string(cents / 100) + "." + (cents % 100 < 10 ? "0" : "") +
              std::to_string(cents % 100);
    r.timestamp = kDefaultStartTime + static_cast<Timestamp>(issued_++) * 60;
    return make_reading_transaction(kBenchChannel, r);
  }

  std::vector<Transaction> take(std::uint64_t n) {
    std::vector<Transaction> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(next());
    return out;
  }

 private:
  Rng rng_{kBenchSeed};
  std::uint64_t issued_ = 0;
};

void grow(PrivateNode& node, ReadingSource& src, std::uint64_t count) {
  for (std::uint64_t i = 0; i < count; ++i) node.submit(src.next());
  node.commit_all();
}

}  // namespace

std::vector<std::uint64_t> default_bench_levels() {
  return {0, 5, 10, 50, 100, 500, 1000, 5000, 10000, 50000, 100000, 500000};
}

std::vector<BenchPoint> bench_memory(const std::vector<std::uint64_t>& levels) {
  check_ascending(levels);
  std::vector<BenchPoint> out;
  ReadingSource src;
  PrivateNode node(kBenchChannel, {kBenchSensor}, kBenchBatch);
  std::uint64_t have = 0;
  for (auto n : levels) {
    grow(node, src, n - have);
    have = n;
    out.push_back({n, ledger_size_bytes(node.ledger()), 0.0});
  }
  return out;
}

std::vector<BenchPoint> bench_batch_time(const std::vector<std::uint64_t>& levels,
                                         bool verify_mode) {
  check_ascending(levels);
  using Clock = std::chrono::steady_clock;
  std::vector<BenchPoint> out;
  ReadingSource src;
  PrivateNode base(kBenchChannel, {kBenchSensor}, kBenchBatch);
  std::uint64_t have = 0;
  for (auto n : levels) {
    grow(base, src, n - have);
    have = n;

    // Every repetition commits the same batch onto its own copy of the base.
    ReadingSource batch_src = src;
    auto batch = batch_src.take(kBenchBatch);
    std::vector<double> samples;
    for (int rep = 0; rep < 3; ++rep) {
      PrivateNode node = base;
      auto start = Clock::now();
      for (const auto& tx : batch) node.submit(tx);
      node.commit_all();
      if (verify_mode && !verify_chain(node.ledger()).ok) {
        throw Error(ErrorCode::InvalidArgument, "bench ledger failed verification");
      }
      samples.push_back(std::chrono::duration<double>(Clock::now() - start).count());
    }
    std::sort(samples.begin(), samples.end());
    out.push_back({n, ledger_size_bytes(base.ledger()), samples[1]});
  }
  return out;
}

LinearFit fit_memory(const std::vector<BenchPoint>& points, std::uint64_t min_level) {
  double n = 0, sx = 0, sy = 0;
  for (const auto& p : points) {
    if (p.n_existing < min_level) continue;
    n += 1;
    sx += static_cast<double>(p.n_existing);
    sy += static_cast<double>(p.occupied_bytes);
  }
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "linear fit needs at least two points");
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : points) {
    if (p.n_existing < min_level) continue;
    double dx = static_cast<double>(p.n_existing) - mx;
    double dy = static_cast<double>(p.occupied_bytes) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LinearFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::string render_csv(const std::vector<BenchPoint>& points) {
  std::string out = "transactions,occupied_mb,batch_seconds\n";
  char row[128];
  for (const auto& p : points) {
    std::snprintf(row, sizeof row, "%llu,%.3f,%.6f\n",
                  static_cast<unsigned long long>(p.n_existing),
                  static_cast<double>(p.occupied_bytes) / 1e6, p.batch_seconds);
    out += row;
  }
  return out;
}

void emit_csv(const std::vector<BenchPoint>& points, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path.string());
  f << render_csv(points);
  if (!f) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

Json fit_report(const LinearFit& fit, const std::vector<BenchPoint>& points, bool verify_mode) {
  Json rows = Json::array();
  for (const auto& p : points) {
    rows.push_back({{"transactions", p.n_existing},
                    {"occupied_bytes", p.occupied_bytes},
                    {"batch_seconds", format_decimal(p.batch_seconds)}});
  }
  return {
      {"fit",
       {{"slope_bytes_per_tx", format_decimal(fit.slope)},
        {"intercept_bytes", format_decimal(fit.intercept)},
        {"r_squared", format_decimal(fit.r_squared)}}},
      {"verify_mode", verify_mode},
      {"points", std::move(rows)},
      {"notes",
       {"Absolute sizes and times depend on this simulator's encoding and host; the "
        "reproducible claims are monotone, near-linear storage growth and batch time "
        "growing with ledger size when verification is included.",
        "The 0-transaction row is the commit time of one batch onto an empty ledger."}},
  };
}

}  // namespace tcgw

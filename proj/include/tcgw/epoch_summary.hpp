#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcgw/canonical_json.hpp"
#include "tcgw/digest.hpp"
#include "tcgw/ledger.hpp"
#include "tcgw/private_chain.hpp"

namespace tcgw {

struct MetricStats {
  Metric metric = Metric::TemperatureC;
  std::uint64_t count = 0;
  double mean = 0;
  double std_dev = 0;  // population
  double min = 0;
  double max = 0;

  bool operator==(const MetricStats&) const = default;
};

struct EpochSummary {
  std::string channel_id;
  std::uint64_t epoch_index = 0;
  Timestamp window_start = 0;
  Timestamp window_end = 0;
  std::vector<MetricStats> stats;
  std::uint64_t excluded_count = 0;
  Digest ledger_head_hash{};
  std::uint64_t ledger_height = 0;
  Digest state_digest{};

  bool operator==(const EpochSummary&) const = default;
};

// Statistics are written as decimal strings (shortest round-trip form) and
// digests as lowercase hex, so the canonical encoding is exact.
Json to_json(const MetricStats& stats);
Json to_json(const EpochSummary& summary);
MetricStats metric_stats_from_json(const Json& j);
EpochSummary epoch_summary_from_json(const Json& j);

// sha256(canonical_json(to_json(summary))): the value an anchor commits to.
Digest summary_digest(const EpochSummary& summary);

}  // namespace tcgw

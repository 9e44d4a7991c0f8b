#include "tcgw/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tcgw/error.hpp"

namespace tcgw {

namespace {

// Welford accumulator over values shifted by the first one. Readings of a
// metric sit close together, so x - shift is exact and the sums stay small
// even when the values carry a large common offset.
struct Running {
  std::uint64_t n = 0;
  double shift = 0;
  double mean = 0;  // of shifted values
  double m2 = 0;
  double min = 0;
  double max = 0;

  void add(double x) {
    if (n == 0) {
      shift = min = max = x;
    } else {
      min = std::min(min, x);
      max = std::max(max, x);
    }
    ++n;
    const double d = x - shift;
    const double delta = d - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (d - mean);
  }
};

bool close(double a, double b, double rel_tol) {
  double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
  return std::fabs(a - b) <= rel_tol * scale;
}

}  // namespace

ValidityRange ValidityRange::from_decimals(Metric metric, std::string_view min_valid,
                                           std::string_view max_valid) {
  ValidityRange r{metric, parse_decimal(min_valid), parse_decimal(max_valid)};
  if (r.min_valid > r.max_valid) {
    throw Error(ErrorCode::InvalidArgument, "min_valid exceeds max_valid for " +
                                                std::string(to_string(metric)));
  }
  return r;
}

FilterResult filter_out_of_scale(const std::vector<SensorReading>& readings,
                                 const std::vector<ValidityRange>& ranges) {
  std::map<Metric, const ValidityRange*> by_metric;
  for (const auto& r : ranges) {
    if (!by_metric.emplace(r.metric, &r).second) {
      throw Error(ErrorCode::DuplicateRange, std::string(to_string(r.metric)));
    }
  }
  FilterResult out;
  for (const auto& reading : readings) {
    auto it = by_metric.find(reading.metric);
    bool keep = true;
    if (it != by_metric.end()) {
      double v = parse_decimal(reading.value);
      keep = it->second->min_valid <= v && v <= it->second->max_valid;
    }
    (keep ? out.kept : out.excluded).push_back(reading);
  }
  return out;
}

std::vector<MetricStats> summarize(const std::vector<SensorReading>& readings) {
  std::map<Metric, Running> groups;
  for (const auto& r : readings) groups[r.metric].add(parse_decimal(r.value));

  std::vector<MetricStats> out;
  for (auto metric : kAllMetrics) {
    auto it = groups.find(metric);
    if (it == groups.end()) continue;
    const Running& g = it->second;
    MetricStats s;
    s.metric = metric;
    s.count = g.n;
    s.mean = std::clamp(g.shift + g.mean, g.min, g.max);
    s.std_dev = g.n > 1 ? std::sqrt(std::max(0.0, g.m2 / static_cast<double>(g.n))) : 0.0;
    s.min = g.min;
    s.max = g.max;
    out.push_back(s);
  }
  return out;
}

bool stats_close(const MetricStats& a, const MetricStats& b, double rel_tol) {
  return a.metric == b.metric && a.count == b.count && close(a.mean, b.mean, rel_tol) &&
         close(a.std_dev, b.std_dev, rel_tol) && close(a.min, b.min, rel_tol) &&
         close(a.max, b.max, rel_tol);
}

std::string_view to_string(GatewayEvent event) {
  switch (event) {
    case GatewayEvent::AnchorSubmitted: return "anchor_submitted";
    case GatewayEvent::AnchorConfirmed: return "anchor_confirmed";
    case GatewayEvent::LedgerReset: return "ledger_reset";
  }
  return "unknown";
}

std::string_view to_string(EpochCheck check) {
  switch (check) {
    case EpochCheck::ArchiveInvalid: return "archive_invalid";
    case EpochCheck::HeadMismatch: return "head_mismatch";
    case EpochCheck::StatsMismatch: return "stats_mismatch";
    case EpochCheck::AnchorMismatch: return "anchor_mismatch";
  }
  return "unknown";
}

Gateway::Gateway(std::string identity, std::vector<ValidityRange> ranges)
    : identity_(std::move(identity)), ranges_(std::move(ranges)) {
  // Surface DuplicateRange at construction rather than mid-rollover.
  filter_out_of_scale({}, ranges_);
}

void Gateway::emit(GatewayEvent event, const std::string& channel, std::uint64_t epoch) const {
  if (sink_) sink_(event, channel, epoch);
}

RolloverResult Gateway::rollover_epoch(const PrivateNode& node, Timestamp window_start,
                                       Timestamp window_end, PublicChainHandle& pub) {
  if (!node.mempool().empty()) {
    throw Error(ErrorCode::NonEmptyMempool, "commit or drop pending transactions before rollover");
  }
  if (!(window_start < window_end)) {
    throw Error(ErrorCode::InvalidWindow, "window must satisfy start < end");
  }
  if (last_window_end_ && window_start != *last_window_end_) {
    throw Error(ErrorCode::InvalidWindow, "epoch windows must be contiguous");
  }
  const Ledger& ledger = node.ledger();
  for (const auto& block : ledger.blocks()) {
    for (const auto& tx : block.transactions) {
      if (tx.kind == TxKind::RawReading &&
          (tx.timestamp < window_start || tx.timestamp >= window_end)) {
        throw Error(ErrorCode::InvalidWindow, "committed reading at " +
                                                  std::to_string(tx.timestamp) +
                                                  " lies outside the epoch window");
      }
    }
  }

  auto readings = readings_in_window(ledger, window_start, window_end);
  auto filtered = filter_out_of_scale(readings, ranges_);

  EpochSummary summary;
  summary.channel_id = node.channel_id();
  summary.epoch_index = next_epoch_;
  summary.window_start = window_start;
  summary.window_end = window_end;
  summary.stats = summarize(filtered.kept);
  summary.excluded_count = filtered.excluded.size();
  auto h = head(ledger);
  summary.ledger_head_hash = h.block_hash;
  summary.ledger_height = h.height;
  summary.state_digest = state_digest(node.state());

  std::optional<AnchorRecord> confirmed;
  try {
    pub.submit_anchor(summary, identity_);
    emit(GatewayEvent::AnchorSubmitted, summary.channel_id, summary.epoch_index);
    confirmed = pub.await_confirmation(summary.channel_id, summary.epoch_index,
                                       kConfirmationPatience);
  } catch (const Error& e) {
    throw Error(ErrorCode::PublishFailed, e.what());
  }
  if (!confirmed) {
    throw Error(ErrorCode::PublishFailed, "anchor for " + summary.channel_id + " epoch " +
                                              std::to_string(summary.epoch_index) +
                                              " was not confirmed");
  }
  emit(GatewayEvent::AnchorConfirmed, summary.channel_id, summary.epoch_index);

  PrivateNode fresh = node.reset_with_anchor(confirmed->anchor_tx_id);
  emit(GatewayEvent::LedgerReset, summary.channel_id, summary.epoch_index);

  ++next_epoch_;
  last_window_end_ = window_end;
  return RolloverResult{std::move(summary), std::move(*confirmed), std::move(fresh), ledger};
}

EpochVerification verify_pruned_epoch(const Ledger& archived, const EpochSummary& summary,
                                      const PublicChain& pub,
                                      const std::vector<ValidityRange>& ranges) {
  EpochVerification out;
  auto fail = [&](EpochCheck c) {
    out.ok = false;
    out.failures.push_back(c);
  };

  bool chain_ok = verify_chain(archived).ok;
  if (!chain_ok) fail(EpochCheck::ArchiveInvalid);

  auto h = head(archived);
  bool head_ok = h.block_hash == summary.ledger_head_hash && h.height == summary.ledger_height &&
                 archived.chain_id() == summary.channel_id;
  if (head_ok && chain_ok) {
    try {
      head_ok = state_digest(replay(archived)) == summary.state_digest;
    } catch (const Error&) {
      head_ok = false;
    }
  }
  if (!head_ok) fail(EpochCheck::HeadMismatch);

  bool stats_ok = false;
  try {
    auto filtered = filter_out_of_scale(
        readings_in_window(archived, summary.window_start, summary.window_end), ranges);
    auto stats = summarize(filtered.kept);
    stats_ok = filtered.excluded.size() == summary.excluded_count &&
               stats.size() == summary.stats.size() &&
               std::equal(stats.begin(), stats.end(), summary.stats.begin(),
                          [](const auto& a, const auto& b) { return stats_close(a, b); });
  } catch (const Error&) {
    stats_ok = false;
  }
  if (!stats_ok) fail(EpochCheck::StatsMismatch);

  auto anchor = pub.find_anchor(summary.channel_id, summary.epoch_index);
  if (!anchor || !anchor->confirmed || anchor->summary_digest != summary_digest(summary)) {
    fail(EpochCheck::AnchorMismatch);
  }
  return out;
}

}  // namespace tcgw

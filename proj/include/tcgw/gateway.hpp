#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tcgw/epoch_summary.hpp"
#include "tcgw/private_chain.hpp"
#include "tcgw/public_chain.hpp"

namespace tcgw {

struct ValidityRange {
  Metric metric = Metric::TemperatureC;
  double min_valid = 0;
  double max_valid = 0;

  // Throws Error(InvalidArgument) when min_valid > max_valid.
  static ValidityRange from_decimals(Metric metric, std::string_view min_valid,
                                     std::string_view max_valid);
};

struct FilterResult {
  std::vector<SensorReading> kept;
  std::vector<SensorReading> excluded;
};

// Inclusive bounds; metrics without a range are always kept. Throws
// Error(DuplicateRange) if two ranges name the same metric.
FilterResult filter_out_of_scale(const std::vector<SensorReading>& readings,
                                 const std::vector<ValidityRange>& ranges);

// Per-metric count/mean/population std-dev/min/max, in Metric order, omitting
// metrics with no readings.
std::vector<MetricStats> summarize(const std::vector<SensorReading>& readings);

enum class GatewayEvent { AnchorSubmitted, AnchorConfirmed, LedgerReset };
std::string_view to_string(GatewayEvent event);

struct RolloverResult {
  EpochSummary summary;
  AnchorRecord anchor;
  PrivateNode node;  // reset node, genesis_anchor = anchor.anchor_tx_id
  Ledger archived;   // the pre-reset ledger
};

inline constexpr std::uint64_t kConfirmationPatience = 64;

// Edge unit for one channel: filters and summarizes each epoch, publishes the
// anchor, and prunes the private ledger only after the anchor is confirmed.
class Gateway {
 public:
  using EventSink = std::function<void(GatewayEvent, const std::string& channel_id,
                                       std::uint64_t epoch_index)>;

  Gateway(std::string identity, std::vector<ValidityRange> ranges);

  void set_event_sink(EventSink sink) { sink_ = std::move(sink); }

  // Errors: NonEmptyMempool; InvalidWindow when the window is empty, is not
  // contiguous with the previous epoch, or leaves committed readings
  // uncovered; PublishFailed when the public side rejects or never confirms
  // (node is not touched in that case).
  RolloverResult rollover_epoch(const PrivateNode& node, Timestamp window_start,
                                Timestamp window_end, PublicChainHandle& pub);

  const std::string& identity() const { return identity_; }
  const std::vector<ValidityRange>& ranges() const { return ranges_; }
  std::uint64_t next_epoch() const { return next_epoch_; }

 private:
  void emit(GatewayEvent event, const std::string& channel, std::uint64_t epoch) const;

  std::string identity_;
  std::vector<ValidityRange> ranges_;
  std::uint64_t next_epoch_ = 0;
  std::optional<Timestamp> last_window_end_;
  EventSink sink_;
};

enum class EpochCheck {
  ArchiveInvalid,     // archived ledger fails verify_chain
  HeadMismatch,       // head hash/height or state digest differ from summary
  StatsMismatch,      // recomputed filter+summarize disagrees
  AnchorMismatch,     // no confirmed anchor matching the summary digest
};
std::string_view to_string(EpochCheck check);

struct EpochVerification {
  bool ok = true;
  std::vector<EpochCheck> failures;
};

EpochVerification verify_pruned_epoch(const Ledger& archived,
                                      const EpochSummary& summary,
                                      const PublicChain& pub,
                                      const std::vector<ValidityRange>& ranges);

// Relative comparison used when checking reproduced statistics.
bool stats_close(const MetricStats& a, const MetricStats& b, double rel_tol = 1e-9);

}  // namespace tcgw

#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "tcgw/ledger.hpp"
#include "tcgw/world_state.hpp"

namespace tcgw {

enum class Metric { TemperatureC, HumidityPct, RainPct, WindSpeedMs };

inline constexpr Metric kAllMetrics[] = {Metric::TemperatureC, Metric::HumidityPct,
                                         Metric::RainPct, Metric::WindSpeedMs};

std::string_view to_string(Metric metric);
// Throws Error(InvalidArgument) for unknown names.
Metric metric_from_string(std::string_view name);

// Parses a plain decimal ("-12", "3.25"); no exponent, no inf/nan. Returns
// the nearest double. Throws Error(InvalidArgument).
double parse_decimal(std::string_view text);
bool is_decimal(std::string_view text);
// Shortest fixed-notation string that round-trips to `value`.
std::string format_decimal(double value);

struct SensorReading {
  std::string sensor_id;
  Metric metric = Metric::TemperatureC;
  std::string value;  // decimal string
  Timestamp timestamp = 0;

  bool operator==(const SensorReading&) const = default;
};

std::string to_payload(const SensorReading& reading);
SensorReading parse_sensor_reading(std::string_view payload, Timestamp timestamp);
Transaction make_reading_transaction(const std::string& channel_id,
                                     const SensorReading& reading);

// RawReading transactions with from <= timestamp < to, in commit order.
// Throws Error(InvalidWindow) unless from < to.
std::vector<SensorReading> readings_in_window(const Ledger& ledger,
                                              Timestamp from, Timestamp to);

inline constexpr std::size_t kDefaultBatchSize = 100;

// Single-orderer permissioned chain for one field. Submissions are checked
// against the authorized set and queued; commit_batch cuts FIFO blocks and
// keeps the world state equal to replay(ledger).
class PrivateNode {
 public:
  PrivateNode(std::string channel_id, std::set<std::string> authorized_authors,
              std::size_t batch_size = kDefaultBatchSize,
              std::optional<Digest> genesis_anchor = std::nullopt);

  // Errors: WrongChannel, UnauthorizedAuthor, InvalidTransaction,
  // DuplicateTransaction, and PathTypeConflict for a context op that cannot
  // apply on top of the committed state plus the queued ops.
  void submit(const Transaction& tx);

  std::optional<Block> commit_batch();
  // Commits until the mempool is empty; returns the number of blocks cut.
  std::size_t commit_all();

  // Fresh genesis ledger carrying `anchor`, empty state, same channel and
  // authorizations. The current ledger is left for the caller to archive.
  PrivateNode reset_with_anchor(const Digest& anchor) const;

  std::vector<SensorReading> readings_in_window(Timestamp from, Timestamp to) const {
    return tcgw::readings_in_window(ledger_, from, to);
  }

  void advance_clock(Timestamp now);
  Timestamp clock() const { return clock_; }

  const std::string& channel_id() const { return channel_id_; }
  const Ledger& ledger() const { return ledger_; }
  const WorldState& state() const { return state_; }
  const std::deque<Transaction>& mempool() const { return mempool_; }
  const std::set<std::string>& authorized_authors() const { return authorized_; }
  std::size_t batch_size() const { return batch_size_; }

 private:
  std::string channel_id_;
  Ledger ledger_;
  WorldState state_;
  // state_ with every queued context op applied; used to reject conflicting
  // ops at submit time so commits never fail.
  WorldState projected_state_;
  std::deque<Transaction> mempool_;
  std::set<std::string> authorized_;
  std::size_t batch_size_;
  Timestamp clock_ = 0;
  std::unordered_set<Digest, DigestHash> seen_ids_;
};

}  // namespace tcgw

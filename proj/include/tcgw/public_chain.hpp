#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tcgw/epoch_summary.hpp"
#include "tcgw/ledger.hpp"

namespace tcgw {

inline constexpr std::uint64_t kDefaultConfirmations = 2;
inline constexpr std::string_view kPublicChainId = "public";

struct AnchorRecord {
  std::string channel_id;
  std::uint64_t epoch_index = 0;
  Digest summary_digest{};
  EpochSummary summary;
  std::string submitted_by;
  Digest anchor_tx_id{};
  // Height of the public block holding the anchor; empty while pending.
  std::optional<std::uint64_t> included_height;
  bool confirmed = false;

  bool operator==(const AnchorRecord&) const = default;
};

Json to_json(const AnchorRecord& record);

// What a gateway needs from the public side. PublicChain implements it
// directly; tests substitute failing implementations.
class PublicChainHandle {
 public:
  virtual ~PublicChainHandle() = default;

  // Throws DuplicateEpoch / UnknownGateway.
  virtual AnchorRecord submit_anchor(const EpochSummary& summary,
                                     const std::string& author) = 0;
  // Drives block production until the anchor is confirmed or `max_blocks`
  // blocks have been produced. Returns the confirmed record, if any.
  virtual std::optional<AnchorRecord> await_confirmation(
      const std::string& channel_id, std::uint64_t epoch_index,
      std::uint64_t max_blocks) = 0;
};

// Simulated public ledger: fixed validator set producing blocks round-robin,
// anchors confirmed at a fixed depth.
class PublicChain : public PublicChainHandle {
 public:
  PublicChain(std::vector<std::string> validators,
              std::set<std::string> gateways,
              std::uint64_t confirmations_required = kDefaultConfirmations);

  // Read-only view rebuilt from a persisted public ledger. Gateways become
  // the authors found in its anchors; validator identities are not recorded
  // in blocks and are left empty.
  static PublicChain from_ledger(Ledger ledger,
                                 std::uint64_t confirmations_required = kDefaultConfirmations);

  void register_gateway(const std::string& identity);

  AnchorRecord submit_anchor(const EpochSummary& summary,
                             const std::string& author) override;
  std::optional<AnchorRecord> await_confirmation(const std::string& channel_id,
                                                 std::uint64_t epoch_index,
                                                 std::uint64_t max_blocks) override;

  // Packages all pending transactions. Absent when nothing is pending.
  std::optional<Block> produce_block();
  // Like produce_block, but an idle producer seals a heartbeat entry so
  // confirmation depth keeps growing without traffic.
  Block produce_block_or_heartbeat();

  std::vector<AnchorRecord> query_channel(const std::string& channel_id) const;
  std::optional<AnchorRecord> find_anchor(const std::string& channel_id,
                                          std::uint64_t epoch_index) const;

  // Identity of the validator that produced block `height` (>= 1).
  const std::string& producer_of(std::uint64_t height) const;
  const std::vector<std::string>& producers() const { return producers_; }

  const Ledger& ledger() const { return ledger_; }
  const std::vector<Transaction>& pending() const { return pending_; }
  const std::vector<std::string>& validators() const { return validators_; }
  std::uint64_t confirmations_required() const { return confirmations_required_; }
  // Records keyed by channel, in submission order, with `confirmed`
  // evaluated against the current head.
  std::map<std::string, std::vector<AnchorRecord>> registry() const;

 private:
  bool is_confirmed(const AnchorRecord& record) const;
  void include_block(const Block& block);

  std::vector<std::string> validators_;
  std::set<std::string> gateways_;
  std::uint64_t confirmations_required_;
  Ledger ledger_;
  std::vector<Transaction> pending_;
  std::map<std::string, std::vector<AnchorRecord>> registry_;
  std::vector<std::string> producers_;
};

// Registry derived purely from the Anchor transactions of `ledger`.
std::map<std::string, std::vector<AnchorRecord>> rebuild_registry(
    const Ledger& ledger, std::uint64_t confirmations_required);
Digest registry_digest(const std::map<std::string, std::vector<AnchorRecord>>& registry);

// Consumer view of a channel: confirmed summaries and, when a document is
// supplied, its current fields and "Cultural Operations" count.
Json trace_product(const PublicChain& chain, const std::string& channel_id,
                   const std::optional<Document>& doc = std::nullopt);

}  // namespace tcgw

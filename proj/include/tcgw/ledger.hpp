#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tcgw/digest.hpp"

namespace tcgw {

using Timestamp = std::int64_t;  // unix seconds, UTC, simulated clock

enum class TxKind : std::uint8_t {
  UpdateField = 1,
  AppendToArray = 2,
  RawReading = 3,
  Anchor = 4,
  // Validator liveness entry on the public chain; carries no data.
  Heartbeat = 5,
};

std::string_view to_string(TxKind kind);
std::optional<TxKind> tx_kind_from_string(std::string_view name);

struct Transaction {
  Digest tx_id{};
  std::string channel_id;
  Timestamp timestamp = 0;
  TxKind kind = TxKind::RawReading;
  std::string payload;  // canonical JSON
  std::string author_id;

  bool operator==(const Transaction&) const = default;
};

Digest compute_tx_id(std::string_view channel_id, Timestamp timestamp,
                     TxKind kind, std::string_view payload,
                     std::string_view author_id);

// Builds a transaction with its id filled in. Throws Error(InvalidTransaction)
// when `payload` is not canonical JSON.
Transaction make_transaction(std::string channel_id, Timestamp timestamp,
                             TxKind kind, std::string payload,
                             std::string author_id);

// True when tx_id matches the content and the payload is canonical JSON.
bool transaction_valid(const Transaction& tx);

struct Block {
  std::uint64_t height = 0;
  Digest previous_hash{};
  Timestamp timestamp = 0;
  Digest tx_root{};
  std::vector<Transaction> transactions;
  Digest block_hash{};

  bool operator==(const Block&) const = default;
};

// Binary Merkle root over tx ids; an odd node at any level is paired with
// itself. The root of zero leaves is sha256 of the empty string.
Digest merkle_root(std::span<const Digest> leaves);
Digest compute_tx_root(const std::vector<Transaction>& txs);
Digest compute_block_hash(std::uint64_t height, const Digest& previous_hash,
                          Timestamp timestamp, const Digest& tx_root);

class Ledger {
 public:
  const std::string& chain_id() const { return chain_id_; }
  const std::optional<Digest>& genesis_anchor() const { return genesis_anchor_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  const Block& back() const { return blocks_.back(); }

  bool operator==(const Ledger&) const = default;

  // Raw access for tamper tests and the file loader. Nothing in the library
  // mutates an existing block through this.
  std::vector<Block>& mutable_blocks_for_testing() { return blocks_; }

 private:
  friend Ledger genesis(std::string chain_id, std::optional<Digest> anchor);
  friend std::pair<Ledger, Block> append_block(Ledger&& ledger,
                                               std::vector<Transaction> txs,
                                               Timestamp timestamp);
  friend Ledger decode_ledger(std::span<const std::uint8_t> data);

  std::string chain_id_;
  std::optional<Digest> genesis_anchor_;
  std::vector<Block> blocks_;
};

Ledger genesis(std::string chain_id, std::optional<Digest> anchor = std::nullopt);

// Returns the extended ledger and the new block. The const& overload leaves
// its argument untouched; the rvalue overload reuses its storage.
std::pair<Ledger, Block> append_block(const Ledger& ledger,
                                      std::vector<Transaction> txs,
                                      Timestamp timestamp);
std::pair<Ledger, Block> append_block(Ledger&& ledger,
                                      std::vector<Transaction> txs,
                                      Timestamp timestamp);

enum class VerifyFailure { HashLink, TxRoot, TxId, HeightGap };
std::string_view to_string(VerifyFailure reason);

struct VerificationReport {
  bool ok = true;
  std::optional<std::uint64_t> first_bad_height;
  std::optional<VerifyFailure> reason;
};

VerificationReport verify_chain(const Ledger& ledger);

struct Head {
  std::uint64_t height = 0;
  Digest block_hash{};
  bool operator==(const Head&) const = default;
};

Head head(const Ledger& ledger);

Bytes encode_block(const Block& block);
// Sum of encode_block sizes over all blocks.
std::uint64_t ledger_size_bytes(const Ledger& ledger);

// File image: "TCGW", version 0x01, ledger header (chain id, optional
// genesis anchor), then blocks back-to-back.
Bytes encode_ledger(const Ledger& ledger);
Ledger decode_ledger(std::span<const std::uint8_t> data);

void save_ledger(const Ledger& ledger, const std::filesystem::path& path);
Ledger load_ledger(const std::filesystem::path& path);

}  // namespace tcgw

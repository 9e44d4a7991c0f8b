#include "tcgw/ledger.hpp"

#include <fstream>
#include <iterator>

#include "tcgw/canonical_json.hpp"
#include "tcgw/error.hpp"

namespace tcgw {

namespace {

constexpr char kMagic[4] = {'T', 'C', 'G', 'W'};
constexpr std::uint8_t kVersion = 0x01;

void encode_transaction(Encoder& enc, const Transaction& tx) {
  enc.digest(tx.tx_id)
      .bytes(tx.channel_id)
      .i64(tx.timestamp)
      .u8(static_cast<std::uint8_t>(tx.kind))
      .bytes(tx.payload)
      .bytes(tx.author_id);
}

void encode_block_into(Encoder& enc, const Block& b) {
  enc.u64(b.height)
      .digest(b.previous_hash)
      .i64(b.timestamp)
      .digest(b.tx_root)
      .digest(b.block_hash)
      .u64(b.transactions.size());
  for (const auto& tx : b.transactions) encode_transaction(enc, tx);
}

Transaction decode_transaction(Decoder& dec) {
  Transaction tx;
  tx.tx_id = dec.digest();
  tx.channel_id = dec.bytes();
  tx.timestamp = dec.i64();
  auto kind = dec.u8();
  if (kind < 1 || kind > 5) {
    throw Error(ErrorCode::CorruptFile, "unknown transaction kind", dec.position());
  }
  tx.kind = static_cast<TxKind>(kind);
  tx.payload = dec.bytes();
  tx.author_id = dec.bytes();
  return tx;
}

Block decode_block(Decoder& dec) {
  Block b;
  b.height = dec.u64();
  b.previous_hash = dec.digest();
  b.timestamp = dec.i64();
  b.tx_root = dec.digest();
  b.block_hash = dec.digest();
  auto n = dec.u64();
  for (std::uint64_t i = 0; i < n; ++i) b.transactions.push_back(decode_transaction(dec));
  return b;
}

}  // namespace

std::string_view to_string(TxKind kind) {
  switch (kind) {
    case TxKind::UpdateField: return "UpdateField";
    case TxKind::AppendToArray: return "AppendToArray";
    case TxKind::RawReading: return "RawReading";
    case TxKind::Anchor: return "Anchor";
    case TxKind::Heartbeat: return "Heartbeat";
  }
  return "Unknown";
}

std::optional<TxKind> tx_kind_from_string(std::string_view name) {
  for (auto k : {TxKind::UpdateField, TxKind::AppendToArray, TxKind::RawReading,
                 TxKind::Anchor, TxKind::Heartbeat}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(VerifyFailure reason) {
  switch (reason) {
    case VerifyFailure::HashLink: return "HashLink";
    case VerifyFailure::TxRoot: return "TxRoot";
    case VerifyFailure::TxId: return "TxId";
    case VerifyFailure::HeightGap: return "HeightGap";
  }
  return "Unknown";
}

Digest compute_tx_id(std::string_view channel_id, Timestamp timestamp, TxKind kind,
                     std::string_view payload, std::string_view author_id) {
  Encoder enc;
  enc.bytes(channel_id)
      .i64(timestamp)
      .u8(static_cast<std::uint8_t>(kind))
      .bytes(payload)
      .bytes(author_id);
  return sha256(enc.data());
}

Transaction make_transaction(std::string channel_id, Timestamp timestamp, TxKind kind,
                             std::string payload, std::string author_id) {
  if (!is_canonical_json(payload)) {
    throw Error(ErrorCode::InvalidTransaction, "payload is not canonical JSON");
  }
  Transaction tx;
  tx.tx_id = compute_tx_id(channel_id, timestamp, kind, payload, author_id);
  tx.channel_id = std::move(channel_id);
  tx.timestamp = timestamp;
  tx.kind = kind;
  tx.payload = std::move(payload);
  tx.author_id = std::move(author_id);
  return tx;
}

bool transaction_valid(const Transaction& tx) {
  return tx.tx_id == compute_tx_id(tx.channel_id, tx.timestamp, tx.kind, tx.payload,
                                   tx.author_id) &&
         is_canonical_json(tx.payload);
}

Digest merkle_root(std::span<const Digest> leaves) {
  if (leaves.empty()) return sha256(std::string_view{});
  std::vector<Digest> level(leaves.begin(), leaves.end());
  while (level.size() > 1) {
    std::vector<Digest> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) {
      const Digest& left = level[i];
      const Digest& right = i + 1 < level.size() ? level[i + 1] : level[i];
      Sha256 h;
      h.update(left).update(right);
      next.push_back(h.finish());
    }
    level = std::move(next);
  }
  return level.front();
}

Digest compute_tx_root(const std::vector<Transaction>& txs) {
  std::vector<Digest> ids;
  ids.reserve(txs.size());
  for (const auto& tx : txs) ids.push_back(tx.tx_id);
  return merkle_root(ids);
}

Digest compute_block_hash(std::uint64_t height, const Digest& previous_hash,
                          Timestamp timestamp, const Digest& tx_root) {
  Encoder enc;
  enc.u64(height).digest(previous_hash).i64(timestamp).digest(tx_root);
  return sha256(enc.data());
}

Ledger genesis(std::string chain_id, std::optional<Digest> anchor) {
  if (chain_id.empty()) {
    throw Error(ErrorCode::InvalidArgument, "chain_id must be non-empty");
  }
  Block b;
  b.height = 0;
  b.previous_hash = kZeroDigest;
  b.timestamp = 0;
  b.tx_root = compute_tx_root(b.transactions);
  b.block_hash = compute_block_hash(b.height, b.previous_hash, b.timestamp, b.tx_root);

  Ledger ledger;
  ledger.chain_id_ = std::move(chain_id);
  ledger.genesis_anchor_ = anchor;
  ledger.blocks_.push_back(std::move(b));
  return ledger;
}

std::pair<Ledger, Block> append_block(const Ledger& ledger, std::vector<Transaction> txs,
                                      Timestamp timestamp) {
  Ledger copy = ledger;
  return append_block(std::move(copy), std::move(txs), timestamp);
}

std::pair<Ledger, Block> append_block(Ledger&& ledger, std::vector<Transaction> txs,
                                      Timestamp timestamp) {
  if (txs.empty()) throw Error(ErrorCode::EmptyBatch, "block needs at least one transaction");
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (!transaction_valid(txs[i])) {
      throw Error(ErrorCode::InvalidTransaction, "tx_id does not match content", i);
    }
  }
  const Block& prev = ledger.blocks_.back();
  if (timestamp < prev.timestamp) {
    throw Error(ErrorCode::ClockSkew, "block timestamp precedes head");
  }
  Block b;
  b.height = ledger.blocks_.size();
  b.previous_hash = prev.block_hash;
  b.timestamp = timestamp;
  b.transactions = std::move(txs);
  b.tx_root = compute_tx_root(b.transactions);
  b.block_hash = compute_block_hash(b.height, b.previous_hash, b.timestamp, b.tx_root);

  Ledger out = std::move(ledger);
  out.blocks_.push_back(b);
  return {std::move(out), std::move(b)};
}

VerificationReport verify_chain(const Ledger& ledger) {
  auto fail = [](std::uint64_t height, VerifyFailure reason) {
    return VerificationReport{false, height, reason};
  };
  const auto& blocks = ledger.blocks();
  if (blocks.empty()) return fail(0, VerifyFailure::HeightGap);

  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    if (b.height != i) return fail(i, VerifyFailure::HeightGap);
    const Digest& expected_prev = i == 0 ? kZeroDigest : blocks[i - 1].block_hash;
    if (b.previous_hash != expected_prev) return fail(i, VerifyFailure::HashLink);
    for (const auto& tx : b.transactions) {
      if (!transaction_valid(tx)) return fail(i, VerifyFailure::TxId);
    }
    if (b.tx_root != compute_tx_root(b.transactions)) return fail(i, VerifyFailure::TxRoot);
    if (b.block_hash != compute_block_hash(b.height, b.previous_hash, b.timestamp, b.tx_root)) {
      return fail(i, VerifyFailure::HashLink);
    }
  }
  return {};
}

Head head(const Ledger& ledger) {
  const Block& b = ledger.back();
  return {b.height, b.block_hash};
}

Bytes encode_block(const Block& block) {
  Encoder enc;
  encode_block_into(enc, block);
  return std::move(enc).take();
}

std::uint64_t ledger_size_bytes(const Ledger& ledger) {
  std::uint64_t total = 0;
  for (const auto& b : ledger.blocks()) {
    // 8 height + 32 prev + 8 ts + 32 root + 32 hash + 8 count
    std::uint64_t size = 120;
    for (const auto& tx : b.transactions) {
      size += 32 + 8 + tx.channel_id.size() + 8 + 1 + 8 + tx.payload.size() + 8 +
              tx.author_id.size();
    }
    total += size;
  }
  return total;
}

Bytes encode_ledger(const Ledger& ledger) {
  Encoder enc;
  for (char c : kMagic) enc.u8(static_cast<std::uint8_t>(c));
  enc.u8(kVersion);
  enc.bytes(ledger.chain_id());
  if (ledger.genesis_anchor()) {
    enc.u8(1).digest(*ledger.genesis_anchor());
  } else {
    enc.u8(0);
  }
  for (const auto& b : ledger.blocks()) encode_block_into(enc, b);
  return std::move(enc).take();
}

Ledger decode_ledger(std::span<const std::uint8_t> data) {
  Decoder dec(data);
  for (char c : kMagic) {
    if (dec.u8() != static_cast<std::uint8_t>(c)) {
      throw Error(ErrorCode::CorruptFile, "bad magic");
    }
  }
  if (dec.u8() != kVersion) throw Error(ErrorCode::CorruptFile, "unsupported version");
  Ledger ledger;
  ledger.chain_id_ = dec.bytes();
  switch (dec.u8()) {
    case 0: break;
    case 1: ledger.genesis_anchor_ = dec.digest(); break;
    default: throw Error(ErrorCode::CorruptFile, "bad anchor flag");
  }
  while (!dec.done()) ledger.blocks_.push_back(decode_block(dec));
  if (ledger.blocks_.empty()) throw Error(ErrorCode::CorruptFile, "ledger has no blocks");
  return ledger;
}

void save_ledger(const Ledger& ledger, const std::filesystem::path& path) {
  auto bytes = encode_ledger(ledger);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

Ledger load_ledger(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_ledger(bytes);
}

}  // namespace tcgw

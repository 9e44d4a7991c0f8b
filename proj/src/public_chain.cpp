#include "tcgw/public_chain.hpp"

#include <algorithm>

#include "tcgw/error.hpp"

namespace tcgw {

namespace {

std::string anchor_payload(const EpochSummary& summary, const Digest& digest) {
  Json j = {
      {"channel_id", summary.channel_id},
      {"epoch_index", summary.epoch_index},
      {"summary", to_json(summary)},
      {"summary_digest", to_hex(digest)},
  };
  return canonical_json(j);
}

AnchorRecord record_from_tx(const Transaction& tx) {
  Json j = parse_json(tx.payload);
  AnchorRecord r;
  r.summary = epoch_summary_from_json(j.at("summary"));
  r.channel_id = j.at("channel_id").get<std::string>();
  r.epoch_index = j.at("epoch_index").get<std::uint64_t>();
  r.summary_digest = digest_from_hex(j.at("summary_digest").get<std::string>());
  r.submitted_by = tx.author_id;
  r.anchor_tx_id = tx.tx_id;
  return r;
}

}  // namespace

Json to_json(const AnchorRecord& r) {
  Json j = {
      {"channel_id", r.channel_id},
      {"epoch_index", r.epoch_index},
      {"summary_digest", to_hex(r.summary_digest)},
      {"summary", to_json(r.summary)},
      {"submitted_by", r.submitted_by},
      {"anchor_tx_id", to_hex(r.anchor_tx_id)},
      {"confirmed", r.confirmed},
  };
  j["included_height"] = r.included_height ? Json(*r.included_height) : Json(nullptr);
  return j;
}

PublicChain::PublicChain(std::vector<std::string> validators, std::set<std::string> gateways,
                         std::uint64_t confirmations_required)
    : validators_(std::move(validators)),
      gateways_(std::move(gateways)),
      confirmations_required_(confirmations_required),
      ledger_(genesis(std::string(kPublicChainId))) {
  if (validators_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "public chain needs at least one validator");
  }
  if (confirmations_required_ == 0) {
    throw Error(ErrorCode::InvalidArgument, "confirmations_required must be positive");
  }
}

PublicChain PublicChain::from_ledger(Ledger ledger, std::uint64_t confirmations_required) {
  PublicChain chain({"unknown"}, {}, confirmations_required);
  chain.validators_.clear();
  chain.registry_ = rebuild_registry(ledger, confirmations_required);
  for (const auto& [channel, records] : chain.registry_) {
    for (const auto& r : records) chain.gateways_.insert(r.submitted_by);
  }
  chain.ledger_ = std::move(ledger);
  return chain;
}

void PublicChain::register_gateway(const std::string& identity) { gateways_.insert(identity); }

bool PublicChain::is_confirmed(const AnchorRecord& record) const {
  return record.included_height &&
         head(ledger_).height >= *record.included_height + confirmations_required_;
}

AnchorRecord PublicChain::submit_anchor(const EpochSummary& summary, const std::string& author) {
  if (!gateways_.contains(author)) throw Error(ErrorCode::UnknownGateway, author);
  if (find_anchor(summary.channel_id, summary.epoch_index)) {
    throw Error(ErrorCode::DuplicateEpoch,
                summary.channel_id + " epoch " + std::to_string(summary.epoch_index));
  }
  AnchorRecord r;
  r.channel_id = summary.channel_id;
  r.epoch_index = summary.epoch_index;
  r.summary = summary;
  r.summary_digest = summary_digest(summary);
  r.submitted_by = author;

  Transaction tx = make_transaction(std::string(kPublicChainId), summary.window_end,
                                    TxKind::Anchor, anchor_payload(summary, r.summary_digest),
                                    author);
  r.anchor_tx_id = tx.tx_id;
  pending_.push_back(std::move(tx));
  registry_[r.channel_id].push_back(r);
  return r;
}

void PublicChain::include_block(const Block& block) {
  for (const auto& tx : block.transactions) {
    if (tx.kind != TxKind::Anchor) continue;
    for (auto& [channel, records] : registry_) {
      for (auto& r : records) {
        if (r.anchor_tx_id == tx.tx_id) r.included_height = block.height;
      }
    }
  }
}

std::optional<Block> PublicChain::produce_block() {
  if (pending_.empty()) return std::nullopt;
  if (validators_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "read-only public chain cannot produce blocks");
  }
  auto height = ledger_.size();
  const std::string& producer = validators_[(height - 1) % validators_.size()];
  Timestamp ts = ledger_.back().timestamp;
  for (const auto& tx : pending_) ts = std::max(ts, tx.timestamp);

  auto [next, block] = append_block(std::move(ledger_), std::move(pending_), ts);
  ledger_ = std::move(next);
  pending_.clear();
  producers_.push_back(producer);
  include_block(block);
  return std::move(block);
}

Block PublicChain::produce_block_or_heartbeat() {
  if (pending_.empty()) {
    if (validators_.empty()) {
      throw Error(ErrorCode::InvalidArgument, "read-only public chain cannot produce blocks");
    }
    auto height = ledger_.size();
    const std::string& producer = validators_[(height - 1) % validators_.size()];
    Json payload = {{"height", height}, {"validator", producer}};
    pending_.push_back(make_transaction(std::string(kPublicChainId), ledger_.back().timestamp,
                                        TxKind::Heartbeat, canonical_json(payload), producer));
  }
  return *produce_block();
}

std::optional<AnchorRecord> PublicChain::await_confirmation(const std::string& channel_id,
                                                            std::uint64_t epoch_index,
                                                            std::uint64_t max_blocks) {
  for (std::uint64_t produced = 0;; ++produced) {
    auto r = find_anchor(channel_id, epoch_index);
    if (!r) return std::nullopt;
    if (r->confirmed) return r;
    if (produced == max_blocks) return std::nullopt;
    produce_block_or_heartbeat();
  }
}

std::optional<AnchorRecord> PublicChain::find_anchor(const std::string& channel_id,
                                                     std::uint64_t epoch_index) const {
  auto it = registry_.find(channel_id);
  if (it == registry_.end()) return std::nullopt;
  for (const auto& r : it->second) {
    if (r.epoch_index == epoch_index) {
      AnchorRecord out = r;
      out.confirmed = is_confirmed(r);
      return out;
    }
  }
  return std::nullopt;
}

std::vector<AnchorRecord> PublicChain::query_channel(const std::string& channel_id) const {
  std::vector<AnchorRecord> out;
  auto it = registry_.find(channel_id);
  if (it == registry_.end()) return out;
  for (const auto& r : it->second) {
    if (is_confirmed(r)) {
      out.push_back(r);
      out.back().confirmed = true;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.epoch_index < b.epoch_index; });
  return out;
}

const std::string& PublicChain::producer_of(std::uint64_t height) const {
  if (height == 0 || height > producers_.size()) {
    throw Error(ErrorCode::InvalidArgument, "no recorded producer for height " +
                                                std::to_string(height));
  }
  return producers_[height - 1];
}

std::map<std::string, std::vector<AnchorRecord>> PublicChain::registry() const {
  auto out = registry_;
  for (auto& [channel, records] : out) {
    for (auto& r : records) r.confirmed = is_confirmed(r);
  }
  return out;
}

std::map<std::string, std::vector<AnchorRecord>> rebuild_registry(
    const Ledger& ledger, std::uint64_t confirmations_required) {
  std::map<std::string, std::vector<AnchorRecord>> out;
  auto head_height = head(ledger).height;
  for (const auto& block : ledger.blocks()) {
    for (const auto& tx : block.transactions) {
      if (tx.kind != TxKind::Anchor) continue;
      AnchorRecord r;
      try {
        r = record_from_tx(tx);
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::CorruptFile, std::string("anchor payload: ") + e.what(),
                    block.height);
      }
      r.included_height = block.height;
      r.confirmed = head_height >= block.height + confirmations_required;
      out[r.channel_id].push_back(std::move(r));
    }
  }
  return out;
}

Digest registry_digest(const std::map<std::string, std::vector<AnchorRecord>>& registry) {
  Json j = Json::object();
  for (const auto& [channel, records] : registry) {
    Json list = Json::array();
    for (const auto& r : records) list.push_back(to_json(r));
    j[channel] = std::move(list);
  }
  return sha256(canonical_json(j));
}

Json trace_product(const PublicChain& chain, const std::string& channel_id,
                   const std::optional<Document>& doc) {
  Json summaries = Json::array();
  for (const auto& r : chain.query_channel(channel_id)) {
    summaries.push_back({
        {"epoch_index", r.epoch_index},
        {"included_height", *r.included_height},
        {"summary_digest", to_hex(r.summary_digest)},
        {"summary", to_json(r.summary)},
    });
  }
  Json out = {{"channel_id", channel_id}, {"summaries", std::move(summaries)}};
  if (doc) {
    std::uint64_t ops = 0;
    auto it = doc->body.find("Cultural Operations");
    if (it != doc->body.end() && it->is_array()) ops = it->size();
    out["document"] = {{"doc_id", doc->doc_id}, {"fields", doc->body}};
    out["cultural_operations"] = ops;
  }
  return out;
}

}  // namespace tcgw

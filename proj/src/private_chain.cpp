#include "tcgw/private_chain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "tcgw/error.hpp"

namespace tcgw {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::TemperatureC: return "temperature_c";
    case Metric::HumidityPct: return "humidity_pct";
    case Metric::RainPct: return "rain_pct";
    case Metric::WindSpeedMs: return "wind_speed_ms";
  }
  return "unknown";
}

Metric metric_from_string(std::string_view name) {
  for (auto m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

bool is_decimal(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && text[i] == '-') ++i;
  std::size_t int_digits = 0;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i, ++int_digits;
  if (int_digits == 0) return false;
  if (i == text.size()) return true;
  if (text[i] != '.') return false;
  ++i;
  std::size_t frac_digits = 0;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i, ++frac_digits;
  return frac_digits > 0 && i == text.size();
}

double parse_decimal(std::string_view text) {
  if (!is_decimal(text)) {
    throw Error(ErrorCode::InvalidArgument, "not a decimal: '" + std::string(text) + "'");
  }
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, "decimal out of range: '" + std::string(text) + "'");
  }
  return v;
}

std::string format_decimal(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::UnsupportedValue, "non-finite value has no decimal form");
  }
  if (value == 0) return "0";  // also folds -0
  char buf[512];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc()) throw Error(ErrorCode::UnsupportedValue, "decimal formatting failed");
  return std::string(buf, ptr);
}

std::string to_payload(const SensorReading& reading) {
  Json j = {
      {"sensor_id", reading.sensor_id},
      {"metric", to_string(reading.metric)},
      {"value", reading.value},
  };
  return canonical_json(j);
}

SensorReading parse_sensor_reading(std::string_view payload, Timestamp timestamp) {
  Json j = parse_json(payload);
  auto bad = [](const std::string& why) {
    return Error(ErrorCode::InvalidTransaction, "reading: " + why);
  };
  if (!j.is_object()) throw bad("expected object");
  auto sensor = j.find("sensor_id");
  auto metric = j.find("metric");
  auto value = j.find("value");
  if (sensor == j.end() || !sensor->is_string()) throw bad("sensor_id");
  if (metric == j.end() || !metric->is_string()) throw bad("metric");
  if (value == j.end() || !value->is_string() || !is_decimal(value->get_ref<const std::string&>())) {
    throw bad("value must be a decimal string");
  }
  SensorReading r;
  r.sensor_id = sensor->get<std::string>();
  try {
    r.metric = metric_from_string(metric->get_ref<const std::string&>());
  } catch (const Error& e) {
    throw bad(e.what());
  }
  r.value = value->get<std::string>();
  r.timestamp = timestamp;
  return r;
}

Transaction make_reading_transaction(const std::string& channel_id,
                                     const SensorReading& reading) {
  return make_transaction(channel_id, reading.timestamp, TxKind::RawReading,
                          to_payload(reading), reading.sensor_id);
}

std::vector<SensorReading> readings_in_window(const Ledger& ledger, Timestamp from,
                                              Timestamp to) {
  if (!(from < to)) throw Error(ErrorCode::InvalidWindow, "window must satisfy from < to");
  std::vector<SensorReading> out;
  for (const auto& block : ledger.blocks()) {
    for (const auto& tx : block.transactions) {
      if (tx.kind != TxKind::RawReading) continue;
      if (tx.timestamp < from || tx.timestamp >= to) continue;
      out.push_back(parse_sensor_reading(tx.payload, tx.timestamp));
    }
  }
  return out;
}

PrivateNode::PrivateNode(std::string channel_id, std::set<std::string> authorized_authors,
                         std::size_t batch_size, std::optional<Digest> genesis_anchor)
    : channel_id_(std::move(channel_id)),
      ledger_(genesis(channel_id_, genesis_anchor)),
      authorized_(std::move(authorized_authors)),
      batch_size_(batch_size) {
  if (batch_size_ == 0) throw Error(ErrorCode::InvalidArgument, "batch_size must be positive");
}

void PrivateNode::submit(const Transaction& tx) {
  if (tx.channel_id != channel_id_) {
    throw Error(ErrorCode::WrongChannel, tx.channel_id + " submitted to " + channel_id_);
  }
  if (!authorized_.contains(tx.author_id)) {
    throw Error(ErrorCode::UnauthorizedAuthor, tx.author_id);
  }
  if (!transaction_valid(tx)) {
    throw Error(ErrorCode::InvalidTransaction, "tx_id does not match content");
  }
  if (seen_ids_.contains(tx.tx_id)) {
    throw Error(ErrorCode::DuplicateTransaction, to_hex(tx.tx_id));
  }
  switch (tx.kind) {
    case TxKind::UpdateField:
    case TxKind::AppendToArray: {
      ContextOp op = parse_context_op(tx.payload);
      if ((op.op == OpKind::UpdateField) != (tx.kind == TxKind::UpdateField)) {
        throw Error(ErrorCode::InvalidTransaction, "transaction kind disagrees with payload op");
      }
      projected_state_.apply(op);
      break;
    }
    case TxKind::RawReading:
      parse_sensor_reading(tx.payload, tx.timestamp);
      break;
    case TxKind::Anchor:
    case TxKind::Heartbeat:
      throw Error(ErrorCode::InvalidTransaction,
                  std::string(to_string(tx.kind)) + " does not belong on a private chain");
  }
  seen_ids_.insert(tx.tx_id);
  mempool_.push_back(tx);
}

std::optional<Block> PrivateNode::commit_batch() {
  if (mempool_.empty()) return std::nullopt;
  auto n = std::min(batch_size_, mempool_.size());
  std::vector<Transaction> batch(mempool_.begin(), mempool_.begin() + static_cast<std::ptrdiff_t>(n));

  Timestamp ts = std::max(clock_, ledger_.back().timestamp);
  for (const auto& tx : batch) ts = std::max(ts, tx.timestamp);

  WorldState next_state = state_;
  for (const auto& tx : batch) {
    if (tx.kind == TxKind::UpdateField || tx.kind == TxKind::AppendToArray) {
      next_state.apply(parse_context_op(tx.payload));
    }
  }
  auto [ledger, block] = append_block(std::move(ledger_), std::move(batch), ts);
  ledger_ = std::move(ledger);
  state_ = std::move(next_state);
  mempool_.erase(mempool_.begin(), mempool_.begin() + static_cast<std::ptrdiff_t>(n));
  clock_ = ts;
  return std::move(block);
}

std::size_t PrivateNode::commit_all() {
  std::size_t blocks = 0;
  while (commit_batch()) ++blocks;
  return blocks;
}

PrivateNode PrivateNode::reset_with_anchor(const Digest& anchor) const {
  if (!mempool_.empty()) {
    throw Error(ErrorCode::NonEmptyMempool,
                std::to_string(mempool_.size()) + " pending transactions");
  }
  PrivateNode fresh(channel_id_, authorized_, batch_size_, anchor);
  fresh.clock_ = clock_;
  return fresh;
}

void PrivateNode::advance_clock(Timestamp now) { clock_ = std::max(clock_, now); }

}  // namespace tcgw

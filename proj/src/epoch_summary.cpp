#include "tcgw/epoch_summary.hpp"

#include "tcgw/error.hpp"

namespace tcgw {

namespace {

const Json& member(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorCode::InvalidArgument, std::string("summary is missing '") + key + "'");
  }
  return *it;
}

std::uint64_t uint_member(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::int64_t int_member(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

const std::string& string_member(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be a string");
  }
  return v.get_ref<const std::string&>();
}

}  // namespace

Json to_json(const MetricStats& s) {
  return {
      {"metric", to_string(s.metric)},
      {"count", s.count},
      {"mean", format_decimal(s.mean)},
      {"std_dev", format_decimal(s.std_dev)},
      {"min", format_decimal(s.min)},
      {"max", format_decimal(s.max)},
  };
}

Json to_json(const EpochSummary& s) {
  Json stats = Json::array();
  for (const auto& m : s.stats) stats.push_back(to_json(m));
  return {
      {"channel_id", s.channel_id},
      {"epoch_index", s.epoch_index},
      {"window_start", s.window_start},
      {"window_end", s.window_end},
      {"stats", std::move(stats)},
      {"excluded_count", s.excluded_count},
      {"ledger_head_hash", to_hex(s.ledger_head_hash)},
      {"ledger_height", s.ledger_height},
      {"state_digest", to_hex(s.state_digest)},
  };
}

MetricStats metric_stats_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "stats entry must be an object");
  MetricStats s;
  s.metric = metric_from_string(string_member(j, "metric"));
  s.count = uint_member(j, "count");
  s.mean = parse_decimal(string_member(j, "mean"));
  s.std_dev = parse_decimal(string_member(j, "std_dev"));
  s.min = parse_decimal(string_member(j, "min"));
  s.max = parse_decimal(string_member(j, "max"));
  return s;
}

EpochSummary epoch_summary_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "summary must be an object");
  EpochSummary s;
  s.channel_id = string_member(j, "channel_id");
  s.epoch_index = uint_member(j, "epoch_index");
  s.window_start = int_member(j, "window_start");
  s.window_end = int_member(j, "window_end");
  const Json& stats = member(j, "stats");
  if (!stats.is_array()) throw Error(ErrorCode::InvalidArgument, "'stats' must be an array");
  for (const auto& e : stats) s.stats.push_back(metric_stats_from_json(e));
  s.excluded_count = uint_member(j, "excluded_count");
  s.ledger_head_hash = digest_from_hex(string_member(j, "ledger_head_hash"));
  s.ledger_height = uint_member(j, "ledger_height");
  s.state_digest = digest_from_hex(string_member(j, "state_digest"));
  return s;
}

Digest summary_digest(const EpochSummary& summary) {
  return sha256(canonical_json(to_json(summary)));
}

}  // namespace tcgw

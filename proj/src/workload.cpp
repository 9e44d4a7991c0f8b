#include "tcgw/workload.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tcgw/error.hpp"

namespace tcgw {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr std::uint64_t kOpsStream = 0x6f70732d73747265ULL;  // "ops-stre"

constexpr std::string_view kCulturalOperations[] = {
    "irrigation", "fertilization", "pruning", "weeding", "pest_control", "harvest"};

std::int64_t to_cents(std::string_view decimal) {
  return std::llround(parse_decimal(decimal) * 100.0);
}

std::string format_cents(std::int64_t cents) {
  bool neg = cents < 0;
  std::uint64_t mag = neg ? 0 - static_cast<std::uint64_t>(cents) : static_cast<std::uint64_t>(cents);
  std::string frac = std::to_string(mag % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return (neg ? "-" : "") + std::to_string(mag / 100) + "." + frac;
}

[[noreturn]] void config_error(const std::string& why) {
  throw Error(ErrorCode::InvalidArgument, "scenario config: " + why);
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!j.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      config_error("unknown key '" + key + "' in " + where);
    }
  }
}

std::uint64_t get_uint(const Json& j, const char* key, std::uint64_t fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer() && it->get<std::int64_t>() >= 0) return it->get<std::uint64_t>();
  config_error(std::string("'") + key + "' must be a non-negative integer");
}

std::int64_t get_int(const Json& j, const char* key, std::int64_t fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) config_error(std::string("'") + key + "' must be an integer");
  return it->get<std::int64_t>();
}

std::string get_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    config_error(std::string("'") + key + "' must be a string");
  }
  return it->get<std::string>();
}

// Decimals in configs are strings; integers are accepted as a convenience.
std::string get_decimal(const Json& j, const char* key, std::string fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  std::string text;
  if (it->is_string()) {
    text = it->get<std::string>();
  } else if (it->is_number_integer()) {
    text = std::to_string(it->get<std::int64_t>());
  } else {
    config_error(std::string("'") + key + "' must be a decimal string");
  }
  if (!is_decimal(text)) config_error(std::string("'") + key + "' is not a decimal: " + text);
  return text;
}

template <typename Fn>
auto with_config_errors(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw;
    throw Error(ErrorCode::InvalidArgument, std::string("scenario config: ") + e.what());
  }
}

}  // namespace

std::uint64_t Rng::splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t st = seed;
  for (auto& word : s_) word = splitmix64(st);
}

Rng Rng::from_state(const std::array<std::uint64_t, 4>& state) {
  Rng r(0);
  r.s_ = state;
  return r;
}

Rng Rng::for_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t st = seed;
  st = splitmix64(st) ^ a;
  st = splitmix64(st) ^ b;
  return Rng(splitmix64(st));
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::InvalidArgument, "Rng::below needs bound > 0");
  const std::uint64_t limit = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    std::uint64_t x = next();
    if (x >= limit) return x % bound;
  }
}

std::string_view to_string(Product product) {
  switch (product) {
    case Product::Asparagus: return "asparagus";
    case Product::Pomegranate: return "pomegranate";
    case Product::Almond: return "almond";
    case Product::Tomato: return "tomato";
    case Product::DurumWheat: return "durum_wheat";
  }
  return "unknown";
}

Product product_from_string(std::string_view name) {
  for (auto p : {Product::Asparagus, Product::Pomegranate, Product::Almond, Product::Tomato,
                 Product::DurumWheat}) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown product '" + std::string(name) + "'");
}

std::vector<SensorSpec> default_sensors(const std::string& channel_id) {
  return {
      {channel_id + "-temp", Metric::TemperatureC, 3600, "5", "35"},
      {channel_id + "-hum", Metric::HumidityPct, 3600, "20", "90"},
      {channel_id + "-rain", Metric::RainPct, kDay, "0", "100"},
      {channel_id + "-wind", Metric::WindSpeedMs, 3600, "0", "20"},
  };
}

std::vector<ValidityRange> default_ranges() {
  return {
      ValidityRange::from_decimals(Metric::TemperatureC, "-20", "60"),
      ValidityRange::from_decimals(Metric::HumidityPct, "0", "100"),
      ValidityRange::from_decimals(Metric::RainPct, "0", "100"),
      ValidityRange::from_decimals(Metric::WindSpeedMs, "0", "60"),
  };
}

ScenarioConfig default_scenario(std::uint64_t base_seed) {
  ScenarioConfig cfg;
  cfg.ranges = default_ranges();
  std::uint64_t ops = 2;
  for (auto p : {Product::Asparagus, Product::Pomegranate, Product::Almond, Product::Tomato,
                 Product::DurumWheat}) {
    FieldConfig f;
    f.channel_id = "field-" + std::string(to_string(p));
    f.product = p;
    f.sensors = default_sensors(f.channel_id);
    f.fault_rate = 0.01;
    f.cultural_operations_per_epoch = ops++;
    cfg.fields.push_back(std::move(f));
  }
  override_seeds(cfg, base_seed);
  return cfg;
}

void override_seeds(ScenarioConfig& cfg, std::uint64_t base_seed) {
  std::uint64_t st = base_seed;
  for (auto& f : cfg.fields) f.seed = Rng::splitmix64(st);
}

ScenarioConfig scenario_from_json(const Json& j) {
  return with_config_errors([&] {
    check_keys(j,
               {"fields", "epoch_length", "epochs", "ranges", "validators",
                "confirmations_required", "batch_size", "start_time"},
               "scenario");
    ScenarioConfig cfg;
    cfg.epoch_length = get_int(j, "epoch_length", kDefaultEpochLength);
    cfg.epochs = get_uint(j, "epochs", 2);
    cfg.validators = get_uint(j, "validators", 3);
    cfg.confirmations_required = get_uint(j, "confirmations_required", kDefaultConfirmations);
    cfg.batch_size = get_uint(j, "batch_size", kDefaultBatchSize);
    cfg.start_time = get_int(j, "start_time", kDefaultStartTime);
    if (cfg.epoch_length <= 0) config_error("epoch_length must be positive");
    if (cfg.epochs == 0) config_error("epochs must be at least 1");
    if (cfg.validators == 0) config_error("validators must be at least 1");
    if (cfg.confirmations_required == 0) config_error("confirmations_required must be positive");
    if (cfg.batch_size == 0) config_error("batch_size must be positive");

    if (auto it = j.find("ranges"); it == j.end()) {
      cfg.ranges = default_ranges();
    } else {
      if (!it->is_array()) config_error("'ranges' must be an array");
      for (const auto& r : *it) {
        check_keys(r, {"metric", "min_valid", "max_valid"}, "range");
        cfg.ranges.push_back(ValidityRange::from_decimals(metric_from_string(get_string(r, "metric")),
                                                          get_decimal(r, "min_valid", ""),
                                                          get_decimal(r, "max_valid", "")));
      }
      filter_out_of_scale({}, cfg.ranges);
    }

    auto fields = j.find("fields");
    if (fields == j.end() || !fields->is_array() || fields->empty()) {
      config_error("'fields' must be a non-empty array");
    }
    std::set<std::string> channels;
    for (const auto& fj : *fields) {
      check_keys(fj,
                 {"channel_id", "product", "sensors", "fault_rate", "seed",
                  "cultural_operations_per_epoch"},
                 "field");
      FieldConfig f;
      f.channel_id = get_string(fj, "channel_id");
      if (f.channel_id.empty() || f.channel_id == kPublicChainId) {
        config_error("invalid channel_id '" + f.channel_id + "'");
      }
      if (!channels.insert(f.channel_id).second) config_error("duplicate channel " + f.channel_id);
      f.product = product_from_string(get_string(fj, "product"));
      f.fault_rate = parse_decimal(get_decimal(fj, "fault_rate", "0"));
      if (f.fault_rate < 0 || f.fault_rate > 1) config_error("fault_rate must lie in [0, 1]");
      f.seed = get_uint(fj, "seed", 0);
      f.cultural_operations_per_epoch = get_uint(fj, "cultural_operations_per_epoch", 2);
      if (auto s = fj.find("sensors"); s == fj.end()) {
        f.sensors = default_sensors(f.channel_id);
      } else {
        if (!s->is_array() || s->empty()) config_error("'sensors' must be a non-empty array");
        for (const auto& sj : *s) {
          check_keys(sj, {"sensor_id", "metric", "sampling_interval", "lo", "hi"}, "sensor");
          SensorSpec spec;
          spec.sensor_id = get_string(sj, "sensor_id");
          spec.metric = metric_from_string(get_string(sj, "metric"));
          spec.sampling_interval = get_int(sj, "sampling_interval", 3600);
          spec.lo = get_decimal(sj, "lo", "0");
          spec.hi = get_decimal(sj, "hi", "1");
          if (spec.sampling_interval <= 0) config_error("sampling_interval must be positive");
          if (parse_decimal(spec.lo) > parse_decimal(spec.hi)) config_error("sensor lo exceeds hi");
          f.sensors.push_back(std::move(spec));
        }
      }
      cfg.fields.push_back(std::move(f));
    }
    return cfg;
  });
}

Json to_json(const ScenarioConfig& cfg) {
  Json ranges = Json::array();
  for (const auto& r : cfg.ranges) {
    ranges.push_back({{"metric", to_string(r.metric)},
                      {"min_valid", format_decimal(r.min_valid)},
                      {"max_valid", format_decimal(r.max_valid)}});
  }
  Json fields = Json::array();
  for (const auto& f : cfg.fields) {
    Json sensors = Json::array();
    for (const auto& s : f.sensors) {
      sensors.push_back({{"sensor_id", s.sensor_id},
                         {"metric", to_string(s.metric)},
                         {"sampling_interval", s.sampling_interval},
                         {"lo", s.lo},
                         {"hi", s.hi}});
    }
    fields.push_back({{"channel_id", f.channel_id},
                      {"product", to_string(f.product)},
                      {"sensors", std::move(sensors)},
                      {"fault_rate", format_decimal(f.fault_rate)},
                      {"seed", f.seed},
                      {"cultural_operations_per_epoch", f.cultural_operations_per_epoch}});
  }
  return {{"fields", std::move(fields)},
          {"epoch_length", cfg.epoch_length},
          {"epochs", cfg.epochs},
          {"ranges", std::move(ranges)},
          {"validators", cfg.validators},
          {"confirmations_required", cfg.confirmations_required},
          {"batch_size", cfg.batch_size},
          {"start_time", cfg.start_time}};
}

std::vector<SensorReading> generate_readings(const FieldConfig& cfg,
                                             const std::vector<ValidityRange>& ranges,
                                             Timestamp window_start, Timestamp window_end) {
  if (!(window_start < window_end)) {
    throw Error(ErrorCode::InvalidWindow, "window must satisfy start < end");
  }
  struct Stamped {
    SensorReading reading;
    std::size_t sensor;
  };
  std::vector<Stamped> all;
  for (std::size_t i = 0; i < cfg.sensors.size(); ++i) {
    const SensorSpec& s = cfg.sensors[i];
    if (s.sampling_interval <= 0) {
      throw Error(ErrorCode::InvalidArgument, "sampling_interval must be positive");
    }
    const std::int64_t lo = to_cents(s.lo);
    const std::int64_t hi = to_cents(s.hi);
    if (lo > hi) throw Error(ErrorCode::InvalidArgument, "sensor lo exceeds hi");

    std::int64_t spike = hi * 10;
    for (const auto& r : ranges) {
      if (r.metric == s.metric) spike = std::llround(r.max_valid * 100.0) * 10;
    }

    Rng rng = Rng::for_stream(cfg.seed, i, static_cast<std::uint64_t>(window_start));
    for (Timestamp t = window_start; t < window_end; t += s.sampling_interval) {
      const bool fault = rng.uniform() < cfg.fault_rate;
      const std::int64_t cents =
          lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo) + 1));
      all.push_back({{s.sensor_id, s.metric, format_cents(fault ? spike : cents), t}, i});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Stamped& a, const Stamped& b) {
    return a.reading.timestamp != b.reading.timestamp ? a.reading.timestamp < b.reading.timestamp
                                                      : a.sensor < b.sensor;
  });
  std::vector<SensorReading> out;
  out.reserve(all.size());
  for (auto& s : all) out.push_back(std::move(s.reading));
  return out;
}

std::string lot_document_id(const FieldConfig& cfg) {
  return std::string(to_string(cfg.product)) + "-lot";
}
std::string operator_identity(const FieldConfig& cfg) { return "operator-" + cfg.channel_id; }
std::string gateway_identity(const FieldConfig& cfg) { return "gateway-" + cfg.channel_id; }

std::vector<TimedOp> generate_context_ops(const FieldConfig& cfg, Timestamp window_start,
                                          Timestamp window_end) {
  if (!(window_start < window_end)) {
    throw Error(ErrorCode::InvalidWindow, "window must satisfy start < end");
  }
  Rng rng = Rng::for_stream(cfg.seed, kOpsStream, static_cast<std::uint64_t>(window_start));
  const auto span = static_cast<std::uint64_t>(window_end - window_start);
  const std::string doc = lot_document_id(cfg);

  std::vector<TimedOp> out;
  ContextOp density{OpKind::UpdateField, doc, PathExpr({"Plant density"}),
                    format_cents(300 + static_cast<std::int64_t>(rng.below(301)))};
  out.push_back({window_start + static_cast<Timestamp>(rng.below(span)), std::move(density)});
  for (std::uint64_t k = 0; k < cfg.cultural_operations_per_epoch; ++k) {
    auto when = window_start + static_cast<Timestamp>(rng.below(span));
    auto kind = kCulturalOperations[rng.below(std::size(kCulturalOperations))];
    ContextOp op{OpKind::AppendToArray, doc, PathExpr({"Cultural Operations"}),
                 Json{{"op", kind}, {"date", when}}};
    out.push_back({when, std::move(op)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TimedOp& a, const TimedOp& b) { return a.timestamp < b.timestamp; });
  return out;
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  if (cfg.fields.empty()) throw Error(ErrorCode::InvalidArgument, "scenario has no fields");
  if (cfg.epochs == 0) throw Error(ErrorCode::InvalidArgument, "scenario needs at least one epoch");

  std::vector<const FieldConfig*> order;
  for (const auto& f : cfg.fields) order.push_back(&f);
  std::sort(order.begin(), order.end(),
            [](auto* a, auto* b) { return a->channel_id < b->channel_id; });

  std::vector<std::string> validators;
  for (std::uint64_t v = 0; v < cfg.validators; ++v) {
    validators.push_back("validator-" + std::to_string(v));
  }
  std::set<std::string> gateways;
  for (auto* f : order) gateways.insert(gateway_identity(*f));

  ScenarioReport report{{}, {}, PublicChain(validators, gateways, cfg.confirmations_required), true};

  std::vector<PrivateNode> nodes;
  std::vector<Gateway> gws;
  for (auto* f : order) {
    std::set<std::string> authors{operator_identity(*f)};
    for (const auto& s : f->sensors) authors.insert(s.sensor_id);
    nodes.emplace_back(f->channel_id, std::move(authors), cfg.batch_size);
    gws.emplace_back(gateway_identity(*f), cfg.ranges);
    gws.back().set_event_sink([&report](GatewayEvent ev, const std::string& channel,
                                        std::uint64_t epoch) {
      report.events.push_back({report.events.size(), channel, epoch, ev});
    });
    FieldReport fr;
    fr.channel_id = f->channel_id;
    fr.product = f->product;
    report.fields.push_back(std::move(fr));
  }

  for (std::uint64_t e = 0; e < cfg.epochs; ++e) {
    const Timestamp ws = cfg.start_time + static_cast<Timestamp>(e) * cfg.epoch_length;
    const Timestamp we = ws + cfg.epoch_length;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const FieldConfig& f = *order[i];
      FieldReport& fr = report.fields[i];
      try {
        auto readings = generate_readings(f, cfg.ranges, ws, we);
        auto ops = generate_context_ops(f, ws, we);

        // Chronological submission; readings go first at equal timestamps.
        std::size_t r = 0, o = 0;
        while (r < readings.size() || o < ops.size()) {
          if (o == ops.size() || (r < readings.size() && readings[r].timestamp <= ops[o].timestamp)) {
            nodes[i].submit(make_reading_transaction(f.channel_id, readings[r++]));
          } else {
            nodes[i].submit(make_context_transaction(f.channel_id, ops[o].timestamp, ops[o].op,
                                                     operator_identity(f)));
            ++o;
          }
        }
        nodes[i].commit_all();

        auto rolled = gws[i].rollover_epoch(nodes[i], ws, we, report.chain);
        auto verification = verify_pruned_epoch(rolled.archived, rolled.summary, report.chain,
                                                cfg.ranges);
        report.all_verified = report.all_verified && verification.ok;

        EpochReport er;
        er.summary = rolled.summary;
        er.anchor = rolled.anchor;
        er.generated = readings.size();
        er.excluded = rolled.summary.excluded_count;
        er.kept = er.generated - er.excluded;
        er.context_ops = ops.size();
        er.cultural_operations = f.cultural_operations_per_epoch;
        er.verification = std::move(verification);
        fr.context_ops += er.context_ops;
        fr.cultural_operations += er.cultural_operations;
        fr.epochs.push_back(std::move(er));
        fr.archived.push_back(std::move(rolled.archived));
        nodes[i] = std::move(rolled.node);
      } catch (const Error& err) {
        throw Error(err.code(),
                    "field " + f.channel_id + " epoch " + std::to_string(e) + ": " + err.what());
      }
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) report.fields[i].current = nodes[i].ledger();
  return report;
}

Json to_json(const ScenarioReport& report) {
  Json fields = Json::array();
  std::uint64_t anchors = 0;
  for (const auto& f : report.fields) {
    Json epochs = Json::array();
    for (const auto& e : f.epochs) {
      Json failures = Json::array();
      for (auto c : e.verification.failures) failures.push_back(to_string(c));
      epochs.push_back({
          {"summary", to_json(e.summary)},
          {"anchor",
           {{"anchor_tx_id", to_hex(e.anchor.anchor_tx_id)},
            {"summary_digest", to_hex(e.anchor.summary_digest)},
            {"included_height", e.anchor.included_height.value_or(0)},
            {"confirmed", e.anchor.confirmed}}},
          {"generated", e.generated},
          {"kept", e.kept},
          {"excluded", e.excluded},
          {"context_ops", e.context_ops},
          {"cultural_operations", e.cultural_operations},
          {"verification", {{"ok", e.verification.ok}, {"failures", std::move(failures)}}},
      });
      if (e.anchor.confirmed) ++anchors;
    }
    fields.push_back({
        {"channel_id", f.channel_id},
        {"product", to_string(f.product)},
        {"context_ops", f.context_ops},
        {"cultural_operations", f.cultural_operations},
        {"epochs", std::move(epochs)},
    });
  }
  Json events = Json::array();
  for (const auto& ev : report.events) {
    events.push_back({{"seq", ev.seq},
                      {"channel_id", ev.channel_id},
                      {"epoch_index", ev.epoch_index},
                      {"event", to_string(ev.event)}});
  }
  auto h = head(report.chain.ledger());
  return {
      {"all_verified", report.all_verified},
      {"confirmed_anchors", anchors},
      {"fields", std::move(fields)},
      {"events", std::move(events)},
      {"public_chain", {{"height", h.height}, {"head_hash", to_hex(h.block_hash)}}},
  };
}

}  // namespace tcgw

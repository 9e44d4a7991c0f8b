#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcgw/gateway.hpp"
#include "tcgw/public_chain.hpp"

namespace tcgw {

// xoshiro256** seeded through splitmix64; the stream is fully specified so
// any implementation reproduces it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  // Raw generator state, for reproducing reference vectors.
  static Rng from_state(const std::array<std::uint64_t, 4>& state);
  // Independent stream for a (seed, a, b) triple.
  static Rng for_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

  std::uint64_t next();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, bound), bound > 0. Rejection sampling, no bias.
  std::uint64_t below(std::uint64_t bound);

  static std::uint64_t splitmix64(std::uint64_t& state);

 private:
  std::array<std::uint64_t, 4> s_{};
};

enum class Product { Asparagus, Pomegranate, Almond, Tomato, DurumWheat };
std::string_view to_string(Product product);
Product product_from_string(std::string_view name);

struct SensorSpec {
  std::string sensor_id;
  Metric metric = Metric::TemperatureC;
  std::int64_t sampling_interval = 3600;
  std::string lo = "0";  // uniform(lo, hi), decimal strings
  std::string hi = "1";
};

struct FieldConfig {
  std::string channel_id;
  Product product = Product::Asparagus;
  std::vector<SensorSpec> sensors;
  double fault_rate = 0;
  std::uint64_t seed = 0;
  std::uint64_t cultural_operations_per_epoch = 2;
};

inline constexpr std::int64_t kDay = 86400;
inline constexpr std::int64_t kDefaultEpochLength = 30 * kDay;
inline constexpr Timestamp kDefaultStartTime = 1672531200;  // 2023-01-01

struct ScenarioConfig {
  std::vector<FieldConfig> fields;
  std::int64_t epoch_length = kDefaultEpochLength;
  std::uint64_t epochs = 2;
  std::vector<ValidityRange> ranges;
  std::uint64_t validators = 3;
  std::uint64_t confirmations_required = kDefaultConfirmations;
  std::size_t batch_size = kDefaultBatchSize;
  Timestamp start_time = kDefaultStartTime;
};

// One sensor per metric, with the documented uniform defaults.
std::vector<SensorSpec> default_sensors(const std::string& channel_id);
std::vector<ValidityRange> default_ranges();
// The five-field agri-food deployment, two monthly epochs.
ScenarioConfig default_scenario(std::uint64_t base_seed = 1);

// Throws Error(InvalidArgument) on any schema violation.
ScenarioConfig scenario_from_json(const Json& j);
Json to_json(const ScenarioConfig& cfg);
// Replaces every field seed with one derived from `base_seed`.
void override_seeds(ScenarioConfig& cfg, std::uint64_t base_seed);

// One reading per sensor per sampling interval in [window_start, window_end),
// ordered by time then sensor. With probability fault_rate a value is
// replaced by ten times its metric's max_valid (or the sensor's hi bound if
// no range is configured).
std::vector<SensorReading> generate_readings(const FieldConfig& cfg,
                                             const std::vector<ValidityRange>& ranges,
                                             Timestamp window_start,
                                             Timestamp window_end);

struct TimedOp {
  Timestamp timestamp = 0;
  ContextOp op;
};

std::string lot_document_id(const FieldConfig& cfg);
std::string operator_identity(const FieldConfig& cfg);
std::string gateway_identity(const FieldConfig& cfg);

// One Plant density update plus cultural_operations_per_epoch appends to the
// "Cultural Operations" array of the field's lot document.
std::vector<TimedOp> generate_context_ops(const FieldConfig& cfg,
                                          Timestamp window_start,
                                          Timestamp window_end);

struct EpochReport {
  EpochSummary summary;
  AnchorRecord anchor;
  std::uint64_t generated = 0;
  std::uint64_t kept = 0;
  std::uint64_t excluded = 0;
  std::uint64_t context_ops = 0;
  std::uint64_t cultural_operations = 0;
  EpochVerification verification;
};

struct FieldReport {
  std::string channel_id;
  Product product = Product::Asparagus;
  std::vector<EpochReport> epochs;
  std::vector<Ledger> archived;  // one pre-reset ledger per epoch
  Ledger current;                // ledger after the last reset
  std::uint64_t context_ops = 0;
  std::uint64_t cultural_operations = 0;
};

struct TraceEvent {
  std::uint64_t seq = 0;
  std::string channel_id;
  std::uint64_t epoch_index = 0;
  GatewayEvent event = GatewayEvent::AnchorSubmitted;
};

struct ScenarioReport {
  std::vector<FieldReport> fields;  // sorted by channel_id
  std::vector<TraceEvent> events;
  PublicChain chain;
  bool all_verified = true;
};

// Errors from the modules are rethrown with field/epoch context in the message
// (the ErrorCode is preserved).
ScenarioReport run_scenario(const ScenarioConfig& cfg);

// Ledgers are written as files, not embedded.
Json to_json(const ScenarioReport& report);

}  // namespace tcgw

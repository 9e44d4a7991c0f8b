#include <doctest.h>

#include <cmath>
#include <random>

#include "tcgw/gateway.hpp"
#include "test_support.hpp"

using namespace tcgw;
using tcgw::testing::code_of;
using tcgw::testing::reading_tx;

namespace {

std::vector<ValidityRange> ranges() {
  return {ValidityRange::from_decimals(Metric::TemperatureC, "-20", "60"),
          ValidityRange::from_decimals(Metric::HumidityPct, "0", "100")};
}

SensorReading temp(const std::string& v, Timestamp ts = 0) {
  return {"s1", Metric::TemperatureC, v, ts};
}

// Public side that refuses every anchor.
struct RejectingChain : PublicChainHandle {
  AnchorRecord submit_anchor(const EpochSummary&, const std::string& author) override {
    throw Error(ErrorCode::UnknownGateway, author);
  }
  std::optional<AnchorRecord> await_confirmation(const std::string&, std::uint64_t,
                                                 std::uint64_t) override {
    return std::nullopt;
  }
};

// Accepts anchors but never confirms them.
struct StalledChain : PublicChainHandle {
  PublicChain inner{{"v1"}, {"gw"}};
  AnchorRecord submit_anchor(const EpochSummary& s, const std::string& a) override {
    return inner.submit_anchor(s, a);
  }
  std::optional<AnchorRecord> await_confirmation(const std::string&, std::uint64_t,
                                                 std::uint64_t) override {
    return std::nullopt;
  }
};

PrivateNode filled_node(std::size_t n, Timestamp start, std::uint64_t seed) {
  PrivateNode node("fieldA", {"s1", "s2", "op"});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    auto metric = i % 2 ? Metric::HumidityPct : Metric::TemperatureC;
    std::string value = std::to_string(static_cast<int>(rng() % 120) - 10) + "." +
                        std::to_string(rng() % 100);
    node.submit(reading_tx("fieldA", i % 3 ? "s1" : "s2", metric, value,
                           start + static_cast<Timestamp>(i) * 60));
  }
  node.submit(make_context_transaction(
      "fieldA", start, {OpKind::UpdateField, "lot", PathExpr({"Plant density"}), "4.2"}, "op"));
  node.commit_all();
  return node;
}

}  // namespace

TEST_CASE("filter_out_of_scale") {
  auto r = filter_out_of_scale({temp("21.5"), temp("999"), temp("60"), temp("-20"), temp("-20.01")},
                               ranges());
  REQUIRE(r.kept.size() == 3);
  CHECK(r.kept[0].value == "21.5");
  CHECK(r.kept[1].value == "60");
  CHECK(r.kept[2].value == "-20");
  REQUIRE(r.excluded.size() == 2);
  CHECK(r.excluded[0].value == "999");

  // No range for rain: kept regardless.
  auto rain = filter_out_of_scale({{"r", Metric::RainPct, "5000", 0}}, ranges());
  CHECK(rain.kept.size() == 1);

  auto dup = ranges();
  dup.push_back(ValidityRange::from_decimals(Metric::TemperatureC, "0", "1"));
  CHECK(code_of([&] { filter_out_of_scale({}, dup); }) == ErrorCode::DuplicateRange);
  CHECK(code_of([&] { Gateway("gw", dup); }) == ErrorCode::DuplicateRange);
  CHECK(code_of([] { ValidityRange::from_decimals(Metric::RainPct, "5", "1"); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("filter partitions readings by the range predicate") {
  std::mt19937_64 rng(17);
  std::vector<SensorReading> in;
  for (int i = 0; i < 1000; ++i) {
    in.push_back(temp(std::to_string(static_cast<int>(rng() % 200) - 100), i));
  }
  auto r = filter_out_of_scale(in, ranges());
  CHECK(r.kept.size() + r.excluded.size() == in.size());
  for (const auto& k : r.kept) {
    double v = std::stod(k.value);
    CHECK((v >= -20 && v <= 60));
  }
  for (const auto& e : r.excluded) {
    double v = std::stod(e.value);
    CHECK((v < -20 || v > 60));
  }
  // Order preserved within each side.
  for (std::size_t i = 1; i < r.kept.size(); ++i) CHECK(r.kept[i - 1].timestamp < r.kept[i].timestamp);
}

TEST_CASE("summarize") {
  auto s = summarize({temp("10"), temp("20"), temp("30")});
  REQUIRE(s.size() == 1);
  CHECK(s[0].count == 3);
  CHECK(s[0].mean == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(s[0].std_dev == doctest::Approx(8.164965809277260).epsilon(1e-12));
  CHECK(s[0].min == 10);
  CHECK(s[0].max == 30);

  auto single = summarize({temp("7.5")});
  CHECK(single[0].mean == 7.5);
  CHECK(single[0].std_dev == 0);
  CHECK(single[0].min == 7.5);
  CHECK(single[0].max == 7.5);

  CHECK(summarize({}).empty());

  auto mixed = summarize({{"h", Metric::HumidityPct, "50", 0}, temp("1")});
  REQUIRE(mixed.size() == 2);
  CHECK(mixed[0].metric == Metric::TemperatureC);
  CHECK(mixed[1].metric == Metric::HumidityPct);
}

TEST_CASE("summarize agrees with a two-pass computation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SensorReading> in;
    std::size_t n = 1 + rng() % 10000;
    for (std::size_t i = 0; i < n; ++i) {
      auto metric = kAllMetrics[rng() % 4];
      double v = static_cast<double>(rng() % 2000000) / 100.0 - 10000.0;
      in.push_back({"s", metric, format_decimal(v), static_cast<Timestamp>(i)});
    }
    CHECK(tcgw::testing::stats_match_reference(summarize(in), tcgw::testing::two_pass_stats(in)));
  }
}

TEST_CASE("summarize is stable on large offsets") {
  std::vector<SensorReading> in;
  for (int i = 0; i < 1000; ++i) in.push_back(temp(i % 2 ? "1000000000.1" : "1000000000.3"));
  auto s = summarize(in);
  CHECK(s[0].std_dev == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("epoch summary json round trip") {
  EpochSummary s;
  s.channel_id = "fieldA";
  s.epoch_index = 3;
  s.window_start = 100;
  s.window_end = 200;
  s.stats = summarize({temp("10"), temp("20"), temp("30")});
  s.excluded_count = 4;
  s.ledger_head_hash = sha256(std::string_view{"h"});
  s.ledger_height = 9;
  s.state_digest = sha256(std::string_view{"s"});
  auto back = epoch_summary_from_json(parse_json(canonical_json(to_json(s))));
  CHECK(back == s);
  CHECK(summary_digest(back) == summary_digest(s));
  auto j = to_json(s);
  CHECK(j.at("stats").at(0).at("mean") == "20");
  CHECK(j.at("ledger_head_hash") == to_hex(s.ledger_head_hash));
}

TEST_CASE("rollover: summarize, publish, prune") {
  auto node = filled_node(300, 1000, 1);
  PublicChain pub({"v1", "v2", "v3"}, {"gw"});
  Gateway gw("gw", ranges());
  std::vector<std::string> events;
  gw.set_event_sink([&](GatewayEvent e, const std::string& c, std::uint64_t k) {
    events.push_back(std::string(to_string(e)) + ":" + c + ":" + std::to_string(k));
  });

  auto r = gw.rollover_epoch(node, 1000, 1000 + 300 * 60, pub);
  CHECK(events == std::vector<std::string>{"anchor_submitted:fieldA:0", "anchor_confirmed:fieldA:0",
                                           "ledger_reset:fieldA:0"});

  std::uint64_t counted = r.summary.excluded_count;
  for (const auto& s : r.summary.stats) counted += s.count;
  CHECK(counted == 300);
  auto all = node.readings_in_window(1000, 1000 + 300 * 60);
  auto filtered = filter_out_of_scale(all, ranges());
  CHECK(r.summary.excluded_count == filtered.excluded.size());
  CHECK(tcgw::testing::stats_match_reference(r.summary.stats,
                                             tcgw::testing::two_pass_stats(filtered.kept)));
  CHECK(r.summary.ledger_head_hash == head(node.ledger()).block_hash);
  CHECK(r.summary.ledger_height == head(node.ledger()).height);
  CHECK(r.summary.state_digest == state_digest(node.state()));

  CHECK(r.anchor.confirmed);
  CHECK(r.anchor.summary_digest == summary_digest(r.summary));
  CHECK(pub.ledger().size() - 1 >= *r.anchor.included_height + pub.confirmations_required());
  CHECK(r.node.ledger().size() == 1);
  CHECK(r.node.ledger().genesis_anchor() == r.anchor.anchor_tx_id);
  CHECK(r.archived == node.ledger());
  CHECK(gw.next_epoch() == 1);

  auto v = verify_pruned_epoch(r.archived, r.summary, pub, ranges());
  CHECK(v.ok);
  CHECK(v.failures.empty());
}

TEST_CASE("rollover preconditions") {
  PublicChain pub({"v1"}, {"gw"});
  Gateway gw("gw", ranges());

  auto node = filled_node(10, 1000, 2);
  node.submit(reading_tx("fieldA", "s1", Metric::TemperatureC, "1", 5000));
  CHECK(code_of([&] { gw.rollover_epoch(node, 1000, 10000, pub); }) == ErrorCode::NonEmptyMempool);

  auto ok = filled_node(10, 1000, 2);
  CHECK(code_of([&] { gw.rollover_epoch(ok, 10, 10, pub); }) == ErrorCode::InvalidWindow);
  CHECK(code_of([&] { gw.rollover_epoch(ok, 1000, 1200, pub); }) == ErrorCode::InvalidWindow);
  CHECK(pub.ledger().size() == 1);

  auto r = gw.rollover_epoch(ok, 1000, 2000, pub);
  CHECK(code_of([&] { gw.rollover_epoch(r.node, 2500, 3000, pub); }) == ErrorCode::InvalidWindow);
  auto r2 = gw.rollover_epoch(r.node, 2000, 3000, pub);
  CHECK(r2.summary.epoch_index == 1);
  CHECK(r2.summary.stats.empty());
  CHECK(r2.summary.ledger_height == 0);
}

TEST_CASE("failed publish leaves the private node untouched") {
  auto node = filled_node(50, 1000, 3);
  const auto before = head(node.ledger());
  const auto digest = state_digest(node.state());
  std::vector<GatewayEvent> events;

  RejectingChain reject;
  Gateway gw("gw", ranges());
  gw.set_event_sink([&](GatewayEvent e, const std::string&, std::uint64_t) { events.push_back(e); });
  CHECK(code_of([&] { gw.rollover_epoch(node, 1000, 10000, reject); }) == ErrorCode::PublishFailed);

  StalledChain stalled;
  Gateway gw2("gw", ranges());
  gw2.set_event_sink([&](GatewayEvent e, const std::string&, std::uint64_t) { events.push_back(e); });
  CHECK(code_of([&] { gw2.rollover_epoch(node, 1000, 10000, stalled); }) == ErrorCode::PublishFailed);

  CHECK(head(node.ledger()) == before);
  CHECK(state_digest(node.state()) == digest);
  CHECK(gw.next_epoch() == 0);
  for (auto e : events) CHECK(e != GatewayEvent::LedgerReset);
}

TEST_CASE("verify_pruned_epoch detects tampering") {
  auto node = filled_node(120, 1000, 4);
  PublicChain pub({"v1", "v2"}, {"gw"});
  Gateway gw("gw", ranges());
  auto r = gw.rollover_epoch(node, 1000, 100000, pub);
  REQUIRE(verify_pruned_epoch(r.archived, r.summary, pub, ranges()).ok);

  auto has = [](const EpochVerification& v, EpochCheck c) {
    return std::find(v.failures.begin(), v.failures.end(), c) != v.failures.end();
  };

  SUBCASE("archive byte flip") {
    auto bytes = encode_ledger(r.archived);
    std::mt19937_64 rng(8);
    int detected = 0, decoded = 0;
    for (int i = 0; i < 50; ++i) {
      auto copy = bytes;
      std::size_t pos = 5 + rng() % (copy.size() - 5);
      copy[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
      try {
        auto tampered = decode_ledger(copy);
        ++decoded;
        auto v = verify_pruned_epoch(tampered, r.summary, pub, ranges());
        if (!v.ok) ++detected;
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CorruptFile);
      }
    }
    CHECK(detected == decoded);
  }
  SUBCASE("altered mean") {
    auto s = r.summary;
    s.stats[0].mean += 0.5;
    auto v = verify_pruned_epoch(r.archived, s, pub, ranges());
    CHECK_FALSE(v.ok);
    CHECK(has(v, EpochCheck::StatsMismatch));
    CHECK(has(v, EpochCheck::AnchorMismatch));
  }
  SUBCASE("excluded count") {
    auto s = r.summary;
    s.excluded_count += 1;
    CHECK(has(verify_pruned_epoch(r.archived, s, pub, ranges()), EpochCheck::StatsMismatch));
  }
  SUBCASE("anchor missing") {
    PublicChain empty({"v1"}, {"gw"});
    auto v = verify_pruned_epoch(r.archived, r.summary, empty, ranges());
    CHECK_FALSE(v.ok);
    CHECK(v.failures == std::vector<EpochCheck>{EpochCheck::AnchorMismatch});
  }
  SUBCASE("wrong ranges") {
    std::vector<ValidityRange> other{ValidityRange::from_decimals(Metric::TemperatureC, "0", "10")};
    CHECK(has(verify_pruned_epoch(r.archived, r.summary, pub, other), EpochCheck::StatsMismatch));
  }
  SUBCASE("truncated archive") {
    auto blocks = r.archived.blocks();
    Ledger shorter = genesis("fieldA");
    for (std::size_t i = 1; i + 1 < blocks.size(); ++i) {
      shorter = append_block(std::move(shorter), blocks[i].transactions, blocks[i].timestamp).first;
    }
    CHECK(has(verify_pruned_epoch(shorter, r.summary, pub, ranges()), EpochCheck::HeadMismatch));
  }
}

TEST_CASE("summary is smaller than the epoch it replaces") {
  auto node = filled_node(2000, 1000, 6);
  PublicChain pub({"v1"}, {"gw"});
  Gateway gw("gw", ranges());
  auto r = gw.rollover_epoch(node, 1000, 1000 + 2000 * 60, pub);
  CHECK(canonical_json(to_json(r.summary)).size() * 20 < ledger_size_bytes(r.archived));
  CHECK(ledger_size_bytes(r.node.ledger()) < 200);
}

TEST_CASE("rollover is reproducible") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto run = [&] {
      auto node = filled_node(30, 1000, seed);
      PublicChain pub({"v1", "v2"}, {"gw"});
      Gateway gw("gw", ranges());
      return gw.rollover_epoch(node, 1000, 5000, pub);
    };
    auto a = run();
    auto b = run();
    CHECK(a.summary == b.summary);
    CHECK(a.anchor == b.anchor);
    CHECK(head(a.node.ledger()) == head(b.node.ledger()));
  }
}

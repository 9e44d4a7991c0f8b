#include <doctest.h>

#include <random>

#include "tcgw/error.hpp"
#include "tcgw/private_chain.hpp"
#include "test_support.hpp"

using namespace tcgw;
using tcgw::testing::code_of;
using tcgw::testing::reading_tx;

namespace {

PrivateNode make_node(std::size_t batch = kDefaultBatchSize) {
  return PrivateNode("fieldA", {"s1", "s2", "op"}, batch);
}

}  // namespace

TEST_CASE("decimals") {
  CHECK(is_decimal("0"));
  CHECK(is_decimal("-12.50"));
  CHECK_FALSE(is_decimal("1e3"));
  CHECK_FALSE(is_decimal("1."));
  CHECK_FALSE(is_decimal(".5"));
  CHECK_FALSE(is_decimal("nan"));
  CHECK_FALSE(is_decimal(""));
  CHECK(parse_decimal("-12.5") == -12.5);
  CHECK(format_decimal(20.0) == "20");
  CHECK(format_decimal(-0.0) == "0");
  CHECK(format_decimal(8.16496580927726) == "8.16496580927726");
  CHECK(format_decimal(1e-7) == "0.0000001");
  for (double v : {0.1, 1.0 / 3.0, 123456.789, -5e-5}) {
    CHECK(parse_decimal(format_decimal(v)) == v);
  }
}

TEST_CASE("submit") {
  auto node = make_node();
  auto tx = reading_tx("fieldA", "s1", Metric::TemperatureC, "21.5", 100);
  node.submit(tx);
  CHECK(node.mempool().size() == 1);
  CHECK(code_of([&] { node.submit(tx); }) == ErrorCode::DuplicateTransaction);
  CHECK(code_of([&] { node.submit(reading_tx("fieldA", "intruder", Metric::TemperatureC, "1", 1)); }) ==
        ErrorCode::UnauthorizedAuthor);
  CHECK(code_of([&] { node.submit(reading_tx("fieldB", "s1", Metric::TemperatureC, "1", 1)); }) ==
        ErrorCode::WrongChannel);
  auto forged = reading_tx("fieldA", "s1", Metric::TemperatureC, "1", 1);
  forged.timestamp = 2;
  CHECK(code_of([&] { node.submit(forged); }) == ErrorCode::InvalidTransaction);
  auto anchor = make_transaction("fieldA", 1, TxKind::Anchor, "{}", "s1");
  CHECK(code_of([&] { node.submit(anchor); }) == ErrorCode::InvalidTransaction);
  CHECK(node.mempool().size() == 1);

  node.commit_all();
  CHECK(code_of([&] { node.submit(tx); }) == ErrorCode::DuplicateTransaction);
}

TEST_CASE("commit_batch drains FIFO in batch_size blocks") {
  auto node = make_node(100);
  std::vector<Digest> order;
  for (int i = 0; i < 250; ++i) {
    auto tx = reading_tx("fieldA", i % 2 ? "s1" : "s2", Metric::HumidityPct,
                         std::to_string(i % 90), 1000 + i);
    order.push_back(tx.tx_id);
    node.submit(tx);
  }
  std::vector<std::size_t> sizes;
  while (auto b = node.commit_batch()) sizes.push_back(b->transactions.size());
  CHECK(sizes == std::vector<std::size_t>{100, 100, 50});

  std::vector<Digest> committed;
  for (const auto& b : node.ledger().blocks()) {
    for (const auto& tx : b.transactions) committed.push_back(tx.tx_id);
  }
  CHECK(committed == order);

  auto before = head(node.ledger());
  CHECK_FALSE(node.commit_batch().has_value());
  CHECK(head(node.ledger()) == before);
}

TEST_CASE("state stays equal to replay after each commit") {
  auto node = make_node(7);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 60; ++i) {
    ContextOp op{rng() % 2 ? OpKind::UpdateField : OpKind::AppendToArray, "lot1",
                 PathExpr({rng() % 2 ? "Cultural Operations" : "Notes"}), std::to_string(i)};
    if (op.op == OpKind::UpdateField) op.path = PathExpr({"Plant density"});
    node.submit(make_context_transaction("fieldA", 100 + i, op, "op"));
    if (rng() % 3 == 0) {
      node.commit_batch();
      CHECK(state_digest(node.state()) == state_digest(replay(node.ledger())));
    }
  }
  node.commit_all();
  CHECK(state_digest(node.state()) == state_digest(replay(node.ledger())));
}

TEST_CASE("conflicting context ops are rejected at submit") {
  auto node = make_node();
  node.submit(make_context_transaction(
      "fieldA", 1, {OpKind::UpdateField, "lot1", PathExpr({"Plant density"}), "4.2"}, "op"));
  CHECK(code_of([&] {
          node.submit(make_context_transaction(
              "fieldA", 2, {OpKind::AppendToArray, "lot1", PathExpr({"Plant density"}), "x"}, "op"));
        }) == ErrorCode::PathTypeConflict);
  CHECK(node.mempool().size() == 1);
  node.commit_all();
  CHECK(read_document(node.state(), "lot1")->body.at("Plant density") == "4.2");
}

TEST_CASE("reset_with_anchor") {
  auto node = make_node();
  node.submit(reading_tx("fieldA", "s1", Metric::TemperatureC, "20", 10));
  auto anchor = sha256(std::string_view{"anchor"});
  CHECK(code_of([&] { node.reset_with_anchor(anchor); }) == ErrorCode::NonEmptyMempool);

  node.commit_all();
  const Ledger archived = node.ledger();
  auto fresh = node.reset_with_anchor(anchor);
  CHECK(fresh.ledger().size() == 1);
  CHECK(fresh.ledger().genesis_anchor() == anchor);
  CHECK(fresh.state().size() == 0);
  CHECK(fresh.channel_id() == "fieldA");
  CHECK(fresh.authorized_authors() == node.authorized_authors());
  CHECK(node.ledger() == archived);
  CHECK(verify_chain(archived).ok);

  fresh.submit(reading_tx("fieldA", "s2", Metric::TemperatureC, "21", 20));
  CHECK(fresh.mempool().size() == 1);
}

TEST_CASE("readings_in_window is half-open") {
  auto node = make_node();
  CHECK(node.readings_in_window(0, 100).empty());
  CHECK(code_of([&] { node.readings_in_window(5, 5); }) == ErrorCode::InvalidWindow);

  node.submit(reading_tx("fieldA", "s1", Metric::TemperatureC, "1", 100));
  node.submit(reading_tx("fieldA", "s1", Metric::TemperatureC, "2", 150));
  node.submit(reading_tx("fieldA", "s1", Metric::TemperatureC, "3", 200));
  node.submit(make_context_transaction(
      "fieldA", 120, {OpKind::UpdateField, "lot", PathExpr({"x"}), "1"}, "op"));
  node.commit_all();
  auto got = node.readings_in_window(100, 200);
  REQUIRE(got.size() == 2);
  CHECK(got[0].value == "1");
  CHECK(got[1].value == "2");
}

TEST_CASE("window count matches a linear scan") {
  auto node = make_node(13);
  std::mt19937_64 rng(9);
  Timestamp ts = 0;
  for (int i = 0; i < 400; ++i) {
    ts += static_cast<Timestamp>(rng() % 50);
    node.submit(reading_tx("fieldA", "s1", Metric::WindSpeedMs, std::to_string(i % 20), ts));
  }
  node.commit_all();
  for (int trial = 0; trial < 20; ++trial) {
    Timestamp from = static_cast<Timestamp>(rng() % 10000);
    Timestamp to = from + 1 + static_cast<Timestamp>(rng() % 5000);
    std::size_t scan = 0;
    for (const auto& b : node.ledger().blocks()) {
      for (const auto& tx : b.transactions) {
        if (tx.kind == TxKind::RawReading && tx.timestamp >= from && tx.timestamp < to) ++scan;
      }
    }
    CHECK(node.readings_in_window(from, to).size() == scan);
  }
}

TEST_CASE("only authorized authors ever reach a block") {
  std::mt19937_64 rng(21);
  for (int run = 0; run < 10; ++run) {
    auto node = make_node(1 + rng() % 20);
    const std::vector<std::string> authors{"s1", "s2", "op", "eve", "mallory"};
    for (int i = 0; i < 200; ++i) {
      const auto& author = authors[rng() % authors.size()];
      try {
        node.submit(reading_tx("fieldA", author, Metric::TemperatureC, std::to_string(i % 40),
                               i));
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnauthorizedAuthor);
      }
      if (rng() % 10 == 0) node.commit_batch();
    }
    node.commit_all();
    for (const auto& b : node.ledger().blocks()) {
      for (const auto& tx : b.transactions) CHECK(node.authorized_authors().contains(tx.author_id));
    }
  }
}

TEST_CASE("sensor reading payloads") {
  SensorReading r{"s1", Metric::RainPct, "12.5", 99};
  auto payload = to_payload(r);
  CHECK(payload == R"({"metric":"rain_pct","sensor_id":"s1","value":"12.5"})");
  CHECK(parse_sensor_reading(payload, 99) == r);
  CHECK(code_of([] { parse_sensor_reading(R"({"metric":"rain_pct","sensor_id":"s1","value":"x"})", 1); }) ==
        ErrorCode::InvalidTransaction);
  CHECK(code_of([] { parse_sensor_reading(R"({"metric":"co2","sensor_id":"s1","value":"1"})", 1); }) ==
        ErrorCode::InvalidTransaction);
}

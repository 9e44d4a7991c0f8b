#include "tcgw/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "tcgw/bench.hpp"
#include "tcgw/error.hpp"
#include "tcgw/gateway.hpp"
#include "tcgw/public_chain.hpp"
#include "tcgw/workload.hpp"

namespace fs = std::filesystem;

namespace tcgw::cli {

namespace {

constexpr const char* kManifest = "manifest.json";

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

std::string archived_name(const std::string& channel, std::uint64_t epoch) {
  return channel + ".epoch" + std::to_string(epoch) + ".tcgw";
}

struct ManifestChannel {
  std::string channel_id;
  std::string lot_document;
  std::string current;
  std::vector<std::pair<std::uint64_t, std::string>> epochs;
};

struct Manifest {
  std::vector<ValidityRange> ranges;
  std::uint64_t confirmations_required = kDefaultConfirmations;
  std::vector<ManifestChannel> channels;
};

Json to_json(const Manifest& m) {
  Json ranges = Json::array();
  for (const auto& r : m.ranges) {
    ranges.push_back({{"metric", to_string(r.metric)},
                      {"min_valid", format_decimal(r.min_valid)},
                      {"max_valid", format_decimal(r.max_valid)}});
  }
  Json channels = Json::array();
  for (const auto& c : m.channels) {
    Json epochs = Json::array();
    for (const auto& [epoch, file] : c.epochs) {
      epochs.push_back({{"epoch_index", epoch}, {"file", file}});
    }
    channels.push_back({{"channel_id", c.channel_id},
                        {"lot_document", c.lot_document},
                        {"current", c.current},
                        {"epochs", std::move(epochs)}});
  }
  return {{"ranges", std::move(ranges)},
          {"confirmations_required", m.confirmations_required},
          {"channels", std::move(channels)}};
}

Manifest load_manifest(const fs::path& archive_dir) {
  Json j = parse_json(read_text(archive_dir / kManifest));
  Manifest m;
  try {
    for (const auto& r : j.at("ranges")) {
      m.ranges.push_back(ValidityRange::from_decimals(
          metric_from_string(r.at("metric").get<std::string>()),
          r.at("min_valid").get<std::string>(), r.at("max_valid").get<std::string>()));
    }
    m.confirmations_required = j.at("confirmations_required").get<std::uint64_t>();
    for (const auto& c : j.at("channels")) {
      ManifestChannel mc;
      mc.channel_id = c.at("channel_id").get<std::string>();
      mc.lot_document = c.at("lot_document").get<std::string>();
      mc.current = c.at("current").get<std::string>();
      for (const auto& e : c.at("epochs")) {
        mc.epochs.emplace_back(e.at("epoch_index").get<std::uint64_t>(),
                               e.at("file").get<std::string>());
      }
      m.channels.push_back(std::move(mc));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("manifest: ") + e.what());
  }
  return m;
}

// Usage-level failures (missing or unreadable inputs) map to exit 2.
bool is_usage_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Io:
    case ErrorCode::MalformedJson:
    case ErrorCode::InvalidArgument:
    case ErrorCode::CorruptFile:
      return true;
    default:
      return false;
  }
}

const MetricStats* find_stats(const EpochSummary& s, Metric m) {
  for (const auto& st : s.stats) {
    if (st.metric == m) return &st;
  }
  return nullptr;
}

void print_table(const ScenarioReport& report, std::ostream& out) {
  out << std::left << std::setw(24) << "channel" << std::setw(7) << "epoch" << std::setw(10)
      << "readings" << std::setw(10) << "excluded" << std::setw(12) << "temp_mean"
      << std::setw(12) << "temp_std" << std::setw(8) << "anchor" << "verified\n";
  for (const auto& f : report.fields) {
    for (const auto& e : f.epochs) {
      const auto* t = find_stats(e.summary, Metric::TemperatureC);
      std::ostringstream mean, sd;
      if (t) {
        mean << std::fixed << std::setprecision(3) << t->mean;
        sd << std::fixed << std::setprecision(3) << t->std_dev;
      }
      out << std::left << std::setw(24) << f.channel_id << std::setw(7) << e.summary.epoch_index
          << std::setw(10) << e.generated << std::setw(10) << e.excluded << std::setw(12)
          << (t ? mean.str() : "-") << std::setw(12) << (t ? sd.str() : "-") << std::setw(8)
          << e.anchor.included_height.value_or(0) << (e.verification.ok ? "ok" : "FAILED")
          << "\n";
    }
  }
}

std::vector<std::uint64_t> parse_levels(const std::string& flag) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(flag);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "bad level '" + item + "'");
    }
    out.push_back(std::stoull(item));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no levels given");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) throw Error(ErrorCode::InvalidArgument, "levels must ascend");
  }
  return out;
}

}  // namespace

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("TCGW_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  std::string s(v);
  if (s.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

int cmd_run(const fs::path& config_path, const fs::path& output_dir, Streams io,
            std::optional<std::uint64_t> seed_override) {
  ScenarioConfig cfg;
  try {
    cfg = scenario_from_json(parse_json(read_text(config_path)));
  } catch (const Error& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (seed_override) override_seeds(cfg, *seed_override);

  std::optional<ScenarioReport> result;
  try {
    result = run_scenario(cfg);
  } catch (const Error& e) {
    io.err << "scenario failed: " << e.what() << "\n";
    return kExitVerifyFailed;
  }
  const ScenarioReport& report = *result;

  try {
    const fs::path archive = output_dir / "archive";
    fs::create_directories(archive);
    Manifest manifest{cfg.ranges, cfg.confirmations_required, {}};
    for (const auto& f : report.fields) {
      const FieldConfig* fc = nullptr;
      for (const auto& c : cfg.fields) {
        if (c.channel_id == f.channel_id) fc = &c;
      }
      ManifestChannel mc{f.channel_id, lot_document_id(*fc), f.channel_id + ".tcgw", {}};
      for (std::size_t k = 0; k < f.archived.size(); ++k) {
        auto name = archived_name(f.channel_id, k);
        save_ledger(f.archived[k], archive / name);
        mc.epochs.emplace_back(k, name);
      }
      save_ledger(f.current, archive / mc.current);
      manifest.channels.push_back(std::move(mc));
    }
    write_text(archive / kManifest, canonical_json(to_json(manifest)) + "\n");
    save_ledger(report.chain.ledger(), output_dir / "public.tcgw");
    write_text(output_dir / "config.json", canonical_json(to_json(cfg)) + "\n");
    write_text(output_dir / "report.json", canonical_json(to_json(report)) + "\n");
  } catch (const std::exception& e) {
    io.err << "cannot write outputs: " << e.what() << "\n";
    return kExitUsage;
  }

  print_table(report, io.out);
  io.out << "confirmed anchors: " << to_json(report).at("confirmed_anchors").get<std::uint64_t>()
         << ", public height " << head(report.chain.ledger()).height << "\n";
  if (!report.all_verified) {
    io.err << "one or more epochs failed verification\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

int cmd_bench(const std::string& levels_flag, const std::string& verify_mode_flag,
              const fs::path& output_dir, std::uint64_t max_level, Streams io) {
  std::vector<std::uint64_t> levels;
  bool verify_mode = false;
  try {
    if (verify_mode_flag == "on") {
      verify_mode = true;
    } else if (verify_mode_flag != "off") {
      throw Error(ErrorCode::InvalidArgument, "--verify-mode must be on or off");
    }
    if (levels_flag.empty()) {
      for (auto l : default_bench_levels()) {
        if (l <= max_level) levels.push_back(l);
      }
    } else {
      levels = parse_levels(levels_flag);
    }
    fs::create_directories(output_dir);
  } catch (const std::exception& e) {
    io.err << "bench: " << e.what() << "\n";
    return kExitUsage;
  }

  auto points = bench_memory(levels);
  auto timed = bench_batch_time(levels, verify_mode);
  for (std::size_t i = 0; i < points.size(); ++i) points[i].batch_seconds = timed[i].batch_seconds;

  try {
    emit_csv(points, output_dir / "table2.csv");
    std::size_t fit_points = 0;
    for (const auto& p : points) fit_points += p.n_existing >= 100;
    if (fit_points >= 2) {
      auto fit = fit_memory(points, 100);
      write_text(output_dir / "fit.json", canonical_json(fit_report(fit, points, verify_mode)) + "\n");
      io.out << "fit (levels >= 100): slope " << fit.slope << " B/tx, intercept " << fit.intercept
             << " B, R^2 " << std::setprecision(6) << fit.r_squared << "\n";
    } else {
      io.out << "fit skipped: fewer than two levels >= 100\n";
    }
  } catch (const std::exception& e) {
    io.err << "bench: " << e.what() << "\n";
    return kExitUsage;
  }
  io.out << render_csv(points);
  return kExitOk;
}

int cmd_verify(const fs::path& archive_dir, const fs::path& chain_path, Streams io) {
  Manifest manifest;
  std::optional<PublicChain> chain;
  try {
    manifest = load_manifest(archive_dir);
    chain.emplace(PublicChain::from_ledger(load_ledger(chain_path),
                                           manifest.confirmations_required));
  } catch (const Error& e) {
    io.err << "verify: " << e.what() << "\n";
    return kExitUsage;
  }

  if (auto rep = verify_chain(chain->ledger()); !rep.ok) {
    io.err << "public chain fails verification at height " << *rep.first_bad_height << " ("
           << to_string(*rep.reason) << ")\n";
    return kExitVerifyFailed;
  }

  std::optional<std::string> first_failure;
  for (const auto& ch : manifest.channels) {
    std::optional<Digest> previous_anchor;
    for (const auto& [epoch, file] : ch.epochs) {
      std::vector<std::string> reasons;
      std::optional<Ledger> archived;
      try {
        archived = load_ledger(archive_dir / file);
      } catch (const Error& e) {
        reasons.push_back(std::string("unreadable archive: ") + e.what());
      }
      auto anchor = chain->find_anchor(ch.channel_id, epoch);
      if (!anchor) reasons.push_back(std::string(to_string(EpochCheck::AnchorMismatch)));
      if (archived && anchor) {
        auto v = verify_pruned_epoch(*archived, anchor->summary, *chain, manifest.ranges);
        for (auto c : v.failures) reasons.push_back(std::string(to_string(c)));
        if (archived->genesis_anchor() != previous_anchor) {
          reasons.push_back("genesis_anchor_mismatch");
        }
      }
      previous_anchor = anchor ? std::optional<Digest>(anchor->anchor_tx_id) : std::nullopt;

      io.out << ch.channel_id << " epoch " << epoch << ": ";
      if (reasons.empty()) {
        io.out << "ok\n";
      } else {
        io.out << "FAILED";
        for (const auto& r : reasons) io.out << " " << r;
        io.out << "\n";
        if (!first_failure) first_failure = ch.channel_id + " epoch " + std::to_string(epoch);
      }
    }
  }
  if (first_failure) {
    io.err << "verification failed: " << *first_failure << "\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

int cmd_trace(const fs::path& chain_path, const std::string& channel_id,
              const std::optional<fs::path>& archive_dir, Streams io) {
  try {
    auto chain = PublicChain::from_ledger(load_ledger(chain_path));
    std::optional<Document> doc;
    if (archive_dir) {
      auto manifest = load_manifest(*archive_dir);
      chain = PublicChain::from_ledger(chain.ledger(), manifest.confirmations_required);
      for (const auto& ch : manifest.channels) {
        if (ch.channel_id != channel_id) continue;
        WorldState ws;
        for (const auto& [epoch, file] : ch.epochs) replay_onto(ws, load_ledger(*archive_dir / file));
        replay_onto(ws, load_ledger(*archive_dir / ch.current));
        doc = read_document(ws, ch.lot_document);
        if (!doc) doc = Document{ch.lot_document, Json::object()};
      }
    }
    io.out << canonical_json(trace_product(chain, channel_id, doc)) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    io.err << "trace: " << e.what() << "\n";
    return is_usage_error(e) ? kExitUsage : kExitVerifyFailed;
  }
}

int cmd_inspect(const fs::path& ledger_path, Streams io) {
  Ledger ledger;
  try {
    ledger = load_ledger(ledger_path);
  } catch (const Error& e) {
    io.err << "inspect: " << e.what() << "\n";
    return kExitUsage;
  }
  Json blocks = Json::array();
  for (const auto& b : ledger.blocks()) {
    Json txs = Json::array();
    for (const auto& tx : b.transactions) {
      Json payload = is_canonical_json(tx.payload) ? parse_json(tx.payload) : Json(tx.payload);
      txs.push_back({{"tx_id", to_hex(tx.tx_id)},
                     {"channel_id", tx.channel_id},
                     {"timestamp", tx.timestamp},
                     {"kind", to_string(tx.kind)},
                     {"author_id", tx.author_id},
                     {"payload", std::move(payload)}});
    }
    blocks.push_back({{"height", b.height},
                      {"previous_hash", to_hex(b.previous_hash)},
                      {"timestamp", b.timestamp},
                      {"tx_root", to_hex(b.tx_root)},
                      {"block_hash", to_hex(b.block_hash)},
                      {"transactions", std::move(txs)}});
  }
  auto rep = verify_chain(ledger);
  Json verification = {{"ok", rep.ok}};
  if (!rep.ok) {
    verification["first_bad_height"] = *rep.first_bad_height;
    verification["reason"] = to_string(*rep.reason);
  }
  Json out = {{"chain_id", ledger.chain_id()},
              {"genesis_anchor", ledger.genesis_anchor() ? Json(to_hex(*ledger.genesis_anchor()))
                                                         : Json(nullptr)},
              {"size_bytes", ledger_size_bytes(ledger)},
              {"blocks", std::move(blocks)},
              {"verification", std::move(verification)}};
  try {
    io.out << canonical_json(out) << "\n";
  } catch (const Error& e) {
    io.err << "inspect: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace tcgw::cli

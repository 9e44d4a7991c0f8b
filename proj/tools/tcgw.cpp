#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tcgw/cli.hpp"

int main(int argc, char** argv) {
  using namespace tcgw::cli;
  CLI::App app{"Two-tier IoT ledger simulator: private field chains, edge gateway, public anchors"};
  app.require_subcommand(1);

  std::string config, out_dir;
  auto* run = app.add_subcommand("run", "Run a scenario and write report, ledgers and public chain");
  run->add_option("--config", config, "Scenario config JSON")->required();
  run->add_option("--out", out_dir, "Output directory")->required();

  std::string levels, verify_mode = "on", bench_out;
  std::uint64_t max_level = 100000;
  auto* bench = app.add_subcommand("bench", "Measure ledger storage and batch commit time");
  bench->add_option("--levels", levels, "Comma-separated ascending transaction counts");
  bench->add_option("--verify-mode", verify_mode, "on|off: include a full chain verification")
      ->capture_default_str();
  bench->add_option("--max-level", max_level, "Cap applied to the default levels")
      ->capture_default_str();
  bench->add_option("--out", bench_out, "Output directory")->required();

  std::string archive, chain;
  auto* verify = app.add_subcommand("verify", "Verify archived epochs against the public chain");
  verify->add_option("--archive", archive, "Archive directory written by run")->required();
  verify->add_option("--chain", chain, "Public chain file")->required();

  std::string trace_chain, channel, trace_archive;
  auto* trace = app.add_subcommand("trace", "Print the consumer trace for a channel");
  trace->add_option("--chain", trace_chain, "Public chain file")->required();
  trace->add_option("--channel", channel, "Channel id")->required();
  trace->add_option("--archive", trace_archive,
                    "Archive directory; adds the lot document rebuilt from its ledgers");

  std::string inspect_file;
  auto* inspect = app.add_subcommand("inspect", "Dump a .tcgw ledger file as JSON");
  inspect->add_option("file", inspect_file, "Ledger file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), kExitUsage);
  }

  Streams io{std::cout, std::cerr};
  if (*run) return cmd_run(config, out_dir, io);
  if (*bench) return cmd_bench(levels, verify_mode, bench_out, max_level, io);
  if (*verify) return cmd_verify(archive, chain, io);
  if (*trace) {
    std::optional<std::filesystem::path> dir;
    if (!trace_archive.empty()) dir = trace_archive;
    return cmd_trace(trace_chain, channel, dir, io);
  }
  if (*inspect) return cmd_inspect(inspect_file, io);
  return kExitUsage;
}

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tcgw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

// Seed override read from TCGW_SEED, if set and numeric.
std::optional<std::uint64_t> env_seed();

int cmd_run(const std::filesystem::path& config_path,
            const std::filesystem::path& output_dir, Streams io,
            std::optional<std::uint64_t> seed_override = env_seed());

int cmd_bench(const std::string& levels_flag, const std::string& verify_mode_flag,
              const std::filesystem::path& output_dir, std::uint64_t max_level,
              Streams io);

int cmd_verify(const std::filesystem::path& archive_dir,
               const std::filesystem::path& chain_path, Streams io);

int cmd_trace(const std::filesystem::path& chain_path, const std::string& channel_id,
              const std::optional<std::filesystem::path>& archive_dir, Streams io);

int cmd_inspect(const std::filesystem::path& ledger_path, Streams io);

}  // namespace tcgw::cli

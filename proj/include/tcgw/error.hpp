#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tcgw {

enum class ErrorCode {
  InvalidArgument,
  EmptyBatch,
  InvalidTransaction,
  ClockSkew,
  PathTypeConflict,
  UnsupportedValue,
  MalformedJson,
  UnauthorizedAuthor,
  DuplicateTransaction,
  WrongChannel,
  NonEmptyMempool,
  InvalidWindow,
  DuplicateRange,
  PublishFailed,
  DuplicateEpoch,
  UnknownGateway,
  CorruptFile,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every module reports failures through this type. `index` carries the
// offending position where the failing operation has one (transaction index
// within a batch, block height during replay).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::uint64_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::uint64_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> index_;
};

}  // namespace tcgw

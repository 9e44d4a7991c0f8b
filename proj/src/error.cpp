#include "tcgw/error.hpp"

namespace tcgw {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::InvalidTransaction: return "InvalidTransaction";
    case ErrorCode::ClockSkew: return "ClockSkew";
    case ErrorCode::PathTypeConflict: return "PathTypeConflict";
    case ErrorCode::UnsupportedValue: return "UnsupportedValue";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::UnauthorizedAuthor: return "UnauthorizedAuthor";
    case ErrorCode::DuplicateTransaction: return "DuplicateTransaction";
    case ErrorCode::WrongChannel: return "WrongChannel";
    case ErrorCode::NonEmptyMempool: return "NonEmptyMempool";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::DuplicateRange: return "DuplicateRange";
    case ErrorCode::PublishFailed: return "PublishFailed";
    case ErrorCode::DuplicateEpoch: return "DuplicateEpoch";
    case ErrorCode::UnknownGateway: return "UnknownGateway";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::uint64_t> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      index_(index) {}

}  // namespace tcgw

#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace tcgw {

using Json = nlohmann::json;

// Deterministic JSON bytes: object keys sorted bytewise, no whitespace,
// minimal string escaping, base-10 integers. Native floating-point values are
// rejected with Error(UnsupportedValue); decimals travel as strings.
std::string canonical_json(const Json& value);

// Parses arbitrary JSON text. Throws Error(MalformedJson).
Json parse_json(std::string_view text);

// True iff `text` parses and re-serializes to exactly the same bytes.
bool is_canonical_json(std::string_view text);

}  // namespace tcgw

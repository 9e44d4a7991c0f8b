#include "tcgw/canonical_json.hpp"

#include <algorithm>
#include <vector>

#include "tcgw/error.hpp"

namespace tcgw {

namespace {

void write_string(std::string& out, const std::string& s) {
  static constexpr char kHex[] = "0123456789abcdef";
  out.push_back('"');
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          out += "\\u00";
          out.push_back(kHex[c >> 4]);
          out.push_back(kHex[c & 0xf]);
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
}

void write_value(std::string& out, const Json& v) {
  switch (v.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += v.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer: out += std::to_string(v.get<std::int64_t>()); break;
    case Json::value_t::number_unsigned: out += std::to_string(v.get<std::uint64_t>()); break;
    case Json::value_t::string: write_string(out, v.get_ref<const std::string&>()); break;
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& item : v) {
        if (!first) out.push_back(',');
        first = false;
        write_value(out, item);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::object: {
      // nlohmann's object map is ordered by std::string comparison, which is
      // bytewise; sort explicitly anyway so the rule does not hinge on it.
      std::vector<const std::pair<const std::string, Json>*> entries;
      entries.reserve(v.size());
      for (const auto& kv : v.get_ref<const Json::object_t&>()) entries.push_back(&kv);
      std::sort(entries.begin(), entries.end(),
                [](auto* a, auto* b) { return a->first < b->first; });
      out.push_back('{');
      bool first = true;
      for (auto* kv : entries) {
        if (!first) out.push_back(',');
        first = false;
        write_string(out, kv->first);
        out.push_back(':');
        write_value(out, kv->second);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::number_float:
      throw Error(ErrorCode::UnsupportedValue,
                  "native floating-point values are not canonical; use a decimal string");
    case Json::value_t::binary:
    case Json::value_t::discarded:
      throw Error(ErrorCode::UnsupportedValue, "unsupported JSON value kind");
  }
}

}  // namespace

std::string canonical_json(const Json& value) {
  std::string out;
  write_value(out, value);
  return out;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

bool is_canonical_json(std::string_view text) {
  auto parsed = Json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) return false;
  try {
    return canonical_json(parsed) == text;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace tcgw

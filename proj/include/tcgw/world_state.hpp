#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcgw/canonical_json.hpp"
#include "tcgw/digest.hpp"
#include "tcgw/ledger.hpp"

namespace tcgw {

struct Document {
  std::string doc_id;
  Json body = Json::object();
};

// Non-empty list of non-empty object keys.
class PathExpr {
 public:
  explicit PathExpr(std::vector<std::string> segments);
  const std::vector<std::string>& segments() const { return segments_; }
  bool operator==(const PathExpr&) const = default;

 private:
  std::vector<std::string> segments_;
};

enum class OpKind { UpdateField, AppendToArray };

struct ContextOp {
  OpKind op = OpKind::UpdateField;
  std::string doc_id;
  PathExpr path{{"_"}};
  Json value;
};

// {"doc_id":...,"op":"UpdateField"|"AppendToArray","path":[...],"value":...}
std::string to_payload(const ContextOp& op);
ContextOp parse_context_op(std::string_view payload);

// Convenience for callers that submit context ops to a chain.
Transaction make_context_transaction(const std::string& channel_id,
                                     Timestamp timestamp, const ContextOp& op,
                                     const std::string& author_id);

class WorldState {
 public:
  const std::map<std::string, Json>& docs() const { return docs_; }
  std::size_t size() const { return docs_.size(); }

  // In-place application with the strong guarantee: on PathTypeConflict the
  // state is left exactly as it was.
  void apply(const ContextOp& op);

  bool operator==(const WorldState&) const = default;

 private:
  std::map<std::string, Json> docs_;
};

WorldState apply_op(const WorldState& ws, const ContextOp& op);
std::optional<Document> read_document(const WorldState& ws,
                                      const std::string& doc_id);
Digest state_digest(const WorldState& ws);

// Folds every UpdateField/AppendToArray transaction of `ledger` onto `ws`.
// Conflicts surface as Error(PathTypeConflict) with index = block height and
// the transaction position in the message.
void replay_onto(WorldState& ws, const Ledger& ledger);
WorldState replay(const Ledger& ledger);

}  // namespace tcgw

#include "tcgw/world_state.hpp"

#include "tcgw/error.hpp"

namespace tcgw {

namespace {

std::string_view op_name(OpKind op) {
  return op == OpKind::UpdateField ? "UpdateField" : "AppendToArray";
}

TxKind tx_kind_of(OpKind op) {
  return op == OpKind::UpdateField ? TxKind::UpdateField : TxKind::AppendToArray;
}

// Walks to the parent object of the final path segment. Returns nullptr on a
// type conflict; never modifies `body`.
const Json* find_parent(const Json& body, const PathExpr& path, bool& missing) {
  const Json* cur = &body;
  missing = false;
  const auto& segs = path.segments();
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    auto it = cur->find(segs[i]);
    if (it == cur->end()) {
      missing = true;
      return cur;
    }
    if (!it->is_object()) return nullptr;
    cur = &*it;
  }
  return cur;
}

}  // namespace

PathExpr::PathExpr(std::vector<std::string> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw Error(ErrorCode::InvalidArgument, "path must be non-empty");
  for (const auto& s : segments_) {
    if (s.empty()) throw Error(ErrorCode::InvalidArgument, "path segment must be non-empty");
  }
}

std::string to_payload(const ContextOp& op) {
  Json j = {
      {"op", op_name(op.op)},
      {"doc_id", op.doc_id},
      {"path", op.path.segments()},
      {"value", op.value},
  };
  return canonical_json(j);
}

ContextOp parse_context_op(std::string_view payload) {
  Json j = parse_json(payload);
  auto bad = [](const std::string& why) {
    return Error(ErrorCode::InvalidTransaction, "context op: " + why);
  };
  if (!j.is_object() || j.size() != 4) throw bad("expected object with op, doc_id, path, value");
  auto op = j.find("op");
  auto doc = j.find("doc_id");
  auto path = j.find("path");
  auto value = j.find("value");
  if (op == j.end() || doc == j.end() || path == j.end() || value == j.end()) {
    throw bad("missing member");
  }
  ContextOp out;
  if (*op == "UpdateField") {
    out.op = OpKind::UpdateField;
  } else if (*op == "AppendToArray") {
    out.op = OpKind::AppendToArray;
  } else {
    throw bad("unknown op");
  }
  if (!doc->is_string() || doc->get_ref<const std::string&>().empty()) throw bad("doc_id");
  out.doc_id = doc->get<std::string>();
  if (!path->is_array()) throw bad("path must be an array");
  std::vector<std::string> segs;
  for (const auto& s : *path) {
    if (!s.is_string()) throw bad("path segments must be strings");
    segs.push_back(s.get<std::string>());
  }
  try {
    out.path = PathExpr(std::move(segs));
  } catch (const Error& e) {
    throw bad(e.what());
  }
  out.value = *value;
  return out;
}

Transaction make_context_transaction(const std::string& channel_id, Timestamp timestamp,
                                     const ContextOp& op, const std::string& author_id) {
  return make_transaction(channel_id, timestamp, tx_kind_of(op.op), to_payload(op), author_id);
}

void WorldState::apply(const ContextOp& op) {
  auto conflict = [&](const std::string& why) {
    return Error(ErrorCode::PathTypeConflict, op.doc_id + ": " + why);
  };
  // Validate against the existing document before touching anything.
  auto doc_it = docs_.find(op.doc_id);
  if (doc_it != docs_.end()) {
    bool missing = false;
    const Json* parent = find_parent(doc_it->second, op.path, missing);
    if (parent == nullptr) throw conflict("path traverses a non-object");
    if (!missing && op.op == OpKind::AppendToArray) {
      auto leaf = parent->find(op.path.segments().back());
      if (leaf != parent->end() && !leaf->is_array()) {
        throw conflict("append target is not an array");
      }
    }
  }

  Json* cur = &docs_[op.doc_id];
  if (cur->is_null()) *cur = Json::object();
  const auto& segs = op.path.segments();
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    Json& next = (*cur)[segs[i]];
    if (next.is_null()) next = Json::object();
    cur = &next;
  }
  Json& leaf = (*cur)[segs.back()];
  if (op.op == OpKind::UpdateField) {
    leaf = op.value;
  } else {
    if (leaf.is_null()) leaf = Json::array();
    leaf.push_back(op.value);
  }
}

WorldState apply_op(const WorldState& ws, const ContextOp& op) {
  WorldState out = ws;
  out.apply(op);
  return out;
}

std::optional<Document> read_document(const WorldState& ws, const std::string& doc_id) {
  auto it = ws.docs().find(doc_id);
  if (it == ws.docs().end()) return std::nullopt;
  return Document{it->first, it->second};
}

Digest state_digest(const WorldState& ws) {
  Sha256 outer;
  for (const auto& [id, body] : ws.docs()) {
    Encoder entry;
    entry.bytes(id).bytes(canonical_json(body));
    outer.update(sha256(entry.data()));
  }
  return outer.finish();
}

void replay_onto(WorldState& ws, const Ledger& ledger) {
  for (const auto& block : ledger.blocks()) {
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
      const auto& tx = block.transactions[i];
      if (tx.kind != TxKind::UpdateField && tx.kind != TxKind::AppendToArray) continue;
      try {
        ws.apply(parse_context_op(tx.payload));
      } catch (const Error& e) {
        throw Error(e.code(),
                    "replay at height " + std::to_string(block.height) + " tx " +
                        std::to_string(i) + ": " + e.what(),
                    block.height);
      }
    }
  }
}

WorldState replay(const Ledger& ledger) {
  WorldState ws;
  replay_onto(ws, ledger);
  return ws;
}

}  // namespace tcgw

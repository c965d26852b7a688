// Copyright 2026 The KubeFence Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <omp.h>

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "kubefence/validation.hpp"

namespace kubefence {

namespace {

MatchOptions match_options(const ValidateOptions& o, bool partial) {
  MatchOptions m;
  m.partial = partial;
  m.symbolic = o.symbolic;
  m.collect_all = o.all_violations;
  return m;
}

Verdict from_result(std::string kind, MatchResult result) {
  if (result.ok()) return Verdict::allow(std::move(kind));
  Verdict v = Verdict::deny(std::move(kind), result.violations.front());
  v.violations = std::move(result.violations);
  return v;
}

Verdict unknown_kind(std::string kind) {
  return Verdict::deny(kind, Violation{FieldPath::parse("kind"),
                                       ViolationReason::kUnknownKind,
                                       "kind '" + kind + "' is not in the policy"});
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// JSON pointer (RFC 6901) into raw segments.
std::vector<std::string> pointer_segments(const std::string& pointer) {
  std::vector<std::string> out;
  if (pointer.empty()) return out;
  if (pointer.front() != '/') {
    throw Error(ErrorCode::kParseError, "JSON pointer must start with '/': " + pointer);
  }
  std::string cur;
  for (std::size_t i = 1; i <= pointer.size(); ++i) {
    if (i == pointer.size() || pointer[i] == '/') {
      out.push_back(cur);
      cur.clear();
    } else if (pointer[i] == '~' && i + 1 < pointer.size() &&
               (pointer[i + 1] == '0' || pointer[i + 1] == '1')) {
      cur += pointer[i + 1] == '0' ? '~' : '/';
      ++i;
    } else {
      cur += pointer[i];
    }
  }
  return out;
}

bool is_index(const std::string& s) {
  return s == "-" || (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
                        return std::isdigit(static_cast<unsigned char>(c));
                      }));
}

bool is_sequence_schema(const SchemaNode& n) {
  if (n.type() == SchemaNode::Type::kSequence) return true;
  if (n.type() == SchemaNode::Type::kPlaceholder) return n.placeholder() == Placeholder::kList;
  if (n.type() == SchemaNode::Type::kLocked) {
    return placeholder_of(n.as_locked().value) == Placeholder::kList;
  }
  return false;
}

bool is_covering(const SchemaNode& n) {
  std::optional<Placeholder> p;
  if (n.type() == SchemaNode::Type::kPlaceholder) p = n.placeholder();
  if (n.type() == SchemaNode::Type::kLocked) p = placeholder_of(n.as_locked().value);
  return p == Placeholder::kList || p == Placeholder::kDict;
}

// Walk of one JSON-patch path through the schema.
struct PointerWalk {
  FieldPath path;
  const SchemaNode* node = nullptr;  // schema at the target, if reached
  const SchemaEntry* entry = nullptr;  // mapping entry holding the target
  bool covered = false;  // inside a {dict}/[list] placeholder
  std::optional<Violation> unknown;
};

PointerWalk walk_pointer(const SchemaNode& root, const std::vector<std::string>& segs) {
  PointerWalk w;
  w.node = &root;
  for (const auto& seg : segs) {
    if (w.covered) {
      w.path = is_index(seg) ? w.path.element() : w.path.key(seg);
      continue;
    }
    if (is_sequence_schema(*w.node) && is_index(seg)) {
      w.path = w.path.element();
      w.entry = nullptr;
      if (is_covering(*w.node)) {
        w.covered = true;
        continue;
      }
      const auto& el = w.node->as_sequence().element;
      if (!el) {
        w.unknown = Violation{w.path, ViolationReason::kShapeMismatch,
                              "policy only allows an empty sequence here"};
        return w;
      }
      w.node = el.get();
      continue;
    }
    w.path = w.path.key(seg);
    if (is_covering(*w.node)) {
      w.covered = true;
      w.entry = nullptr;
      continue;
    }
    const SchemaEntry* e = w.node->find(seg);
    if (e == nullptr) {
      w.unknown = Violation{w.path, ViolationReason::kUnknownField,
                            "field is not allowed by the policy"};
      return w;
    }
    w.entry = e;
    w.node = &e->node;
  }
  return w;
}

Verdict validate_json_patch(const DocNode& patch, const std::string& kind,
                            const SchemaNode& schema, const ValidateOptions& options) {
  auto deny = [&](Violation v) {
    Verdict out = Verdict::deny(kind, v);
    out.violations.push_back(std::move(v));
    return out;
  };
  if (!patch.is_sequence()) {
    return deny(Violation{FieldPath{}, ViolationReason::kShapeMismatch,
                          "JSON patch must be an array of operations"});
  }
  std::vector<Violation> all;
  for (const auto& op : patch.items()) {
    const DocNode* name = op.is_mapping() ? op.find("op") : nullptr;
    const DocNode* path = op.is_mapping() ? op.find("path") : nullptr;
    if (name == nullptr || path == nullptr || !path->is_scalar()) {
      all.push_back(Violation{FieldPath{}, ViolationReason::kShapeMismatch,
                              "malformed JSON patch operation"});
      if (!options.all_violations) break;
      continue;
    }
    std::string verb = name->text();
    std::vector<Violation> found;
    auto check_removal = [&](const DocNode& pointer) {
      PointerWalk w = walk_pointer(schema, pointer_segments(pointer.text()));
      if (w.unknown) return;
      if (w.entry && w.entry->required) {
        found.push_back(Violation{required_lock_path(w.entry->node, w.path),
                                  ViolationReason::kLockViolation,
                                  "patch removes a required locked field"});
      }
    };
    if (verb == "remove" || verb == "move") {
      check_removal(verb == "move" && op.find("from") ? *op.find("from") : *path);
    }
    if (verb == "add" || verb == "replace" || verb == "move" || verb == "copy" ||
        verb == "test") {
      PointerWalk w = walk_pointer(schema, pointer_segments(path->text()));
      if (w.unknown) {
        found.push_back(*w.unknown);
      } else if ((verb == "add" || verb == "replace") && !w.covered) {
        const DocNode* value = op.find("value");
        if (value == nullptr) {
          found.push_back(Violation{w.path, ViolationReason::kShapeMismatch,
                                    verb + " operation without value"});
        } else {
          MatchResult r = value_matches(*value, *w.node,
                                        match_options(options, false), w.path);
          for (auto& v : r.violations) found.push_back(std::move(v));
        }
      }
    } else if (verb != "remove") {
      found.push_back(Violation{FieldPath{}, ViolationReason::kShapeMismatch,
                                "unknown JSON patch operation '" + verb + "'"});
    }
    for (auto& v : found) all.push_back(std::move(v));
    if (!all.empty() && !options.all_violations) break;
  }
  if (all.empty()) return Verdict::allow(kind);
  Verdict out = Verdict::deny(kind, all.front());
  out.violations = std::move(all);
  return out;
}

}  // namespace

Verdict Verdict::allow(std::string kind) {
  Verdict v;
  v.allowed = true;
  v.kind = std::move(kind);
  return v;
}

Verdict Verdict::deny(std::string kind, Violation violation) {
  Verdict v;
  v.allowed = false;
  v.kind = std::move(kind);
  v.path = violation.path;
  v.reason = violation.reason;
  v.message = violation.message;
  return v;
}

std::string Verdict::to_json() const {
  nlohmann::ordered_json j;
  j["decision"] = allowed ? "allow" : "deny";
  if (!kind.empty()) j["kind"] = kind;
  if (!allowed) {
    j["path"] = path.str();
    j["reason"] = std::string(violation_reason_name(reason));
    j["message"] = message;
    if (violations.size() > 1) {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& v : violations) {
        arr.push_back({{"path", v.path.str()},
                       {"reason", std::string(violation_reason_name(v.reason))},
                       {"message", v.message}});
      }
      j["violations"] = std::move(arr);
    }
  }
  return j.dump();
}

Verdict validate_object(const DocNode& object, const Validator& validator,
                        const ValidateOptions& options) {
  const DocNode* kind = object.is_mapping() ? object.find("kind") : nullptr;
  if (kind == nullptr || !kind->is_scalar() || kind->is_null()) {
    return Verdict::deny("", Violation{FieldPath::parse("kind"),
                                       ViolationReason::kUnknownKind,
                                       "object has no kind"});
  }
  const SchemaNode* schema = validator.find(kind->text());
  if (schema == nullptr) return unknown_kind(kind->text());
  return from_result(kind->text(),
                     value_matches(object, *schema, match_options(options, false)));
}

PatchType patch_type_from_content_type(std::string_view content_type) {
  std::string ct = lower(content_type.substr(0, content_type.find(';')));
  while (!ct.empty() && ct.back() == ' ') ct.pop_back();
  if (ct == "application/merge-patch+json") return PatchType::kMerge;
  if (ct == "application/strategic-merge-patch+json") return PatchType::kStrategicMerge;
  if (ct == "application/json-patch+json") return PatchType::kJsonPatch;
  throw Error(ErrorCode::kUnsupportedPatchType, std::string(content_type));
}

Verdict validate_patch(const DocNode& patch, PatchType type, std::string_view kind,
                       const Validator& validator, const ValidateOptions& options) {
  const SchemaNode* schema = validator.find(kind);
  if (schema == nullptr) return unknown_kind(std::string(kind));
  if (type == PatchType::kJsonPatch) {
    return validate_json_patch(patch, std::string(kind), *schema, options);
  }
  return from_result(std::string(kind),
                     value_matches(patch, *schema, match_options(options, true)));
}

std::vector<Verdict> validate_batch(const std::vector<DocNode>& objects,
                                    const Validator& validator,
                                    const ValidateOptions& options) {
  std::vector<Verdict> out;
  out.reserve(objects.size());
  for (const auto& o : objects) out.push_back(validate_object(o, validator, options));
  return out;
}

std::vector<Verdict> validate_batch_parallel(const std::vector<DocNode>& objects,
                                             const Validator& validator,
                                             const ValidateOptions& options) {
  std::vector<Verdict> out(objects.size());
  const auto n = static_cast<long>(objects.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    out[i] = validate_object(objects[i], validator, options);
  }
  return out;
}

}  // namespace kubefence

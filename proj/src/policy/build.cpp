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

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <functional>

#include "kubefence/policy.hpp"

namespace kubefence {

namespace {

using SchemaVisitor = std::function<void(SchemaNode&, const FieldPath&)>;

// Pre-order walk; the callback may replace the node it is given, in which
// case the walk descends into the replacement.
void visit(SchemaNode& node, const FieldPath& at, const SchemaVisitor& fn) {
  fn(node, at);
  if (node.type() == SchemaNode::Type::kMapping) {
    for (auto& e : node.as_mapping().entries) visit(e.node, at.key(e.key), fn);
  } else if (node.type() == SchemaNode::Type::kSequence &&
             node.as_sequence().element) {
    visit(*node.as_sequence().element, at.element(), fn);
  }
}

bool is_scalar_schema(const SchemaNode& n) {
  switch (n.type()) {
    case SchemaNode::Type::kConstant:
    case SchemaNode::Type::kEnum: return true;
    case SchemaNode::Type::kPlaceholder:
      return n.placeholder() != Placeholder::kList &&
             n.placeholder() != Placeholder::kDict;
    default: return false;
  }
}

void apply_widening(SchemaNode& schema, const std::string& kind,
                    const std::vector<WideningRule>& rules) {
  for (const auto& rule : rules) {
    if (!rule.kind.empty() && rule.kind != kind) continue;
    visit(schema, FieldPath{}, [&](SchemaNode& node, const FieldPath& at) {
      if (at.empty() || !rule.target.matches(at)) return;
      bool scalar_target = rule.placeholder != Placeholder::kList &&
                           rule.placeholder != Placeholder::kDict;
      bool fits = false;
      if (scalar_target) {
        fits = is_scalar_schema(node);
      } else if (rule.placeholder == Placeholder::kDict) {
        fits = node.type() == SchemaNode::Type::kMapping ||
               (node.type() == SchemaNode::Type::kPlaceholder &&
                node.placeholder() == Placeholder::kDict);
      } else {
        fits = node.type() == SchemaNode::Type::kSequence ||
               (node.type() == SchemaNode::Type::kPlaceholder &&
                node.placeholder() == Placeholder::kList);
      }
      if (fits) node = rule.placeholder;
    });
  }
}

void insert_required(SchemaNode& schema, const LockRule& rule) {
  const auto& segs = rule.target.path().segments();
  if (segs.empty() || !rule.value) return;
  std::size_t split = segs.size() - 1;
  bool has_wildcard = false;
  for (std::size_t i = segs.size(); i-- > 0;) {
    if (segs[i].wildcard) {
      split = i + 1;
      has_wildcard = true;
      break;
    }
  }
  if (!has_wildcard && !rule.target.any_prefix()) split = 0;
  PathPattern anchor(FieldPath(std::vector<FieldPath::Segment>(
                         segs.begin(), segs.begin() + static_cast<long>(split))),
                     rule.target.any_prefix());
  std::vector<FieldPath::Segment> rest(segs.begin() + static_cast<long>(split),
                                       segs.end());
  visit(schema, FieldPath{}, [&](SchemaNode& node, const FieldPath& at) {
    if (anchor.path().empty() ? !at.empty() : !anchor.matches(at)) return;
    SchemaNode* cur = &node;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (cur->type() != SchemaNode::Type::kMapping) return;
      bool last = i + 1 == rest.size();
      SchemaEntry* e = cur->find(rest[i].key);
      if (e == nullptr) {
        e = &cur->set(rest[i].key,
                      last ? SchemaNode::locked(*rule.value, rule.mode)
                           : SchemaNode(SchemaNode::MappingSchema{}));
      }
      cur = &e->node;
    }
  });
}

bool mark(SchemaNode& node) {
  switch (node.type()) {
    case SchemaNode::Type::kLocked:
      return node.as_locked().mode == LockMode::kRequireAndPin;
    case SchemaNode::Type::kMapping: {
      bool any = false;
      for (auto& e : node.as_mapping().entries) {
        e.required = mark(e.node);
        any = any || e.required;
      }
      return any;
    }
    case SchemaNode::Type::kSequence:
      if (node.as_sequence().element) mark(*node.as_sequence().element);
      return false;
    default:
      return false;
  }
}

void add_optional(SchemaNode& mapping, const std::string& key, SchemaNode node) {
  if (mapping.type() != SchemaNode::Type::kMapping || mapping.find(key)) return;
  mapping.set(key, std::move(node), true);
}

void apply_implicit_whitelist(SchemaNode& schema) {
  if (schema.type() != SchemaNode::Type::kMapping) return;
  add_optional(schema, "metadata", SchemaNode::MappingSchema{});
  SchemaNode& meta = schema.find("metadata")->node;
  add_optional(meta, "managedFields", Placeholder::kList);
  add_optional(meta, "uid", Placeholder::kString);
  add_optional(meta, "resourceVersion", Placeholder::kString);
  add_optional(meta, "creationTimestamp", Placeholder::kString);
  add_optional(meta, "generation", Placeholder::kInt);
  add_optional(meta, "namespace", Placeholder::kString);
  add_optional(schema, "status", Placeholder::kDict);
}

std::string now_rfc3339() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const SchemaNode* Validator::find(std::string_view kind) const {
  for (const auto& k : kinds) {
    if (k.kind == kind) return &k.schema;
  }
  return nullptr;
}

std::vector<WideningRule> default_widening_rules() {
  auto r = [](std::string_view p, Placeholder ph, std::string kind = {}) {
    return WideningRule{PathPattern::parse(p), ph, std::move(kind)};
  };
  return {
      r("...metadata.name", Placeholder::kString),
      r("...metadata.labels", Placeholder::kDict),
      r("...matchLabels", Placeholder::kDict),
      r("spec.selector", Placeholder::kDict, "Service"),
      r("...containers[].name", Placeholder::kString),
      r("...containers[].image", Placeholder::kString),
      r("...initContainers[].name", Placeholder::kString),
      r("...initContainers[].image", Placeholder::kString),
  };
}

void mark_required_chains(SchemaNode& schema) { mark(schema); }

void apply_locks(SchemaNode& schema, const std::vector<LockRule>& locks) {
  for (const auto& rule : locks) {
    visit(schema, FieldPath{}, [&](SchemaNode& node, const FieldPath& at) {
      if (at.empty() || !rule.target.matches(at)) return;
      if (rule.value) {
        node = SchemaNode::locked(*rule.value, rule.mode);
      } else if (node.type() == SchemaNode::Type::kConstant) {
        node = SchemaNode::locked(DocNode::scalar(node.as_constant().value),
                                  rule.mode);
      }
    });
    if (rule.mode == LockMode::kRequireAndPin) insert_required(schema, rule);
  }
  mark_required_chains(schema);
}

std::string lock_digest(const std::vector<LockRule>& locks) {
  std::string text = serialize_lock_rules(locks);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

Validator build_validator(const std::vector<DocNode>& manifests,
                          const BuildOptions& options) {
  Validator v;
  v.chart = options.chart;
  v.timestamp = now_rfc3339();
  v.lock_digest = lock_digest(options.locks);
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    const DocNode& m = manifests[i];
    const DocNode* kind = m.is_mapping() ? m.find("kind") : nullptr;
    if (kind == nullptr || !kind->is_scalar() || kind->is_null()) {
      throw Error(ErrorCode::kMissingKind, std::to_string(i));
    }
    SchemaNode observed = observe(m);
    bool found = false;
    for (auto& k : v.kinds) {
      if (k.kind == kind->text()) {
        k.schema = merge_schema(k.schema, observed, options.strict);
        found = true;
        break;
      }
    }
    if (!found) v.kinds.push_back(KindPolicy{kind->text(), std::move(observed)});
  }
  for (auto& k : v.kinds) {
    apply_widening(k.schema, k.kind, options.widening);
    apply_locks(k.schema, options.locks);
    if (options.implicit_whitelist) apply_implicit_whitelist(k.schema);
  }
  return v;
}

}  // namespace kubefence

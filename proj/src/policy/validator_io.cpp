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

#include <fstream>
#include <sstream>

#include "kubefence/policy.hpp"

namespace kubefence {

namespace {

constexpr std::string_view kLockTag = "!lock";
constexpr std::string_view kLockRequiredTag = "!lock-required";

[[noreturn]] void invalid(const std::string& msg, Position pos = {}) {
  throw Error(ErrorCode::kInvalidSchema, msg, pos);
}

DocNode scalar_doc(Scalar s) {
  s.quoted = s.kind == ScalarKind::kString && placeholder_from_token(s.text);
  return DocNode::scalar(std::move(s));
}

Scalar constant_scalar(const DocNode& n) {
  Scalar s = n.as_scalar();
  s.quoted = false;
  return s;
}

}  // namespace

DocNode schema_to_doc(const SchemaNode& schema) {
  switch (schema.type()) {
    case SchemaNode::Type::kPlaceholder:
      return placeholder_node(schema.placeholder());
    case SchemaNode::Type::kConstant:
      return scalar_doc(schema.as_constant().value);
    case SchemaNode::Type::kLocked: {
      const auto& lock = schema.as_locked();
      DocNode out = placeholder_of(lock.value)
                        ? placeholder_node(*placeholder_of(lock.value))
                        : scalar_doc(lock.value.as_scalar());
      out.tag = std::string(lock.mode == LockMode::kPin ? kLockTag : kLockRequiredTag);
      return out;
    }
    case SchemaNode::Type::kEnum: {
      Sequence items;
      for (const auto& v : schema.as_enum().values) items.push_back(scalar_doc(v));
      return DocNode::sequence(std::move(items), true);
    }
    case SchemaNode::Type::kMapping: {
      Mapping entries;
      for (const auto& e : schema.as_mapping().entries) {
        entries.push_back({e.optional ? e.key + "?" : e.key, schema_to_doc(e.node)});
      }
      return DocNode::mapping(std::move(entries));
    }
    case SchemaNode::Type::kSequence: {
      const auto& el = schema.as_sequence().element;
      if (!el) return DocNode::sequence({}, true);
      return DocNode::sequence(Sequence{schema_to_doc(*el)}, false);
    }
  }
  return DocNode::null();
}

SchemaNode schema_from_doc(const DocNode& doc) {
  if (!doc.tag.empty()) {
    LockMode mode = doc.tag == kLockRequiredTag ? LockMode::kRequireAndPin
                                                : LockMode::kPin;
    if (auto p = placeholder_of(doc)) {
      return SchemaNode::locked(placeholder_node(*p), mode);
    }
    if (!doc.is_scalar()) invalid("locked value must be a scalar", doc.position);
    return SchemaNode::locked(DocNode::scalar(constant_scalar(doc)), mode);
  }
  if (auto p = placeholder_of(doc)) return *p;
  if (doc.is_scalar()) return SchemaNode::constant(constant_scalar(doc));
  if (doc.is_sequence()) {
    if (doc.items().empty()) return SchemaNode::empty_sequence();
    if (doc.flow) {
      std::vector<Scalar> values;
      for (const auto& item : doc.items()) {
        if (!item.is_scalar()) invalid("enum values must be scalars", item.position);
        values.push_back(constant_scalar(item));
      }
      if (values.size() < 2) {
        invalid("unknown placeholder token [" + doc.items().front().text() + "]",
                doc.position);
      }
      return SchemaNode::enumeration(std::move(values));
    }
    if (doc.items().size() != 1) {
      invalid("sequence schema must have exactly one element", doc.position);
    }
    return SchemaNode::sequence_of(schema_from_doc(doc.items().front()));
  }
  if (doc.flow && !doc.entries().empty()) {
    invalid("unknown placeholder token in flow mapping", doc.position);
  }
  SchemaNode out = SchemaNode::MappingSchema{};
  for (const auto& e : doc.entries()) {
    std::string key = e.key;
    bool optional = false;
    if (key.size() > 1 && key.back() == '?') {
      key.pop_back();
      optional = true;
    }
    if (out.find(key)) invalid("duplicate schema key " + key, e.value.position);
    out.set(key, schema_from_doc(e.value), optional);
  }
  return out;
}

std::string serialize_validator(const Validator& validator) {
  Mapping meta{{"chart", DocNode::string(validator.chart)},
               {"timestamp", DocNode::string(validator.timestamp)},
               {"lockDigest", DocNode::string(validator.lock_digest)}};
  Mapping kinds;
  for (const auto& k : validator.kinds) {
    kinds.push_back({k.kind, schema_to_doc(k.schema)});
  }
  DocNode root = DocNode::mapping(
      Mapping{{"meta", DocNode::mapping(std::move(meta))},
              {"kinds", DocNode::mapping(std::move(kinds))}});
  return to_yaml(root) + "\n";
}

Validator parse_validator(std::string_view text) {
  ParseOptions opts;
  opts.allowed_tags = {std::string(kLockTag), std::string(kLockRequiredTag)};
  DocNode root;
  try {
    root = parse_document(text, opts);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidSchema, e.detail(), e.position());
  }
  if (!root.is_mapping()) invalid("validator must be a mapping");
  const DocNode* kinds = root.find("kinds");
  if (kinds == nullptr || !kinds->is_mapping()) invalid("validator lacks kinds:");
  Validator v;
  if (const DocNode* meta = root.find("meta"); meta && meta->is_mapping()) {
    if (auto* c = meta->find("chart")) v.chart = c->text();
    if (auto* t = meta->find("timestamp")) v.timestamp = t->text();
    if (auto* d = meta->find("lockDigest")) v.lock_digest = d->text();
  }
  for (const auto& e : kinds->entries()) {
    SchemaNode schema = schema_from_doc(e.value);
    mark_required_chains(schema);
    v.kinds.push_back(KindPolicy{e.key, std::move(schema)});
  }
  return v;
}

Validator load_validator(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_validator(ss.str());
}

}  // namespace kubefence

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

#include <cctype>

#include "kubefence/policy.hpp"

namespace kubefence {

namespace {

enum class Shape { kScalar, kSequence, kMapping };

Shape shape_of(const SchemaNode& n) {
  switch (n.type()) {
    case SchemaNode::Type::kPlaceholder:
      if (n.placeholder() == Placeholder::kList) return Shape::kSequence;
      if (n.placeholder() == Placeholder::kDict) return Shape::kMapping;
      return Shape::kScalar;
    case SchemaNode::Type::kSequence: return Shape::kSequence;
    case SchemaNode::Type::kMapping: return Shape::kMapping;
    case SchemaNode::Type::kLocked: {
      auto p = placeholder_of(n.as_locked().value);
      if (p == Placeholder::kList) return Shape::kSequence;
      if (p == Placeholder::kDict) return Shape::kMapping;
      return Shape::kScalar;
    }
    default: return Shape::kScalar;
  }
}

std::string_view shape_name(Shape s) {
  switch (s) {
    case Shape::kScalar: return "scalar";
    case Shape::kSequence: return "sequence";
    case Shape::kMapping: return "mapping";
  }
  return "scalar";
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// A rendered string that embeds a placeholder token, e.g. "string-web" from
// `{{ .Release.Name }}-web`.
bool embeds_placeholder(std::string_view s) {
  static constexpr std::string_view kTokens[] = {"bool", "int", "string", "IP",
                                                 "[list]", "{dict}"};
  for (auto tok : kTokens) {
    std::size_t pos = 0;
    while ((pos = s.find(tok, pos)) != std::string_view::npos) {
      bool left = pos == 0 || !is_word_char(s[pos - 1]) || !is_word_char(tok.front());
      std::size_t end = pos + tok.size();
      bool right = end == s.size() || !is_word_char(s[end]) || !is_word_char(tok.back());
      if (left && right) return true;
      pos += 1;
    }
  }
  return false;
}

std::vector<Scalar> constants_of(const SchemaNode& n) {
  if (n.type() == SchemaNode::Type::kConstant) return {n.as_constant().value};
  return n.as_enum().values;
}

SchemaNode merge_scalar(const SchemaNode& a, const SchemaNode& b, bool strict) {
  bool pa = a.type() == SchemaNode::Type::kPlaceholder;
  bool pb = b.type() == SchemaNode::Type::kPlaceholder;
  if (pa && pb) {
    if (a.placeholder() == b.placeholder()) return a;
    return Placeholder::kString;
  }
  if (pa || pb) {
    const SchemaNode& p = pa ? a : b;
    const SchemaNode& c = pa ? b : a;
    if (strict) return c;
    Placeholder want = p.placeholder();
    for (const auto& v : constants_of(c)) {
      if (!placeholder_admits(want, DocNode::scalar(v))) return Placeholder::kString;
    }
    return want;
  }
  std::vector<Scalar> all = constants_of(a);
  for (auto& v : constants_of(b)) all.push_back(std::move(v));
  return SchemaNode::enumeration(std::move(all));
}

}  // namespace

SchemaNode observe(const DocNode& node) {
  if (auto p = placeholder_of(node)) return *p;
  if (node.is_mapping()) {
    SchemaNode::MappingSchema m;
    for (const auto& e : node.entries()) {
      m.entries.push_back(SchemaEntry{e.key, observe(e.value), false, false});
    }
    return m;
  }
  if (node.is_sequence()) {
    if (node.items().empty()) return SchemaNode::empty_sequence();
    SchemaNode element = observe(node.items().front());
    for (std::size_t i = 1; i < node.items().size(); ++i) {
      element = merge_schema(element, observe(node.items()[i]), false);
    }
    return SchemaNode::sequence_of(std::move(element));
  }
  const Scalar& s = node.as_scalar();
  if (s.kind == ScalarKind::kString && embeds_placeholder(s.text)) {
    return Placeholder::kString;
  }
  Scalar value = s;
  value.quoted = false;
  return SchemaNode::constant(std::move(value));
}

SchemaNode merge_schema(const SchemaNode& a, const SchemaNode& b, bool strict,
                        const FieldPath& at) {
  Shape sa = shape_of(a);
  Shape sb = shape_of(b);
  if (sa != sb) {
    throw Error(ErrorCode::kShapeConflict,
                at.str() + ": " + std::string(shape_name(sa)) + " vs " +
                    std::string(shape_name(sb)));
  }
  if (a.type() == SchemaNode::Type::kLocked) return a;
  if (b.type() == SchemaNode::Type::kLocked) return b;
  switch (sa) {
    case Shape::kScalar:
      return merge_scalar(a, b, strict);
    case Shape::kSequence: {
      if (a.type() == SchemaNode::Type::kPlaceholder) return a;
      if (b.type() == SchemaNode::Type::kPlaceholder) return b;
      const auto& ea = a.as_sequence().element;
      const auto& eb = b.as_sequence().element;
      if (!ea) return b;
      if (!eb) return a;
      return SchemaNode::sequence_of(merge_schema(*ea, *eb, strict, at.element()));
    }
    case Shape::kMapping: {
      if (a.type() == SchemaNode::Type::kPlaceholder) return a;
      if (b.type() == SchemaNode::Type::kPlaceholder) return b;
      SchemaNode out = SchemaNode::MappingSchema{};
      auto& entries = out.as_mapping().entries;
      for (const auto& ea : a.as_mapping().entries) {
        const SchemaEntry* eb = b.find(ea.key);
        if (eb == nullptr) {
          entries.push_back(SchemaEntry{ea.key, ea.node, true, ea.required});
          continue;
        }
        entries.push_back(SchemaEntry{
            ea.key, merge_schema(ea.node, eb->node, strict, at.key(ea.key)),
            ea.optional || eb->optional, ea.required || eb->required});
      }
      for (const auto& eb : b.as_mapping().entries) {
        if (a.find(eb.key) == nullptr) {
          entries.push_back(SchemaEntry{eb.key, eb.node, true, eb.required});
        }
      }
      return out;
    }
  }
  return a;
}

}  // namespace kubefence

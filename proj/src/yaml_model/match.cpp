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

#include "kubefence/yaml_model.hpp"

namespace kubefence {

std::string_view violation_reason_name(ViolationReason reason) {
  switch (reason) {
    case ViolationReason::kUnknownKind: return "UnknownKind";
    case ViolationReason::kUnknownField: return "UnknownField";
    case ViolationReason::kTypeMismatch: return "TypeMismatch";
    case ViolationReason::kEnumViolation: return "EnumViolation";
    case ViolationReason::kLockViolation: return "LockViolation";
    case ViolationReason::kMissingRequired: return "MissingRequired";
    case ViolationReason::kShapeMismatch: return "ShapeMismatch";
  }
  return "UnknownField";
}

FieldPath required_lock_path(const SchemaNode& node, const FieldPath& at) {
  if (node.type() != SchemaNode::Type::kMapping) return at;
  for (const auto& e : node.as_mapping().entries) {
    if (e.required) return required_lock_path(e.node, at.key(e.key));
  }
  return at;
}

namespace {

std::string describe(const DocNode& node) {
  if (node.is_mapping()) return "a mapping";
  if (node.is_sequence()) return "a sequence";
  return "'" + node.text() + "' (" +
         std::string(scalar_kind_name(node.as_scalar().kind)) + ")";
}

std::string join_values(const std::vector<Scalar>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += values[i].text;
  }
  return out + "]";
}

class Matcher {
 public:
  Matcher(const MatchOptions& options, MatchResult& result)
      : options_(options), result_(result) {}

  void walk(const DocNode& node, const SchemaNode& schema,
            const FieldPath& path) {
    if (done()) return;
    std::optional<Placeholder> symbol;
    if (options_.symbolic) symbol = placeholder_of(node);

    switch (schema.type()) {
      case SchemaNode::Type::kPlaceholder: {
        Placeholder want = schema.placeholder();
        bool ok = symbol ? placeholder_subsumes(want, *symbol)
                         : placeholder_admits(want, node);
        if (!ok) {
          fail(path, ViolationReason::kTypeMismatch,
               "expected " + std::string(placeholder_token(want)) + ", got " +
                   describe(node));
        }
        return;
      }
      case SchemaNode::Type::kConstant: {
        const Scalar& want = schema.as_constant().value;
        if (symbol || !node.is_scalar() ||
            !scalar_equal(node.as_scalar(), want)) {
          fail(path, ViolationReason::kEnumViolation,
               "value " + describe(node) + " is not the allowed value '" +
                   want.text + "'");
        }
        return;
      }
      case SchemaNode::Type::kEnum: {
        const auto& values = schema.as_enum().values;
        bool ok = false;
        if (!symbol && node.is_scalar()) {
          for (const auto& v : values) {
            if (scalar_equal(node.as_scalar(), v)) {
              ok = true;
              break;
            }
          }
        }
        if (!ok) {
          fail(path, ViolationReason::kEnumViolation,
               "value " + describe(node) + " is not one of " +
                   join_values(values));
        }
        return;
      }
      case SchemaNode::Type::kLocked: {
        const auto& lock = schema.as_locked();
        bool ok = false;
        if (auto want = placeholder_of(lock.value)) {
          ok = symbol ? placeholder_subsumes(*want, *symbol)
                      : placeholder_admits(*want, node);
        } else {
          ok = !symbol && node.is_scalar() &&
               scalar_equal(node.as_scalar(), lock.value.as_scalar());
        }
        if (!ok) {
          fail(path, ViolationReason::kLockViolation,
               "field is locked to " + lock.value.text() + ", got " +
                   describe(node));
        }
        return;
      }
      case SchemaNode::Type::kMapping:
        walk_mapping(node, schema, path);
        return;
      case SchemaNode::Type::kSequence:
        walk_sequence(node, schema, path);
        return;
    }
  }

 private:
  bool done() const { return !options_.collect_all && !result_.ok(); }

  void fail(const FieldPath& path, ViolationReason reason, std::string msg) {
    result_.violations.push_back(Violation{path, reason, std::move(msg)});
  }

  void walk_mapping(const DocNode& node, const SchemaNode& schema,
                    const FieldPath& path) {
    if (!node.is_mapping()) {
      fail(path, ViolationReason::kShapeMismatch,
           "expected a mapping, got " + describe(node));
      return;
    }
    for (const auto& entry : node.entries()) {
      if (done()) return;
      if (options_.partial && !entry.key.empty() && entry.key.front() == '$') {
        continue;  // strategic-merge directive
      }
      FieldPath child = path.key(entry.key);
      const SchemaEntry* se = schema.find(entry.key);
      if (se == nullptr) {
        fail(child, ViolationReason::kUnknownField,
             "field is not allowed by the policy");
        continue;
      }
      if (options_.partial && entry.value.is_null() &&
          se->node.type() != SchemaNode::Type::kPlaceholder) {
        // null in a merge patch deletes the field
        if (se->required) {
          fail(required_lock_path(se->node, child),
               ViolationReason::kLockViolation,
               "patch deletes a required locked field");
        }
        continue;
      }
      walk(entry.value, se->node, child);
    }
    if (options_.partial) return;
    for (const auto& se : schema.as_mapping().entries) {
      if (done()) return;
      if (se.required && node.find(se.key) == nullptr) {
        fail(required_lock_path(se.node, path.key(se.key)),
             ViolationReason::kMissingRequired, "required field is missing");
      }
    }
  }

  void walk_sequence(const DocNode& node, const SchemaNode& schema,
                     const FieldPath& path) {
    if (!node.is_sequence()) {
      fail(path, ViolationReason::kShapeMismatch,
           "expected a sequence, got " + describe(node));
      return;
    }
    const auto& element = schema.as_sequence().element;
    if (!element) {
      if (!node.items().empty()) {
        fail(path.element(), ViolationReason::kShapeMismatch,
             "policy only allows an empty sequence here");
      }
      return;
    }
    for (const auto& item : node.items()) {
      if (done()) return;
      walk(item, *element, path.element());
    }
  }

  const MatchOptions& options_;
  MatchResult& result_;
};

}  // namespace

MatchResult value_matches(const DocNode& node, const SchemaNode& schema,
                          const MatchOptions& options, const FieldPath& base) {
  MatchResult result;
  Matcher(options, result).walk(node, schema, base);
  return result;
}

}  // namespace kubefence

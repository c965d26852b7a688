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

std::string_view placeholder_token(Placeholder placeholder) {
  switch (placeholder) {
    case Placeholder::kBool: return "bool";
    case Placeholder::kInt: return "int";
    case Placeholder::kString: return "string";
    case Placeholder::kIP: return "IP";
    case Placeholder::kList: return "[list]";
    case Placeholder::kDict: return "{dict}";
  }
  return "string";
}

std::optional<Placeholder> placeholder_from_token(std::string_view token) {
  if (token == "bool") return Placeholder::kBool;
  if (token == "int") return Placeholder::kInt;
  if (token == "string") return Placeholder::kString;
  if (token == "IP") return Placeholder::kIP;
  if (token == "[list]") return Placeholder::kList;
  if (token == "{dict}") return Placeholder::kDict;
  return std::nullopt;
}

DocNode placeholder_node(Placeholder placeholder) {
  return DocNode::scalar(
      Scalar{std::string(placeholder_token(placeholder)), ScalarKind::kString,
             false});
}

std::optional<Placeholder> placeholder_of(const DocNode& node) {
  if (node.is_scalar()) {
    const Scalar& s = node.as_scalar();
    if (s.quoted || s.kind != ScalarKind::kString) return std::nullopt;
    return placeholder_from_token(s.text);
  }
  if (!node.flow || node.size() != 1) return std::nullopt;
  if (node.is_sequence()) {
    const DocNode& item = node.items().front();
    if (item.is_scalar() && !item.as_scalar().quoted && item.text() == "list") {
      return Placeholder::kList;
    }
    return std::nullopt;
  }
  const MappingEntry& entry = node.entries().front();
  if (entry.key == "dict" && entry.value.is_null()) return Placeholder::kDict;
  return std::nullopt;
}

bool is_ipv4(std::string_view text) {
  int octets = 0;
  std::size_t i = 0;
  while (true) {
    std::size_t start = i;
    int value = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      value = value * 10 + (text[i] - '0');
      if (value > 255) return false;
      ++i;
    }
    std::size_t digits = i - start;
    if (digits == 0 || digits > 3) return false;
    if (digits > 1 && text[start] == '0') return false;
    ++octets;
    if (i == text.size()) break;
    if (text[i] != '.' || octets == 4) return false;
    ++i;
  }
  return octets == 4;
}

Placeholder infer_placeholder(const DocNode& node) {
  switch (node.type()) {
    case DocNode::Type::kSequence: return Placeholder::kList;
    case DocNode::Type::kMapping: return Placeholder::kDict;
    case DocNode::Type::kScalar: break;
  }
  const Scalar& s = node.as_scalar();
  switch (s.kind) {
    case ScalarKind::kBoolean: return Placeholder::kBool;
    case ScalarKind::kInteger: return Placeholder::kInt;
    case ScalarKind::kString:
      return is_ipv4(s.text) ? Placeholder::kIP : Placeholder::kString;
    case ScalarKind::kNull:
    case ScalarKind::kFloat: return Placeholder::kString;
  }
  return Placeholder::kString;
}

bool placeholder_subsumes(Placeholder outer, Placeholder inner) {
  if (outer == inner) return true;
  return outer == Placeholder::kString &&
         (inner == Placeholder::kBool || inner == Placeholder::kInt ||
          inner == Placeholder::kIP);
}

bool placeholder_admits(Placeholder placeholder, const DocNode& node) {
  switch (placeholder) {
    case Placeholder::kList: return node.is_sequence();
    case Placeholder::kDict: return node.is_mapping();
    case Placeholder::kString: return node.is_scalar();
    case Placeholder::kBool:
      return node.is_scalar() && node.as_scalar().kind == ScalarKind::kBoolean;
    case Placeholder::kInt:
      return node.is_scalar() && node.as_scalar().kind == ScalarKind::kInteger;
    case Placeholder::kIP:
      return node.is_scalar() &&
             node.as_scalar().kind == ScalarKind::kString &&
             is_ipv4(node.as_scalar().text);
  }
  return false;
}

}  // namespace kubefence

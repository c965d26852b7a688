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

#include <charconv>
#include <cstdio>
#include <cstdlib>

#include <json.hpp>

#include "kubefence/yaml_model.hpp"

namespace kubefence {

namespace {

constexpr std::string_view kIndicators = "-?:,[]{}#&*!|>'\"%@`";

bool plain_safe(std::string_view s, bool flow) {
  if (s.empty()) return false;
  if (kIndicators.find(s.front()) != std::string_view::npos) return false;
  if (s.front() == ' ' || s.back() == ' ') return false;
  if (s.back() == ':') return false;
  if (s.find(": ") != std::string_view::npos) return false;
  if (s.find(" #") != std::string_view::npos) return false;
  for (unsigned char c : s) {
    if (c < 0x20 || c == 0x7f) return false;
    if (flow && (c == ',' || c == '[' || c == ']' || c == '{' || c == '}')) {
      return false;
    }
  }
  return true;
}

std::string double_quoted(std::string_view s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\x%02x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
  return out;
}

std::string scalar_text(const Scalar& scalar, bool flow) {
  if (scalar.kind != ScalarKind::kString) {
    return scalar.kind == ScalarKind::kNull || scalar.text.empty()
               ? std::string("null")
               : scalar.text;
  }
  const std::string& s = scalar.text;
  if (!scalar.quoted && placeholder_from_token(s)) return s;
  if (scalar.quoted && placeholder_from_token(s)) return double_quoted(s);
  if (plain_safe(s, flow) && infer_scalar_kind(s) == ScalarKind::kString) {
    return s;
  }
  return double_quoted(s);
}

std::string key_text(const std::string& key) {
  if (plain_safe(key, false) && infer_scalar_kind(key) == ScalarKind::kString) {
    return key;
  }
  return double_quoted(key);
}

bool flow_eligible(const DocNode& node) {
  if (!node.flow) return false;
  if (node.is_sequence()) {
    for (const auto& item : node.items()) {
      if (!item.is_scalar()) return false;
    }
    return true;
  }
  if (node.is_mapping()) {
    for (const auto& entry : node.entries()) {
      if (!entry.value.is_scalar()) return false;
    }
    return true;
  }
  return false;
}

bool inline_form(const DocNode& node) {
  return node.is_scalar() || node.size() == 0 || flow_eligible(node) ||
         placeholder_of(node).has_value();
}

std::string inline_body(const DocNode& node);

std::string inline_text(const DocNode& node) {
  if (node.tag.empty()) return inline_body(node);
  return node.tag + " " + inline_body(node);
}

std::string inline_body(const DocNode& node) {
  if (auto p = placeholder_of(node); p && !node.is_scalar()) {
    return std::string(placeholder_token(*p));
  }
  if (node.is_scalar()) return scalar_text(node.as_scalar(), false);
  if (node.is_sequence()) {
    std::string out = "[";
    for (std::size_t i = 0; i < node.items().size(); ++i) {
      if (i > 0) out += ", ";
      out += scalar_text(node.items()[i].as_scalar(), true);
    }
    return out + "]";
  }
  std::string out = "{";
  for (std::size_t i = 0; i < node.entries().size(); ++i) {
    if (i > 0) out += ", ";
    const auto& e = node.entries()[i];
    std::string k = key_text(e.key);
    if (!plain_safe(e.key, true)) k = double_quoted(e.key);
    out += k + ": " + scalar_text(e.value.as_scalar(), true);
  }
  return out + "}";
}

void emit_block(std::string& out, const DocNode& node, int indent);

void emit_mapping(std::string& out, const DocNode& node, int indent) {
  bool first = true;
  for (const auto& entry : node.entries()) {
    if (!first) out += '\n';
    first = false;
    out.append(indent, ' ');
    out += key_text(entry.key);
    out += ':';
    const DocNode& value = entry.value;
    if (inline_form(value)) {
      out += ' ';
      out += inline_text(value);
    } else if (value.is_mapping()) {
      out += '\n';
      emit_mapping(out, value, indent + 2);
    } else {
      out += '\n';
      emit_block(out, value, indent);
    }
  }
}

void emit_sequence(std::string& out, const DocNode& node, int indent) {
  bool first = true;
  for (const auto& item : node.items()) {
    if (!first) out += '\n';
    first = false;
    out.append(indent, ' ');
    out += '-';
    if (inline_form(item)) {
      out += ' ';
      out += inline_text(item);
      continue;
    }
    std::string nested;
    if (item.is_mapping()) {
      emit_mapping(nested, item, indent + 2);
    } else {
      emit_sequence(nested, item, indent + 2);
    }
    out += ' ';
    out += nested.substr(static_cast<std::size_t>(indent + 2));
  }
}

void emit_block(std::string& out, const DocNode& node, int indent) {
  if (inline_form(node)) {
    out.append(indent, ' ');
    out += inline_text(node);
  } else if (node.is_mapping()) {
    emit_mapping(out, node, indent);
  } else {
    emit_sequence(out, node, indent);
  }
}

nlohmann::ordered_json json_value(const DocNode& node) {
  switch (node.type()) {
    case DocNode::Type::kScalar: {
      const Scalar& s = node.as_scalar();
      switch (s.kind) {
        case ScalarKind::kNull: return nullptr;
        case ScalarKind::kBoolean: return canonical_scalar(s) == "true";
        case ScalarKind::kInteger: {
          std::string c = canonical_scalar(s);
          std::int64_t v = 0;
          auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
          if (ec == std::errc() && p == c.data() + c.size()) return v;
          return c;
        }
        case ScalarKind::kFloat: {
          std::string c = canonical_scalar(s);
          if (c == "nan" || c == "inf" || c == "-inf") return s.text;
          return std::strtod(c.c_str(), nullptr);
        }
        case ScalarKind::kString: return s.text;
      }
      return s.text;
    }
    case DocNode::Type::kSequence: {
      if (auto p = placeholder_of(node)) {
        return std::string(placeholder_token(*p));
      }
      auto arr = nlohmann::ordered_json::array();
      for (const auto& item : node.items()) arr.push_back(json_value(item));
      return arr;
    }
    case DocNode::Type::kMapping: {
      if (auto p = placeholder_of(node)) {
        return std::string(placeholder_token(*p));
      }
      auto obj = nlohmann::ordered_json::object();
      for (const auto& e : node.entries()) obj[e.key] = json_value(e.value);
      return obj;
    }
  }
  return nullptr;
}

}  // namespace

std::string to_yaml(const DocNode& node) {
  std::string out;
  emit_block(out, node, 0);
  return out;
}

std::string to_json(const DocNode& node) { return json_value(node).dump(); }

}  // namespace kubefence

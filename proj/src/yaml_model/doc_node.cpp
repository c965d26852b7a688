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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "kubefence/yaml_model.hpp"

namespace kubefence {

namespace {

bool all_of(std::string_view s, bool (*pred)(char)) {
  return !s.empty() && std::all_of(s.begin(), s.end(), pred);
}

bool is_dec(char c) { return c >= '0' && c <= '9'; }
bool is_oct(char c) { return c >= '0' && c <= '7'; }
bool is_hex(char c) {
  return is_dec(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool is_core_int(std::string_view s) {
  if (s.starts_with("0o")) return all_of(s.substr(2), is_oct);
  if (s.starts_with("0x")) return all_of(s.substr(2), is_hex);
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
  return all_of(s, is_dec);
}

bool is_core_float(std::string_view s) {
  if (s == ".nan" || s == ".NaN" || s == ".NAN") return true;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
  if (s == ".inf" || s == ".Inf" || s == ".INF") return true;
  // [0-9]+ ( . [0-9]* )? | . [0-9]+   then optional exponent
  std::size_t i = 0;
  std::size_t int_digits = 0;
  while (i < s.size() && is_dec(s[i])) ++i, ++int_digits;
  std::size_t frac_digits = 0;
  bool dot = false;
  if (i < s.size() && s[i] == '.') {
    dot = true;
    ++i;
    while (i < s.size() && is_dec(s[i])) ++i, ++frac_digits;
  }
  if (int_digits == 0 && frac_digits == 0) return false;
  bool exp = false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    exp = true;
    ++i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && is_dec(s[i])) ++i, ++exp_digits;
    if (exp_digits == 0) return false;
  }
  // A bare integer is an int, not a float.
  return i == s.size() && (dot || exp);
}

std::string canonical_int(std::string_view s) {
  int base = 10;
  bool negative = false;
  if (s.starts_with("0o")) {
    base = 8;
    s.remove_prefix(2);
  } else if (s.starts_with("0x")) {
    base = 16;
    s.remove_prefix(2);
  } else if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, base);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // Out of range: fall back to the digits without leading zeros.
    auto first = s.find_first_not_of('0');
    std::string digits =
        first == std::string_view::npos ? "0" : std::string(s.substr(first));
    return (negative && digits != "0" ? "-" : "") + digits;
  }
  if (value == 0) return "0";
  return (negative ? "-" : "") + std::to_string(value);
}

std::string canonical_float(std::string_view s) {
  std::string_view body = s;
  bool negative = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    negative = body[0] == '-';
    body.remove_prefix(1);
  }
  if (body == ".nan" || body == ".NaN" || body == ".NAN") return "nan";
  if (body == ".inf" || body == ".Inf" || body == ".INF") {
    return negative ? "-inf" : "inf";
  }
  double value = std::strtod(std::string(s).c_str(), nullptr);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

std::string_view scalar_kind_name(ScalarKind kind) {
  switch (kind) {
    case ScalarKind::kNull: return "null";
    case ScalarKind::kBoolean: return "boolean";
    case ScalarKind::kInteger: return "integer";
    case ScalarKind::kFloat: return "float";
    case ScalarKind::kString: return "string";
  }
  return "string";
}

ScalarKind infer_scalar_kind(std::string_view s) {
  if (s.empty() || s == "~" || s == "null" || s == "Null" || s == "NULL") {
    return ScalarKind::kNull;
  }
  if (s == "true" || s == "True" || s == "TRUE" || s == "false" ||
      s == "False" || s == "FALSE") {
    return ScalarKind::kBoolean;
  }
  if (is_core_int(s)) return ScalarKind::kInteger;
  if (is_core_float(s)) return ScalarKind::kFloat;
  return ScalarKind::kString;
}

std::string canonical_scalar(const Scalar& scalar) {
  switch (scalar.kind) {
    case ScalarKind::kNull: return "null";
    case ScalarKind::kBoolean:
      return (scalar.text == "true" || scalar.text == "True" ||
              scalar.text == "TRUE")
                 ? "true"
                 : "false";
    case ScalarKind::kInteger: return canonical_int(scalar.text);
    case ScalarKind::kFloat: return canonical_float(scalar.text);
    case ScalarKind::kString: return scalar.text;
  }
  return scalar.text;
}

bool scalar_equal(const Scalar& a, const Scalar& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == ScalarKind::kString) return a.text == b.text;
  return canonical_scalar(a) == canonical_scalar(b);
}

DocNode DocNode::null() { return DocNode(); }

DocNode DocNode::boolean(bool value) {
  return scalar(Scalar{value ? "true" : "false", ScalarKind::kBoolean, false});
}

DocNode DocNode::integer(std::int64_t value) {
  return scalar(Scalar{std::to_string(value), ScalarKind::kInteger, false});
}

DocNode DocNode::string(std::string text) {
  return scalar(Scalar{std::move(text), ScalarKind::kString, true});
}

DocNode DocNode::plain(std::string text) {
  ScalarKind kind = infer_scalar_kind(text);
  return scalar(Scalar{std::move(text), kind, false});
}

DocNode DocNode::scalar(Scalar scalar) {
  DocNode node;
  node.value_ = std::move(scalar);
  return node;
}

DocNode DocNode::sequence(Sequence items, bool flow) {
  DocNode node;
  node.value_ = std::move(items);
  node.flow = flow;
  return node;
}

DocNode DocNode::mapping(Mapping entries, bool flow) {
  DocNode node;
  node.value_ = std::move(entries);
  node.flow = flow;
  return node;
}

const std::string& DocNode::text() const {
  static const std::string kEmpty;
  return is_scalar() ? as_scalar().text : kEmpty;
}

const DocNode* DocNode::find(std::string_view key) const {
  if (!is_mapping()) return nullptr;
  for (const auto& entry : entries()) {
    if (entry.key == key) return &entry.value;
  }
  return nullptr;
}

DocNode* DocNode::find(std::string_view key) {
  return const_cast<DocNode*>(std::as_const(*this).find(key));
}

DocNode& DocNode::set(std::string key, DocNode value) {
  if (!is_mapping()) value_ = Mapping{};
  if (DocNode* existing = find(key)) {
    *existing = std::move(value);
    return *existing;
  }
  entries().push_back(MappingEntry{std::move(key), std::move(value)});
  return entries().back().value;
}

bool DocNode::erase(std::string_view key) {
  if (!is_mapping()) return false;
  auto& m = entries();
  auto it = std::find_if(m.begin(), m.end(),
                         [&](const MappingEntry& e) { return e.key == key; });
  if (it == m.end()) return false;
  m.erase(it);
  return true;
}

std::size_t DocNode::size() const {
  switch (type()) {
    case Type::kScalar: return 0;
    case Type::kSequence: return items().size();
    case Type::kMapping: return entries().size();
  }
  return 0;
}

bool operator==(const DocNode& a, const DocNode& b) {
  if (a.type() != b.type()) return false;
  switch (a.type()) {
    case DocNode::Type::kScalar:
      return scalar_equal(a.as_scalar(), b.as_scalar());
    case DocNode::Type::kSequence:
      return a.items() == b.items();
    case DocNode::Type::kMapping: {
      const auto& x = a.entries();
      const auto& y = b.entries();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].key != y[i].key || !(x[i].value == y[i].value)) return false;
      }
      return true;
    }
  }
  return false;
}

const DocNode* resolve(const DocNode& root, const FieldPath& path) {
  const DocNode* cur = &root;
  for (const auto& seg : path.segments()) {
    if (seg.wildcard) {
      if (!cur->is_sequence() || cur->items().empty()) return nullptr;
      cur = &cur->items().front();
    } else {
      cur = cur->find(seg.key);
      if (cur == nullptr) return nullptr;
    }
  }
  return cur;
}

}  // namespace kubefence

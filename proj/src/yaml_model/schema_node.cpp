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

#include "kubefence/yaml_model.hpp"

namespace kubefence {

std::string_view lock_mode_name(LockMode mode) {
  return mode == LockMode::kPin ? "pin" : "require-and-pin";
}

SchemaNode SchemaNode::enumeration(std::vector<Scalar> values) {
  std::vector<Scalar> unique;
  for (auto& v : values) {
    bool seen = std::any_of(unique.begin(), unique.end(), [&](const Scalar& u) {
      return scalar_equal(u, v);
    });
    if (!seen) unique.push_back(std::move(v));
  }
  if (unique.empty()) {
    throw Error(ErrorCode::kInvalidSchema, "enum set without values");
  }
  if (unique.size() == 1) return Constant{std::move(unique.front())};
  return EnumSet{std::move(unique)};
}

SchemaNode SchemaNode::sequence_of(SchemaNode element) {
  SequenceSchema seq;
  seq.element = Box<SchemaNode>(std::move(element));
  return seq;
}

const SchemaEntry* SchemaNode::find(std::string_view key) const {
  if (type() != Type::kMapping) return nullptr;
  for (const auto& e : as_mapping().entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

SchemaEntry* SchemaNode::find(std::string_view key) {
  return const_cast<SchemaEntry*>(std::as_const(*this).find(key));
}

SchemaEntry& SchemaNode::set(std::string key, SchemaNode node, bool optional) {
  if (SchemaEntry* e = find(key)) {
    e->node = std::move(node);
    e->optional = optional;
    return *e;
  }
  auto& entries = as_mapping().entries;
  entries.push_back(SchemaEntry{std::move(key), std::move(node), optional, false});
  return entries.back();
}

namespace {

bool same_scalars(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!scalar_equal(a[i], b[i])) return false;
  }
  return true;
}

bool same_scalar_set(const std::vector<Scalar>& a,
                     const std::vector<Scalar>& b) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.begin(), a.end(), [&](const Scalar& x) {
    return std::any_of(b.begin(), b.end(),
                       [&](const Scalar& y) { return scalar_equal(x, y); });
  });
}

template <bool kOrdered>
bool compare(const SchemaNode& a, const SchemaNode& b) {
  if (a.type() != b.type()) return false;
  switch (a.type()) {
    case SchemaNode::Type::kPlaceholder:
      return a.placeholder() == b.placeholder();
    case SchemaNode::Type::kConstant:
      return scalar_equal(a.as_constant().value, b.as_constant().value);
    case SchemaNode::Type::kLocked:
      return a.as_locked().mode == b.as_locked().mode &&
             a.as_locked().value == b.as_locked().value &&
             placeholder_of(a.as_locked().value) ==
                 placeholder_of(b.as_locked().value);
    case SchemaNode::Type::kEnum:
      return kOrdered ? same_scalars(a.as_enum().values, b.as_enum().values)
                      : same_scalar_set(a.as_enum().values, b.as_enum().values);
    case SchemaNode::Type::kSequence: {
      const auto& x = a.as_sequence().element;
      const auto& y = b.as_sequence().element;
      if (static_cast<bool>(x) != static_cast<bool>(y)) return false;
      return !x || compare<kOrdered>(*x, *y);
    }
    case SchemaNode::Type::kMapping: {
      const auto& x = a.as_mapping().entries;
      const auto& y = b.as_mapping().entries;
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const SchemaEntry* other = nullptr;
        if (kOrdered) {
          if (x[i].key != y[i].key) return false;
          other = &y[i];
        } else {
          other = b.find(x[i].key);
          if (other == nullptr) return false;
        }
        if (x[i].optional != other->optional ||
            x[i].required != other->required ||
            !compare<kOrdered>(x[i].node, other->node)) {
          return false;
        }
      }
      return true;
    }
  }
  return false;
}

}  // namespace

bool operator==(const SchemaNode& a, const SchemaNode& b) {
  return compare<true>(a, b);
}

bool equivalent(const SchemaNode& a, const SchemaNode& b) {
  return compare<false>(a, b);
}

const SchemaNode* schema_at(const SchemaNode& root, const FieldPath& path,
                            bool* covered) {
  if (covered) *covered = false;
  const SchemaNode* cur = &root;
  for (const auto& seg : path.segments()) {
    if (cur->type() == SchemaNode::Type::kPlaceholder) {
      Placeholder p = cur->placeholder();
      if ((seg.wildcard && p == Placeholder::kList) ||
          (!seg.wildcard && p == Placeholder::kDict)) {
        if (covered) *covered = true;
        return cur;
      }
      return nullptr;
    }
    if (cur->type() == SchemaNode::Type::kLocked) {
      auto p = placeholder_of(cur->as_locked().value);
      if (p && ((seg.wildcard && *p == Placeholder::kList) ||
                (!seg.wildcard && *p == Placeholder::kDict))) {
        if (covered) *covered = true;
        return cur;
      }
      return nullptr;
    }
    if (seg.wildcard) {
      if (cur->type() != SchemaNode::Type::kSequence ||
          !cur->as_sequence().element) {
        return nullptr;
      }
      cur = cur->as_sequence().element.get();
    } else {
      const SchemaEntry* e = cur->find(seg.key);
      if (e == nullptr) return nullptr;
      cur = &e->node;
    }
  }
  return cur;
}

}  // namespace kubefence

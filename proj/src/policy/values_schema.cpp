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

#include "kubefence/policy.hpp"

namespace kubefence {

namespace {

bool rule_matches(const LockRule& rule, const FieldPath& path) {
  return rule.target.matches(path) ||
         (rule.values_target && rule.values_target->matches(path));
}

const LockRule* lock_for(const std::vector<LockRule>& locks,
                         const FieldPath& path) {
  for (const auto& r : locks) {
    if (rule_matches(r, path)) return &r;
  }
  return nullptr;
}

const EnumAnnotation* enum_for(const std::vector<EnumAnnotation>& enums,
                               const FieldPath& path) {
  for (const auto& e : enums) {
    if (e.target == path) return &e;
  }
  return nullptr;
}

class SchemaBuilder {
 public:
  SchemaBuilder(const Chart& chart) : chart_(chart) {}

  ValuesSchema run() {
    ValuesSchema out;
    out.tree = generalize(chart_.values, FieldPath{}, out.enums);
    for (const auto& rule : chart_.locks) {
      if (rule.mode != LockMode::kRequireAndPin || !rule.value) continue;
      insert_required(out.tree, rule.target, *rule.value);
      if (rule.values_target) {
        insert_required(out.tree, *rule.values_target, *rule.value);
      }
    }
    return out;
  }

 private:
  DocNode generalize(const DocNode& node, const FieldPath& path,
                     std::vector<EnumAnnotation>& enums) {
    const LockRule* lock = path.empty() ? nullptr : lock_for(chart_.locks, path);
    const EnumAnnotation* annotation = enum_for(chart_.enums, path);
    if (lock != nullptr) {
      if (annotation && lock->value &&
          !(lock->value->is_scalar() &&
            std::any_of(annotation->options.begin(), annotation->options.end(),
                        [&](const Scalar& s) {
                          return scalar_equal(s, lock->value->as_scalar());
                        }))) {
        throw Error(ErrorCode::kLockConflict, path.str());
      }
      return lock->value ? *lock->value : node;
    }
    if (annotation != nullptr) {
      enums.push_back(*annotation);
      return DocNode::plain(enum_leaf_text(annotation->options));
    }
    if (node.is_mapping()) {
      if (node.entries().empty()) return placeholder_node(Placeholder::kDict);
      Mapping entries;
      for (const auto& e : node.entries()) {
        entries.push_back({e.key, generalize(e.value, path.key(e.key), enums)});
      }
      return DocNode::mapping(std::move(entries));
    }
    return placeholder_node(infer_placeholder(node));
  }

  // Inserts `leaf` under every existing anchor of the pattern. The anchor
  // is the part up to the last wildcard, or the parent when there is none.
  static void insert_required(DocNode& tree, const PathPattern& pattern,
                              const DocNode& leaf) {
    const auto& segs = pattern.path().segments();
    if (segs.empty()) return;
    std::size_t split = segs.size() - 1;
    for (std::size_t i = segs.size(); i-- > 0;) {
      if (segs[i].wildcard) {
        split = i + 1;
        break;
      }
    }
    PathPattern anchor(FieldPath(std::vector<FieldPath::Segment>(
                           segs.begin(), segs.begin() + static_cast<long>(split))),
                       pattern.any_prefix());
    std::vector<FieldPath::Segment> rest(segs.begin() + static_cast<long>(split),
                                         segs.end());
    visit(tree, FieldPath{}, [&](DocNode& node, const FieldPath& at) {
      if (!anchor.matches(at) || (anchor.path().empty() && !at.empty())) return;
      DocNode* cur = &node;
      for (std::size_t i = 0; i < rest.size(); ++i) {
        if (!cur->is_mapping()) return;
        bool last = i + 1 == rest.size();
        DocNode* next = cur->find(rest[i].key);
        if (next == nullptr) {
          next = &cur->set(rest[i].key, last ? leaf : DocNode::mapping());
        }
        cur = next;
      }
    });
  }

  template <typename Fn>
  static void visit(DocNode& node, const FieldPath& at, Fn&& fn) {
    fn(node, at);
    if (node.is_mapping()) {
      for (auto& e : node.entries()) visit(e.value, at.key(e.key), fn);
    } else if (node.is_sequence()) {
      for (auto& item : node.items()) visit(item, at.element(), fn);
    }
  }

  const Chart& chart_;
};

DocNode* find_path(DocNode& root, const FieldPath& path) {
  DocNode* cur = &root;
  for (const auto& seg : path.segments()) {
    if (seg.wildcard || !cur->is_mapping()) return nullptr;
    cur = cur->find(seg.key);
    if (cur == nullptr) return nullptr;
  }
  return cur;
}

}  // namespace

std::string enum_leaf_text(const std::vector<Scalar>& options) {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i > 0) out += ", ";
    out += options[i].text;
  }
  return out;
}

ValuesSchema generate_values_schema(const Chart& chart) {
  return SchemaBuilder(chart).run();
}

std::vector<ValuesVariant> explore_variants(const ValuesSchema& schema) {
  std::size_t count = 1;
  for (const auto& e : schema.enums) count = std::max(count, e.options.size());
  std::vector<ValuesVariant> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ValuesVariant v{i, schema.tree};
    for (const auto& e : schema.enums) {
      DocNode* leaf = find_path(v.values, e.target);
      if (leaf == nullptr || e.options.empty()) continue;
      *leaf = DocNode::scalar(e.options[std::min(i, e.options.size() - 1)]);
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace kubefence

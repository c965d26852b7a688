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

// Document trees, field paths, placeholders and schema nodes shared by every
// other module. Everything here has value semantics and is immutable once
// handed to the validation path, so trees may be shared read-only between
// request handlers.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kubefence/error.hpp"

namespace kubefence {

// ---------------------------------------------------------------------------
// DocNode
// ---------------------------------------------------------------------------

enum class ScalarKind { kNull, kBoolean, kInteger, kFloat, kString };

std::string_view scalar_kind_name(ScalarKind kind);

/// YAML 1.2 core schema resolution of a plain scalar.
ScalarKind infer_scalar_kind(std::string_view plain_text);

struct Scalar {
  std::string text;
  ScalarKind kind = ScalarKind::kNull;
  // Quoted (or block) scalars are never placeholders and never re-resolve.
  bool quoted = false;
};

class DocNode;
struct MappingEntry;
using Sequence = std::vector<DocNode>;
using Mapping = std::vector<MappingEntry>;

class DocNode {
 public:
  enum class Type { kScalar, kSequence, kMapping };

  DocNode() : value_(Scalar{}) {}

  static DocNode null();
  static DocNode boolean(bool value);
  static DocNode integer(std::int64_t value);
  /// Quoted string scalar; never read back as a placeholder.
  static DocNode string(std::string text);
  /// Plain scalar whose kind is resolved with the core schema.
  static DocNode plain(std::string text);
  static DocNode scalar(Scalar scalar);
  static DocNode sequence(Sequence items = {}, bool flow = false);
  static DocNode mapping(Mapping entries = {}, bool flow = false);

  Type type() const { return static_cast<Type>(value_.index()); }
  bool is_scalar() const { return type() == Type::kScalar; }
  bool is_sequence() const { return type() == Type::kSequence; }
  bool is_mapping() const { return type() == Type::kMapping; }
  bool is_null() const {
    return is_scalar() && as_scalar().kind == ScalarKind::kNull;
  }

  const Scalar& as_scalar() const { return std::get<Scalar>(value_); }
  Scalar& as_scalar() { return std::get<Scalar>(value_); }
  const Sequence& items() const { return std::get<Sequence>(value_); }
  Sequence& items() { return std::get<Sequence>(value_); }
  const Mapping& entries() const { return std::get<Mapping>(value_); }
  Mapping& entries() { return std::get<Mapping>(value_); }

  /// Scalar text, or empty for collections.
  const std::string& text() const;

  const DocNode* find(std::string_view key) const;
  DocNode* find(std::string_view key);
  /// Replaces the value of an existing key, else appends it.
  DocNode& set(std::string key, DocNode value);
  bool erase(std::string_view key);

  std::size_t size() const;

  Position position;
  bool flow = false;
  // Explicit non-core tag (only kept when the parser was told to allow it).
  std::string tag;

  /// Structural equality: scalars compare by kind and canonical value,
  /// sequences element-wise, mappings entry-wise in order.
  friend bool operator==(const DocNode& a, const DocNode& b);

 private:
  std::variant<Scalar, Sequence, Mapping> value_;
};

struct MappingEntry {
  std::string key;
  DocNode value;
};

/// Canonical value used for scalar comparison ("True" -> "true", "0x10" -> "16").
std::string canonical_scalar(const Scalar& scalar);
bool scalar_equal(const Scalar& a, const Scalar& b);

enum class DocFormat { kYaml, kJson };

struct ParseOptions {
  DocFormat format = DocFormat::kYaml;
  // Local tags (e.g. "!lock") accepted and recorded on the node.
  std::vector<std::string> allowed_tags;
};

/// Parses exactly one document. Anchors, aliases and unknown tags are
/// rejected; a stream with more than one document raises kMultipleDocuments.
DocNode parse_document(std::string_view text, const ParseOptions& options = {});
DocNode parse_document(std::string_view text, DocFormat format);

/// Parses a `---` separated stream; empty documents are dropped.
std::vector<DocNode> parse_stream(std::string_view text,
                                  const ParseOptions& options = {});

/// Canonical block-style YAML. No trailing newline.
std::string to_yaml(const DocNode& node);
/// Compact JSON. Placeholders are emitted as their token strings.
std::string to_json(const DocNode& node);

// ---------------------------------------------------------------------------
// FieldPath
// ---------------------------------------------------------------------------

/// Ordered key / any-element segments. Text form: `a.b[].c`; the root is `.`.
/// Keys containing `.`, `[`, `]` or `\` are backslash-escaped.
class FieldPath {
 public:
  struct Segment {
    std::string key;
    bool wildcard = false;
    friend bool operator==(const Segment&, const Segment&) = default;
    friend auto operator<=>(const Segment&, const Segment&) = default;
  };

  FieldPath() = default;
  explicit FieldPath(std::vector<Segment> segments)
      : segments_(std::move(segments)) {}

  static FieldPath parse(std::string_view text);

  std::string str() const;
  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  std::size_t size() const { return segments_.size(); }

  FieldPath key(std::string key) const;
  FieldPath element() const;
  FieldPath parent() const;
  FieldPath concat(const FieldPath& tail) const;
  bool starts_with(const FieldPath& prefix) const;
  bool ends_with(const FieldPath& suffix) const;

  friend bool operator==(const FieldPath&, const FieldPath&) = default;
  friend auto operator<=>(const FieldPath&, const FieldPath&) = default;

 private:
  std::vector<Segment> segments_;
};

/// A FieldPath optionally anchored anywhere (`...` prefix), as used by lock
/// rules and widening rules: `...containers[].securityContext.privileged`.
class PathPattern {
 public:
  PathPattern() = default;
  PathPattern(FieldPath path, bool any_prefix)
      : path_(std::move(path)), any_prefix_(any_prefix) {}

  static PathPattern parse(std::string_view text);
  std::string str() const;

  bool matches(const FieldPath& path) const;
  const FieldPath& path() const { return path_; }
  bool any_prefix() const { return any_prefix_; }

  friend bool operator==(const PathPattern&, const PathPattern&) = default;

 private:
  FieldPath path_;
  bool any_prefix_ = false;
};

/// Resolves a path against a document; wildcards take the first element.
const DocNode* resolve(const DocNode& root, const FieldPath& path);

// ---------------------------------------------------------------------------
// Placeholders
// ---------------------------------------------------------------------------

enum class Placeholder { kBool, kInt, kString, kIP, kList, kDict };

std::string_view placeholder_token(Placeholder placeholder);
std::optional<Placeholder> placeholder_from_token(std::string_view token);

/// The node a placeholder is written as inside a document tree: an unquoted
/// scalar holding the token text.
DocNode placeholder_node(Placeholder placeholder);

/// Recognizes a placeholder written into a tree: an unquoted token scalar, or
/// the parsed forms of `[list]` (flow sequence holding `list`) and `{dict}`
/// (flow mapping `{dict: null}`).
std::optional<Placeholder> placeholder_of(const DocNode& node);

bool is_ipv4(std::string_view text);

/// Most specific placeholder that admits the node.
Placeholder infer_placeholder(const DocNode& node);

/// True when every value admitted by `inner` is admitted by `outer`.
bool placeholder_subsumes(Placeholder outer, Placeholder inner);

bool placeholder_admits(Placeholder placeholder, const DocNode& node);

// ---------------------------------------------------------------------------
// SchemaNode
// ---------------------------------------------------------------------------

enum class LockMode { kPin, kRequireAndPin };

std::string_view lock_mode_name(LockMode mode);

/// Deep-copying owning pointer; lets SchemaNode nest by value.
template <typename T>
class Box {
 public:
  Box() = default;
  explicit Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other)
      : ptr_(other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) {
      ptr_ = other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr;
    }
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  explicit operator bool() const { return ptr_ != nullptr; }
  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }
  T* get() { return ptr_.get(); }
  const T* get() const { return ptr_.get(); }

 private:
  std::unique_ptr<T> ptr_;
};

class SchemaNode;

struct SchemaEntry;

class SchemaNode {
 public:
  struct Constant {
    Scalar value;
  };
  struct Locked {
    DocNode value;  // scalar constant or placeholder token scalar
    LockMode mode = LockMode::kPin;
  };
  struct EnumSet {
    std::vector<Scalar> values;  // >= 2 distinct, first-seen order
  };
  struct MappingSchema {
    std::vector<SchemaEntry> entries;
  };
  struct SequenceSchema {
    Box<SchemaNode> element;  // empty: only the empty sequence is admitted
  };

  enum class Type {
    kPlaceholder,
    kConstant,
    kLocked,
    kEnum,
    kMapping,
    kSequence
  };

  SchemaNode() : value_(MappingSchema{}) {}
  SchemaNode(Placeholder p) : value_(p) {}  // NOLINT: implicit by intent
  SchemaNode(Constant c) : value_(std::move(c)) {}
  SchemaNode(Locked l) : value_(std::move(l)) {}
  SchemaNode(EnumSet e) : value_(std::move(e)) {}
  SchemaNode(MappingSchema m) : value_(std::move(m)) {}
  SchemaNode(SequenceSchema s) : value_(std::move(s)) {}

  static SchemaNode constant(Scalar value) { return Constant{std::move(value)}; }
  static SchemaNode locked(DocNode value, LockMode mode) {
    return Locked{std::move(value), mode};
  }
  /// Builds an EnumSet, collapsing to a Constant when fewer than two
  /// distinct values remain.
  static SchemaNode enumeration(std::vector<Scalar> values);
  static SchemaNode sequence_of(SchemaNode element);
  static SchemaNode empty_sequence() { return SequenceSchema{}; }

  Type type() const { return static_cast<Type>(value_.index()); }

  Placeholder placeholder() const { return std::get<Placeholder>(value_); }
  const Constant& as_constant() const { return std::get<Constant>(value_); }
  const Locked& as_locked() const { return std::get<Locked>(value_); }
  Locked& as_locked() { return std::get<Locked>(value_); }
  const EnumSet& as_enum() const { return std::get<EnumSet>(value_); }
  const MappingSchema& as_mapping() const {
    return std::get<MappingSchema>(value_);
  }
  MappingSchema& as_mapping() { return std::get<MappingSchema>(value_); }
  const SequenceSchema& as_sequence() const {
    return std::get<SequenceSchema>(value_);
  }
  SequenceSchema& as_sequence() { return std::get<SequenceSchema>(value_); }

  const SchemaEntry* find(std::string_view key) const;
  SchemaEntry* find(std::string_view key);
  /// Mapping only: adds or replaces an entry.
  SchemaEntry& set(std::string key, SchemaNode node, bool optional = false);

  /// Exact structural equality (entry order and enum order significant).
  friend bool operator==(const SchemaNode& a, const SchemaNode& b);

 private:
  std::variant<Placeholder, Constant, Locked, EnumSet, MappingSchema,
               SequenceSchema>
      value_;
};

struct SchemaEntry {
  std::string key;
  SchemaNode node;
  // Observed in only some of the merged manifests.
  bool optional = false;
  // Must be present whenever the enclosing mapping is (require-and-pin chain).
  bool required = false;
};

/// Equality that ignores mapping entry order and enum value order.
bool equivalent(const SchemaNode& a, const SchemaNode& b);

/// Walks a schema along a path; wildcard segments step into sequences.
/// Returns nullptr when the path leaves the schema. `covered` is set when
/// the walk ended inside a `{dict}`/`[list]` placeholder.
const SchemaNode* schema_at(const SchemaNode& root, const FieldPath& path,
                            bool* covered = nullptr);

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

enum class ViolationReason {
  kUnknownKind,
  kUnknownField,
  kTypeMismatch,
  kEnumViolation,
  kLockViolation,
  kMissingRequired,
  kShapeMismatch,
};

std::string_view violation_reason_name(ViolationReason reason);

struct Violation {
  FieldPath path;
  ViolationReason reason = ViolationReason::kUnknownField;
  std::string message;
};

struct MatchOptions {
  // Partial bodies (merge patches): required entries are not enforced and
  // null values are deletions.
  bool partial = false;
  // Placeholder tokens in the document stand for any value of their type.
  bool symbolic = false;
  // Keep walking after the first violation.
  bool collect_all = false;
};

struct MatchResult {
  std::vector<Violation> violations;  // first violation first
  bool ok() const { return violations.empty(); }
};

/// The recursive admission check. Violations are reported depth-first in
/// document order, relative to `base`.
MatchResult value_matches(const DocNode& node, const SchemaNode& schema,
                          const MatchOptions& options = {},
                          const FieldPath& base = {});

/// Path of the require-and-pin lock reached from a required entry, used to
/// name the missing field when a whole required chain is absent.
FieldPath required_lock_path(const SchemaNode& node, const FieldPath& at);

}  // namespace kubefence

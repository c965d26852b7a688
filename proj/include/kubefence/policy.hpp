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

// Policy generation: values schema, variant exploration, rendering and
// validator consolidation, plus the validator file format.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kubefence/chart.hpp"
#include "kubefence/template_engine.hpp"

namespace kubefence {

// ---------------------------------------------------------------------------
// Values schema and variants
// ---------------------------------------------------------------------------

struct ValuesSchema {
  // Leaves are placeholder tokens, locked constants, or enum leaves written
  // as their comma-joined option list ("standalone, repl").
  DocNode tree;
  std::vector<EnumAnnotation> enums;
};

/// Throws kLockConflict when a lock pins a value an enum annotation on the
/// same path does not offer.
ValuesSchema generate_values_schema(const Chart& chart);

std::string enum_leaf_text(const std::vector<Scalar>& options);

struct ValuesVariant {
  std::size_t index = 0;  // 0-based
  DocNode values;
};

/// L variants, L = longest option list (1 without enums). Variant i takes
/// option min(i, len-1) of every enum.
std::vector<ValuesVariant> explore_variants(const ValuesSchema& schema);

struct RenderedManifest {
  std::size_t variant = 0;
  DocNode manifest;
};

struct RenderOptions {
  // When set, replaces the built-in engine.
  std::optional<ExternalRenderer> external;
  // `.Release.Name` during generation; the `string` placeholder by default
  // because the real name is only known at install time.
  std::string release_name = "string";
};

std::vector<RenderedManifest> render_variants(const Chart& chart,
                                              const std::vector<ValuesVariant>& variants,
                                              const RenderOptions& options = {});

/// Same output as render_variants, one variant per OpenMP task.
std::vector<RenderedManifest> render_variants_parallel(
    const Chart& chart, const std::vector<ValuesVariant>& variants,
    const RenderOptions& options = {});

// ---------------------------------------------------------------------------
// Validator
// ---------------------------------------------------------------------------

struct KindPolicy {
  std::string kind;
  SchemaNode schema;
};

struct Validator {
  std::vector<KindPolicy> kinds;  // first-seen order
  std::string chart;
  std::string timestamp;    // RFC 3339
  std::string lock_digest;  // "sha256:<hex>" over the serialized lock table

  const SchemaNode* find(std::string_view kind) const;
};

/// Forces a path to a placeholder after merging. `kind` empty: every kind.
struct WideningRule {
  PathPattern target;
  Placeholder placeholder = Placeholder::kString;
  std::string kind;
};

std::vector<WideningRule> default_widening_rules();

struct BuildOptions {
  // Constant beats placeholder at the same path.
  bool strict = false;
  std::vector<LockRule> locks = default_lock_rules();
  std::vector<WideningRule> widening = default_widening_rules();
  // Adds server-populated metadata fields and `status` as optional entries.
  bool implicit_whitelist = true;
  std::string chart;
};

/// Schema of a single manifest before merging: scalars become constants,
/// placeholder tokens stay placeholders.
SchemaNode observe(const DocNode& node);

/// Recursive node merge; throws kShapeConflict naming the path.
SchemaNode merge_schema(const SchemaNode& a, const SchemaNode& b,
                        bool strict = false, const FieldPath& at = {});

Validator build_validator(const std::vector<DocNode>& manifests,
                          const BuildOptions& options = {});

/// Applies lock rules to a merged kind schema: matching leaves become
/// Locked, require-and-pin targets are inserted where their anchor exists,
/// and require chains are marked.
void apply_locks(SchemaNode& schema, const std::vector<LockRule>& locks);

/// Marks every mapping entry between a require-and-pin leaf and its nearest
/// enclosing sequence element (or the root) as required.
void mark_required_chains(SchemaNode& schema);

std::string lock_digest(const std::vector<LockRule>& locks);

/// Full pipeline: schema, variants, rendering, consolidation.
struct GenerateResult {
  ValuesSchema values_schema;
  std::vector<ValuesVariant> variants;
  std::vector<RenderedManifest> manifests;
  Validator validator;
};

GenerateResult generate_policy(const Chart& chart, const BuildOptions& build,
                               const RenderOptions& render = {},
                               bool parallel = false);

// ---------------------------------------------------------------------------
// Validator file format
// ---------------------------------------------------------------------------

std::string serialize_validator(const Validator& validator);
/// Throws kInvalidSchema on unknown placeholder tokens or malformed trees.
Validator parse_validator(std::string_view text);
Validator load_validator(const std::filesystem::path& path);

DocNode schema_to_doc(const SchemaNode& schema);
SchemaNode schema_from_doc(const DocNode& doc);

}  // namespace kubefence

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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kubefence/template_ast.hpp"
#include "kubefence/yaml_model.hpp"

namespace kubefence {

struct TemplateFile {
  std::string path;  // relative to templates/
  std::string text;
  tmpl::TemplateAst ast;
};

struct EnumAnnotation {
  FieldPath target;
  std::vector<Scalar> options;
};

/// A security constraint pinned onto the policy. `target` is matched against
/// manifest paths; `values_target`, when set, names the corresponding knob in
/// the values file. Without `value` the rule pins whatever the chart's
/// default values hold at the target.
struct LockRule {
  PathPattern target;
  std::optional<PathPattern> values_target;
  std::optional<DocNode> value;
  LockMode mode = LockMode::kPin;
};

struct Chart {
  std::string name;
  std::filesystem::path directory;
  DocNode values;
  std::string values_text;
  // Files rendered into manifests, sorted by path. Files whose name starts
  // with `_` only contribute defines and are kept in `partials`.
  std::vector<TemplateFile> templates;
  std::vector<TemplateFile> partials;
  std::map<std::string, tmpl::NodeList> defines;
  std::vector<EnumAnnotation> enums;
  std::vector<LockRule> locks;
};

/// Throws kMissingValues, kMissingTemplates, kParseError, kDuplicateDefine,
/// kAnnotationPathUnresolved or a template parse error.
Chart load_chart(const std::filesystem::path& directory);

/// Two-line comment annotations: `# a.b` followed by a comment listing
/// backtick-quoted options, directly above a key.
std::vector<EnumAnnotation> extract_enum_annotations(std::string_view values_text,
                                                     const DocNode& values);

/// `enums.yaml` sidecar: mapping of canonical path to option list.
std::vector<EnumAnnotation> parse_enum_sidecar(std::string_view text,
                                               const DocNode& values);

std::vector<LockRule> default_lock_rules();

/// `locks.yaml`: a sequence of {target, value?, mode, values_target?}.
std::vector<LockRule> parse_lock_rules(std::string_view text);
std::string serialize_lock_rules(const std::vector<LockRule>& rules);

/// Resolves a dotted annotation path against values: exact match first,
/// then case-insensitive key match.
std::optional<FieldPath> resolve_values_path(const DocNode& values,
                                             const FieldPath& path);

}  // namespace kubefence

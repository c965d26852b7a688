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

// Catalog of malicious specifications and the harness that replays them
// against validators and a kind-level RBAC baseline.

#pragma once

#include <set>
#include <string>
#include <vector>

#include "kubefence/surface.hpp"
#include "kubefence/validation.hpp"

namespace kubefence {

enum class AttackCategory { kExploit, kMisconfiguration };

struct Mutation {
  enum class Op { kSet, kRemove };
  Op op = Op::kSet;
  std::string path;  // catalog form, e.g. containers.securityContext.privileged
  DocNode value;     // kSet only
};

struct CatalogEntry {
  std::string id;
  std::string description;
  std::string cve;  // empty for misconfigurations
  AttackCategory category = AttackCategory::kExploit;
  std::vector<std::string> target_paths;  // as listed in the catalog
  std::vector<Mutation> mutations;
  std::set<std::string> kinds;
};

/// E1..E8 then M1..M7.
const std::vector<CatalogEntry>& attack_catalog();
const CatalogEntry& catalog_entry(std::string_view id);
std::string catalog_yaml();

/// Kinds carrying a pod template, highest level first.
const std::vector<std::string>& workload_kinds();

/// Catalog path -> concrete path for `kind`: pod-spec prefix, list segments
/// turned into `[]`, `container.` read as `containers.`.
FieldPath expand_alias(std::string_view catalog_path, const std::string& kind);

/// Applies the entry's mutations. Throws kInapplicableKind.
DocNode inject(const DocNode& manifest, const CatalogEntry& entry);

struct AttackWorkload {
  std::string name;
  Validator validator;
  std::vector<DocNode> manifests;
  RbacPolicy rbac;
};

struct AttackResult {
  std::string workload;
  std::string entry;
  std::string kind;  // empty when no manifest was applicable
  bool applicable = false;
  bool blocked_rbac = false;
  bool blocked_kf = false;
  std::string reason;
  std::string path;
};

struct AttackMatrix {
  std::vector<AttackResult> results;

  struct Tally {
    int exploits_rbac = 0;
    int misconfig_rbac = 0;
    int exploits_kf = 0;
    int misconfig_kf = 0;
  };
  Tally tally(const std::string& workload) const;
  std::vector<std::string> workloads() const;

  std::string table() const;
  std::string detail_table() const;
  std::string to_json() const;
};

/// Picks the highest-level applicable manifest for an entry, or nullptr.
const DocNode* pick_target(const std::vector<DocNode>& manifests, const CatalogEntry& entry);

AttackMatrix run_catalog(const std::vector<AttackWorkload>& workloads,
                         const ValidateOptions& options = {});

}  // namespace kubefence

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
#include <set>
#include <string>
#include <vector>

#include "kubefence/policy.hpp"

namespace kubefence {

/// Configurable field space per kind.
struct FieldCatalog {
  std::map<std::string, std::set<FieldPath>> kinds;

  std::size_t total() const;
  bool has_kind(const std::string& kind) const { return kinds.count(kind) != 0; }
};

/// YAML mapping kind -> list of field paths (`spec.containers[].image`).
FieldCatalog parse_catalog(std::string_view yaml_text);
FieldCatalog load_catalog(const std::filesystem::path& path);

/// Kind-level allow list: `kinds: {Deployment: [create, get], ...}`.
/// A `"*"` kind or verb matches everything.
struct RbacPolicy {
  std::map<std::string, std::set<std::string>> kinds;

  bool allows_kind(const std::string& kind) const;
  bool allows(const std::string& kind, const std::string& verb) const;
};

RbacPolicy parse_rbac(std::string_view yaml_text);
RbacPolicy load_rbac(const std::filesystem::path& path);
/// Every catalog kind with every verb.
RbacPolicy permissive_rbac();

/// Fixed-point percentage in hundredths (7675 == 76.75 %).
struct Percent {
  long long hundredths = 0;

  std::string str() const;
  double value() const { return static_cast<double>(hundredths) / 100.0; }
  friend bool operator==(const Percent&, const Percent&) = default;
};

/// 100 * restrictable / total, rounded half-up to two decimals.
/// Throws kZeroTotal when total is zero.
Percent compute_reduction(std::size_t restrictable, std::size_t total);

struct SurfaceReport {
  std::string workload;
  std::size_t restrictable_rbac = 0;
  std::size_t restrictable_kf = 0;
  std::size_t total = 0;
  Percent reduction_rbac;
  Percent reduction_kf;
  Percent improvement;  // percentage points
  // Whitelisted fields whose value is restricted (enum, lock or constant).
  std::size_t value_locked = 0;
  std::optional<Percent> reduction_kf_with_values;

  std::string to_json() const;
};

struct AnalyzeOptions {
  bool count_value_locks = false;
};

/// Throws kUnknownKindInValidator when the validator names a kind missing
/// from the catalog, and kConfigError when the RBAC file does.
SurfaceReport analyze(const FieldCatalog& catalog, const Validator& validator,
                      const RbacPolicy& rbac, const AnalyzeOptions& options = {},
                      std::string workload = {});

/// Fields of `kind` that the validator admits (present in its whitelist).
std::set<FieldPath> whitelisted_fields(const FieldCatalog& catalog, const Validator& validator,
                                       const std::string& kind);

std::string format_surface_table(const std::vector<SurfaceReport>& reports,
                                 bool with_values = false);
std::string surface_json(const std::vector<SurfaceReport>& reports);

}  // namespace kubefence

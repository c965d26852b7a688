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

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kubefence/surface.hpp"

namespace kubefence {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool value_restricted(const SchemaNode& n) {
  switch (n.type()) {
    case SchemaNode::Type::kConstant:
    case SchemaNode::Type::kEnum:
      return true;
    case SchemaNode::Type::kLocked:
      return !placeholder_of(n.as_locked().value).has_value();
    default:
      return false;
  }
}

}  // namespace

std::size_t FieldCatalog::total() const {
  std::size_t n = 0;
  for (const auto& [kind, paths] : kinds) n += paths.size();
  return n;
}

FieldCatalog parse_catalog(std::string_view yaml_text) {
  DocNode root = parse_document(yaml_text);
  if (const DocNode* k = root.is_mapping() ? root.find("kinds") : nullptr) root = *k;
  if (!root.is_mapping()) throw Error(ErrorCode::kParseError, "catalog must map kind to paths");
  FieldCatalog c;
  for (const auto& e : root.entries()) {
    if (!e.value.is_sequence()) {
      throw Error(ErrorCode::kParseError, "catalog kind " + e.key + " must list paths",
                  e.value.position);
    }
    auto& set = c.kinds[e.key];
    for (const auto& p : e.value.items()) {
      if (!p.is_scalar()) throw Error(ErrorCode::kParseError, "path must be a string", p.position);
      set.insert(FieldPath::parse(p.text()));
    }
  }
  return c;
}

FieldCatalog load_catalog(const std::filesystem::path& path) {
  return parse_catalog(read_file(path));
}

bool RbacPolicy::allows_kind(const std::string& kind) const {
  return kinds.count(kind) != 0 || kinds.count("*") != 0;
}

bool RbacPolicy::allows(const std::string& kind, const std::string& verb) const {
  for (const auto* k : {&kind, static_cast<const std::string*>(nullptr)}) {
    auto it = kinds.find(k ? *k : std::string("*"));
    if (it == kinds.end()) continue;
    if (it->second.count(verb) || it->second.count("*")) return true;
  }
  return false;
}

RbacPolicy parse_rbac(std::string_view yaml_text) {
  DocNode root = parse_document(yaml_text);
  const DocNode* kinds = root.is_mapping() ? root.find("kinds") : nullptr;
  if (kinds == nullptr || !kinds->is_mapping()) {
    throw Error(ErrorCode::kParseError, "RBAC file must contain a kinds: mapping");
  }
  RbacPolicy p;
  for (const auto& e : kinds->entries()) {
    auto& verbs = p.kinds[e.key];
    if (e.value.is_scalar() && !e.value.is_null()) {
      verbs.insert(e.value.text());
      continue;
    }
    if (!e.value.is_sequence()) {
      throw Error(ErrorCode::kParseError, "verbs for " + e.key + " must be a list",
                  e.value.position);
    }
    for (const auto& v : e.value.items()) verbs.insert(v.text());
  }
  return p;
}

RbacPolicy load_rbac(const std::filesystem::path& path) { return parse_rbac(read_file(path)); }

RbacPolicy permissive_rbac() {
  RbacPolicy p;
  p.kinds["*"] = {"*"};
  return p;
}

std::string Percent::str() const {
  char buf[32];
  long long whole = hundredths / 100;
  long long frac = hundredths % 100;
  if (frac < 0) frac = -frac;
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", hundredths < 0 && whole == 0 ? "-" : "",
                whole, frac);
  return buf;
}

Percent compute_reduction(std::size_t restrictable, std::size_t total) {
  if (total == 0) throw Error(ErrorCode::kZeroTotal, "field total is zero");
  if (restrictable > total) {
    throw Error(ErrorCode::kConfigError, "restrictable count exceeds total");
  }
  auto r = static_cast<unsigned long long>(restrictable);
  auto t = static_cast<unsigned long long>(total);
  return Percent{static_cast<long long>((20000ULL * r + t) / (2ULL * t))};
}

std::set<FieldPath> whitelisted_fields(const FieldCatalog& catalog, const Validator& validator,
                                       const std::string& kind) {
  std::set<FieldPath> out;
  auto it = catalog.kinds.find(kind);
  const SchemaNode* schema = validator.find(kind);
  if (it == catalog.kinds.end() || schema == nullptr) return out;
  for (const auto& path : it->second) {
    bool covered = false;
    if (schema_at(*schema, path, &covered) != nullptr || covered) out.insert(path);
  }
  return out;
}

SurfaceReport analyze(const FieldCatalog& catalog, const Validator& validator,
                      const RbacPolicy& rbac, const AnalyzeOptions& options,
                      std::string workload) {
  for (const auto& k : validator.kinds) {
    if (!catalog.has_kind(k.kind)) {
      throw Error(ErrorCode::kUnknownKindInValidator,
                  "validator kind '" + k.kind + "' is not in the field catalog");
    }
  }
  for (const auto& [kind, verbs] : rbac.kinds) {
    if (kind != "*" && !catalog.has_kind(kind)) {
      throw Error(ErrorCode::kConfigError, "RBAC kind '" + kind + "' is not in the field catalog");
    }
  }
  SurfaceReport r;
  r.workload = workload.empty() ? validator.chart : std::move(workload);
  r.total = catalog.total();
  std::size_t whitelisted = 0;
  for (const auto& [kind, paths] : catalog.kinds) {
    if (!rbac.allows_kind(kind)) {
      r.restrictable_rbac += paths.size();
      continue;
    }
    auto allowed = whitelisted_fields(catalog, validator, kind);
    whitelisted += allowed.size();
    if (options.count_value_locks) {
      const SchemaNode* schema = validator.find(kind);
      for (const auto& p : allowed) {
        const SchemaNode* n = schema_at(*schema, p);
        if (n != nullptr && value_restricted(*n)) ++r.value_locked;
      }
    }
  }
  r.restrictable_kf = r.total - whitelisted;
  r.reduction_rbac = compute_reduction(r.restrictable_rbac, r.total);
  r.reduction_kf = compute_reduction(r.restrictable_kf, r.total);
  r.improvement = Percent{r.reduction_kf.hundredths - r.reduction_rbac.hundredths};
  if (options.count_value_locks) {
    r.reduction_kf_with_values = compute_reduction(r.restrictable_kf + r.value_locked, r.total);
  }
  return r;
}

std::string SurfaceReport::to_json() const {
  nlohmann::ordered_json j;
  j["workload"] = workload;
  j["restrictable_rbac"] = restrictable_rbac;
  j["restrictable_kf"] = restrictable_kf;
  j["total"] = total;
  j["reduction_rbac"] = reduction_rbac.value();
  j["reduction_kf"] = reduction_kf.value();
  j["improvement"] = improvement.value();
  if (reduction_kf_with_values) {
    j["value_locked"] = value_locked;
    j["reduction_kf_with_values"] = reduction_kf_with_values->value();
  }
  return j.dump();
}

std::string format_surface_table(const std::vector<SurfaceReport>& reports, bool with_values) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %12s %12s %8s %10s %10s %12s", "Workload",
                "RBAC fields", "KF fields", "Total", "RBAC %", "KF %", "Improvement");
  out << line;
  if (with_values) out << "  Value-locked  KF+values %";
  out << "\n";
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-16s %12zu %12zu %8zu %10s %10s %12s",
                  r.workload.c_str(), r.restrictable_rbac, r.restrictable_kf, r.total,
                  r.reduction_rbac.str().c_str(), r.reduction_kf.str().c_str(),
                  ("+" + r.improvement.str()).c_str());
    out << line;
    if (with_values && r.reduction_kf_with_values) {
      std::snprintf(line, sizeof line, "  %12zu %11s", r.value_locked,
                    r.reduction_kf_with_values->str().c_str());
      out << line;
    }
    out << "\n";
  }
  return out.str();
}

std::string surface_json(const std::vector<SurfaceReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(nlohmann::ordered_json::parse(r.to_json()));
  return arr.dump(2);
}

}  // namespace kubefence

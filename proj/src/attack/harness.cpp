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
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "kubefence/attack.hpp"

namespace kubefence {

namespace {

const std::set<std::string>& list_segments() {
  static const std::set<std::string> s = {"containers", "initContainers",
                                          "ephemeralContainers", "volumeMounts", "volumes"};
  return s;
}

std::string pod_spec_prefix(const std::string& kind) {
  if (kind == "Pod") return "spec";
  if (kind == "CronJob") return "spec.jobTemplate.spec.template.spec";
  const auto& w = workload_kinds();
  if (std::find(w.begin(), w.end(), kind) != w.end()) return "spec.template.spec";
  return {};
}

std::string manifest_kind(const DocNode& manifest) {
  const DocNode* k = manifest.is_mapping() ? manifest.find("kind") : nullptr;
  return k && k->is_scalar() ? k->text() : std::string();
}

void apply_set(DocNode& node, const std::vector<FieldPath::Segment>& segs, std::size_t i,
               const DocNode& value) {
  if (i == segs.size()) {
    node = value;
    return;
  }
  const auto& seg = segs[i];
  if (seg.wildcard) {
    if (!node.is_sequence() || node.items().empty()) {
      node = DocNode::sequence(Sequence{DocNode::mapping()});
    }
    for (auto& item : node.items()) apply_set(item, segs, i + 1, value);
    return;
  }
  if (!node.is_mapping()) node = DocNode::mapping();
  DocNode* child = node.find(seg.key);
  if (child == nullptr) child = &node.set(seg.key, DocNode::mapping());
  apply_set(*child, segs, i + 1, value);
}

void apply_remove(DocNode& node, const std::vector<FieldPath::Segment>& segs, std::size_t i) {
  const auto& seg = segs[i];
  if (seg.wildcard) {
    if (!node.is_sequence()) return;
    for (auto& item : node.items()) apply_remove(item, segs, i + 1);
    return;
  }
  if (!node.is_mapping()) return;
  if (i + 1 == segs.size()) {
    node.erase(seg.key);
    return;
  }
  if (DocNode* child = node.find(seg.key)) apply_remove(*child, segs, i + 1);
}

}  // namespace

FieldPath expand_alias(std::string_view catalog_path, const std::string& kind) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i <= catalog_path.size()) {
    auto j = catalog_path.find('.', i);
    if (j == std::string_view::npos) j = catalog_path.size();
    parts.emplace_back(catalog_path.substr(i, j - i));
    i = j + 1;
  }
  if (!parts.empty() && parts[0] == "container") parts[0] = "containers";
  // Volumes live beside the containers, not inside them.
  if (parts.size() >= 2 && parts[0] == "containers" && parts[1] == "volumes") {
    parts.erase(parts.begin());
  }
  std::string prefix;
  if (kind == "Service") {
    prefix = "spec";
  } else {
    prefix = pod_spec_prefix(kind);
  }
  if (prefix.empty()) {
    throw Error(ErrorCode::kInapplicableKind, "no alias for kind '" + kind + "'");
  }
  FieldPath out = FieldPath::parse(prefix);
  for (const auto& p : parts) {
    out = out.key(p);
    if (list_segments().count(p)) out = out.element();
  }
  return out;
}

DocNode inject(const DocNode& manifest, const CatalogEntry& entry) {
  std::string kind = manifest_kind(manifest);
  if (!entry.kinds.count(kind)) {
    throw Error(ErrorCode::kInapplicableKind,
                entry.id + " does not apply to kind '" + kind + "'");
  }
  DocNode out = manifest;
  for (const auto& m : entry.mutations) {
    FieldPath path = expand_alias(m.path, kind);
    if (m.op == Mutation::Op::kSet) {
      apply_set(out, path.segments(), 0, m.value);
    } else {
      apply_remove(out, path.segments(), 0);
    }
  }
  return out;
}

const DocNode* pick_target(const std::vector<DocNode>& manifests, const CatalogEntry& entry) {
  std::vector<std::string> order;
  for (const auto& k : workload_kinds()) {
    if (entry.kinds.count(k)) order.push_back(k);
  }
  for (const auto& k : entry.kinds) {
    if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);
  }
  for (const auto& k : order) {
    for (const auto& m : manifests) {
      if (manifest_kind(m) == k) return &m;
    }
  }
  return nullptr;
}

AttackMatrix run_catalog(const std::vector<AttackWorkload>& workloads,
                         const ValidateOptions& options) {
  AttackMatrix matrix;
  for (const auto& w : workloads) {
    for (const auto& entry : attack_catalog()) {
      AttackResult r;
      r.workload = w.name;
      r.entry = entry.id;
      const DocNode* target = pick_target(w.manifests, entry);
      if (target == nullptr) {
        r.reason = "no applicable manifest";
        matrix.results.push_back(std::move(r));
        continue;
      }
      r.applicable = true;
      r.kind = manifest_kind(*target);
      DocNode malicious = inject(*target, entry);
      r.blocked_rbac = !w.rbac.allows(r.kind, "create");
      Verdict v = validate_object(malicious, w.validator, options);
      r.blocked_kf = !v.allowed;
      if (!v.allowed) {
        r.reason = std::string(violation_reason_name(v.reason));
        r.path = v.path.str();
      }
      matrix.results.push_back(std::move(r));
    }
  }
  return matrix;
}

std::vector<std::string> AttackMatrix::workloads() const {
  std::vector<std::string> out;
  for (const auto& r : results) {
    if (std::find(out.begin(), out.end(), r.workload) == out.end()) out.push_back(r.workload);
  }
  return out;
}

AttackMatrix::Tally AttackMatrix::tally(const std::string& workload) const {
  Tally t;
  for (const auto& r : results) {
    if (r.workload != workload || !r.applicable) continue;
    bool exploit = catalog_entry(r.entry).category == AttackCategory::kExploit;
    if (r.blocked_rbac) ++(exploit ? t.exploits_rbac : t.misconfig_rbac);
    if (r.blocked_kf) ++(exploit ? t.exploits_kf : t.misconfig_kf);
  }
  return t;
}

std::string AttackMatrix::table() const {
  int exploits = 0;
  int misconfigs = 0;
  for (const auto& e : attack_catalog()) {
    ++(e.category == AttackCategory::kExploit ? exploits : misconfigs);
  }
  std::ostringstream out;
  char line[200];
  std::snprintf(line, sizeof line, "%-16s %10s %14s %10s %14s\n", "Workload", "RBAC CVEs",
                "RBAC Misconf", "KF CVEs", "KF Misconf");
  out << line;
  for (const auto& w : workloads()) {
    Tally t = tally(w);
    auto frac = [](int n, int d) { return std::to_string(n) + "/" + std::to_string(d); };
    std::snprintf(line, sizeof line, "%-16s %10s %14s %10s %14s\n", w.c_str(),
                  frac(t.exploits_rbac, exploits).c_str(),
                  frac(t.misconfig_rbac, misconfigs).c_str(),
                  frac(t.exploits_kf, exploits).c_str(), frac(t.misconfig_kf, misconfigs).c_str());
    out << line;
  }
  return out.str();
}

std::string AttackMatrix::detail_table() const {
  std::ostringstream out;
  char line[400];
  std::snprintf(line, sizeof line, "%-16s %-4s %-12s %-6s %-6s %-18s %s\n", "Workload", "ID",
                "Kind", "RBAC", "KF", "Reason", "Path");
  out << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-16s %-4s %-12s %-6s %-6s %-18s %s\n",
                  r.workload.c_str(), r.entry.c_str(), r.applicable ? r.kind.c_str() : "-",
                  r.blocked_rbac ? "block" : "allow", r.blocked_kf ? "block" : "allow",
                  r.reason.c_str(), r.path.c_str());
    out << line;
  }
  return out.str();
}

std::string AttackMatrix::to_json() const {
  nlohmann::ordered_json j;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json row;
    row["workload"] = r.workload;
    row["id"] = r.entry;
    row["applicable"] = r.applicable;
    if (r.applicable) row["kind"] = r.kind;
    row["blocked_rbac"] = r.blocked_rbac;
    row["blocked_kf"] = r.blocked_kf;
    if (!r.reason.empty()) row["reason"] = r.reason;
    if (!r.path.empty()) row["path"] = r.path;
    rows.push_back(std::move(row));
  }
  j["results"] = std::move(rows);
  auto summary = nlohmann::ordered_json::array();
  for (const auto& w : workloads()) {
    Tally t = tally(w);
    summary.push_back({{"workload", w},
                       {"rbac_cves", t.exploits_rbac},
                       {"rbac_misconfigurations", t.misconfig_rbac},
                       {"kf_cves", t.exploits_kf},
                       {"kf_misconfigurations", t.misconfig_kf}});
  }
  j["summary"] = std::move(summary);
  return j.dump(2);
}

}  // namespace kubefence

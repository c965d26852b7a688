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

#include "kubefence/attack.hpp"

namespace kubefence {

namespace {

DocNode str_list(std::initializer_list<const char*> items) {
  Sequence seq;
  for (const char* s : items) seq.push_back(DocNode::string(s));
  return DocNode::sequence(std::move(seq));
}

Mutation set(std::string path, DocNode value) {
  return Mutation{Mutation::Op::kSet, std::move(path), std::move(value)};
}

Mutation remove(std::string path) {
  return Mutation{Mutation::Op::kRemove, std::move(path), DocNode::null()};
}

std::set<std::string> pod_kinds() {
  const auto& k = workload_kinds();
  return {k.begin(), k.end()};
}

std::vector<CatalogEntry> build_catalog() {
  using C = AttackCategory;
  std::vector<CatalogEntry> c;
  auto add = [&](std::string id, std::string description, std::string cve, C category,
                 std::vector<std::string> paths, std::vector<Mutation> mutations,
                 std::set<std::string> kinds) {
    c.push_back(CatalogEntry{std::move(id), std::move(description), std::move(cve), category,
                             std::move(paths), std::move(mutations), std::move(kinds)});
  };
  add("E1", "Activation of hostNetwork", "CVE-2020-15257", C::kExploit, {"hostNetwork"},
      {set("hostNetwork", DocNode::boolean(true))}, pod_kinds());
  add("E2", "Abusing LoadBalancer or ExternalIPs", "CVE-2020-8554", C::kExploit,
      {"externalIPs"}, {set("externalIPs", str_list({"203.0.113.7"}))}, {"Service"});
  add("E3", "Command injection via volume and volumeMounts", "CVE-2023-3676", C::kExploit,
      {"containers.volumeMounts.subPath", "containers.volumes.subPath"},
      {set("containers.volumeMounts.subPath", DocNode::string("symlink-door"))}, pod_kinds());
  add("E4", "Mount subPath on a file or emptyDir", "CVE-2017-1002101", C::kExploit,
      {"containers.volumeMounts.subPath"},
      {set("containers.volumeMounts.subPath", DocNode::string("symlink-door"))}, pod_kinds());
  add("E5", "Absent Resource Limit", "CVE-2019-11253", C::kExploit,
      {"containers.resources.limits"}, {remove("containers.resources.limits")}, pod_kinds());
  add("E6", "Symlink exchange allows host filesystem access", "CVE-2021-25741", C::kExploit,
      {"container.command"}, {set("container.command", str_list({"ln", "-s", "/", "/mnt/x"}))},
      pod_kinds());
  add("E7", "Bypass of Seccomp Profile", "CVE-2023-2431", C::kExploit,
      {"containers.securityContext.seccompProfile.localhostProfile"},
      {set("containers.securityContext.seccompProfile.type", DocNode::string("Localhost")),
       set("containers.securityContext.seccompProfile.localhostProfile",
           DocNode::string("../../relative/escape"))},
      pod_kinds());
  add("E8", "Privileged Containers", "CVE-2021-21334", C::kExploit,
      {"containers.securityContext.privileged"},
      {set("containers.securityContext.privileged", DocNode::boolean(true))}, pod_kinds());
  add("M1", "Activation of hostIPC", "", C::kMisconfiguration, {"hostIPC"},
      {set("hostIPC", DocNode::boolean(true))}, pod_kinds());
  add("M2", "Activation of hostPID", "", C::kMisconfiguration, {"hostPID"},
      {set("hostPID", DocNode::boolean(true))}, pod_kinds());
  add("M3", "Use Readonly Filesystem", "", C::kMisconfiguration,
      {"containers.securityContext.readOnlyRootFilesystem"},
      {set("containers.securityContext.readOnlyRootFilesystem", DocNode::boolean(false))},
      pod_kinds());
  add("M4", "Running Containers as Root", "", C::kMisconfiguration,
      {"containers.securityContext.runAsNonRoot", "containers.securityContext.runAsRootAllowed"},
      {set("containers.securityContext.runAsNonRoot", DocNode::boolean(false))}, pod_kinds());
  add("M5", "Allow Dangerous Capabilities to Containers", "", C::kMisconfiguration,
      {"containers.securityContext.capabilities.add"},
      {set("containers.securityContext.capabilities.add", str_list({"SYS_ADMIN"}))},
      pod_kinds());
  add("M6", "Escalated Privileges for Child Container Processes", "", C::kMisconfiguration,
      {"containers.securityContext.allowPrivilegeEscalation"},
      {set("containers.securityContext.allowPrivilegeEscalation", DocNode::boolean(true))},
      pod_kinds());
  add("M7", "Custom SELinux user or role", "", C::kMisconfiguration,
      {"containers.securityContext.seLinuxOptions.user",
       "containers.securityContext.seLinuxOptions.role"},
      {set("containers.securityContext.seLinuxOptions.user", DocNode::string("system_u")),
       set("containers.securityContext.seLinuxOptions.role", DocNode::string("system_r"))},
      pod_kinds());
  return c;
}

}  // namespace

const std::vector<std::string>& workload_kinds() {
  static const std::vector<std::string> kinds = {
      "Deployment", "StatefulSet", "DaemonSet", "ReplicaSet",
      "ReplicationController", "Job", "CronJob", "Pod"};
  return kinds;
}

const std::vector<CatalogEntry>& attack_catalog() {
  static const std::vector<CatalogEntry> catalog = build_catalog();
  return catalog;
}

const CatalogEntry& catalog_entry(std::string_view id) {
  for (const auto& e : attack_catalog()) {
    if (e.id == id) return e;
  }
  throw Error(ErrorCode::kConfigError, "no catalog entry " + std::string(id));
}

std::string catalog_yaml() {
  Sequence entries;
  for (const auto& e : attack_catalog()) {
    Mapping m;
    m.push_back({"id", DocNode::string(e.id)});
    m.push_back({"description", DocNode::string(e.description)});
    if (!e.cve.empty()) m.push_back({"cve", DocNode::string(e.cve)});
    m.push_back({"category", DocNode::string(e.category == AttackCategory::kExploit
                                                 ? "exploit"
                                                 : "misconfiguration")});
    Sequence paths;
    for (const auto& p : e.target_paths) paths.push_back(DocNode::string(p));
    m.push_back({"targetPaths", DocNode::sequence(std::move(paths))});
    Sequence muts;
    for (const auto& mu : e.mutations) {
      Mapping mm;
      mm.push_back({"op", DocNode::string(mu.op == Mutation::Op::kSet ? "set" : "remove")});
      mm.push_back({"path", DocNode::string(mu.path)});
      if (mu.op == Mutation::Op::kSet) mm.push_back({"value", mu.value});
      muts.push_back(DocNode::mapping(std::move(mm)));
    }
    m.push_back({"mutations", DocNode::sequence(std::move(muts))});
    Sequence kinds;
    for (const auto& k : e.kinds) kinds.push_back(DocNode::string(k));
    m.push_back({"kinds", DocNode::sequence(std::move(kinds), true)});
    entries.push_back(DocNode::mapping(std::move(m)));
  }
  return to_yaml(DocNode::mapping(Mapping{{"entries", DocNode::sequence(std::move(entries))}})) +
         "\n";
}

}  // namespace kubefence

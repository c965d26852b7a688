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

#include <doctest.h>

#include "support.hpp"

using namespace kubefence;

namespace {

AttackWorkload workload(const std::string& name) {
  return AttackWorkload{name, kftest::generated(name).validator, kftest::concrete_manifests(name),
                        permissive_rbac()};
}

DocNode of_kind(const std::string& chart, const std::string& kind) {
  for (const auto& m : kftest::concrete_manifests(chart)) {
    if (m.find("kind")->text() == kind) return m;
  }
  FAIL("missing kind " << kind);
  return {};
}

}  // namespace

TEST_SUITE("attack_harness") {

TEST_CASE("catalog has fifteen entries") {
  const auto& c = attack_catalog();
  CHECK(c.size() == 15);
  std::set<std::string> ids;
  int exploits = 0;
  for (const auto& e : c) {
    ids.insert(e.id);
    exploits += e.category == AttackCategory::kExploit;
    CHECK_FALSE(e.target_paths.empty());
    CHECK_FALSE(e.mutations.empty());
    CHECK((e.category == AttackCategory::kExploit) == !e.cve.empty());
  }
  CHECK(ids.size() == 15);
  CHECK(exploits == 8);
  CHECK(catalog_entry("M4").target_paths.size() == 2);
  CHECK(parse_document(catalog_yaml()).find("entries")->size() == 15);
}

TEST_CASE("alias expansion") {
  CHECK(expand_alias("containers.securityContext.privileged", "Deployment").str() ==
        "spec.template.spec.containers[].securityContext.privileged");
  CHECK(expand_alias("hostNetwork", "Pod").str() == "spec.hostNetwork");
  CHECK(expand_alias("externalIPs", "Service").str() == "spec.externalIPs");
}

TEST_CASE("injection examples") {
  DocNode svc = of_kind("mlflow-mini", "Service");
  DocNode e2 = inject(svc, catalog_entry("E2"));
  const DocNode* ips = resolve(e2, FieldPath::parse("spec.externalIPs"));
  REQUIRE(ips != nullptr);
  CHECK(ips->items().at(0).text() == "203.0.113.7");

  DocNode dep = of_kind("mlflow-mini", "Deployment");
  DocNode e5 = inject(dep, catalog_entry("E5"));
  const DocNode& c5 = resolve(e5, FieldPath::parse("spec.template.spec.containers"))->items()[0];
  CHECK(resolve(c5, FieldPath::parse("resources.limits")) == nullptr);

  DocNode m4 = inject(dep, catalog_entry("M4"));
  const DocNode& c4 = resolve(m4, FieldPath::parse("spec.template.spec.containers"))->items()[0];
  CHECK(resolve(c4, FieldPath::parse("securityContext.runAsNonRoot"))->text() == "false");
}

TEST_CASE("injection touches only the target fields") {
  DocNode dep = of_kind("nginx-mini", "Deployment");
  DocNode e1 = inject(dep, catalog_entry("E1"));
  DocNode* spec = const_cast<DocNode*>(resolve(e1, FieldPath::parse("spec.template.spec")));
  CHECK(spec->erase("hostNetwork"));
  CHECK(kftest::same_tree(e1, dep));

  DocNode e8 = inject(dep, catalog_entry("E8"));
  DocNode& c = const_cast<DocNode&>(
      resolve(e8, FieldPath::parse("spec.template.spec.containers"))->items()[0]);
  DocNode& orig = const_cast<DocNode&>(
      resolve(dep, FieldPath::parse("spec.template.spec.containers"))->items()[0]);
  c.find("securityContext")->set("privileged", DocNode::boolean(false));
  orig.find("securityContext")->set("privileged", DocNode::boolean(false));
  CHECK(kftest::same_tree(e8, dep));
}

TEST_CASE("every entry is blocked by the fixture validators and none by RBAC") {
  std::vector<AttackWorkload> ws;
  for (const auto& name : kftest::fixture_charts()) ws.push_back(workload(name));
  AttackMatrix m = run_catalog(ws);
  const std::set<std::string> reasons = {"UnknownField", "LockViolation", "EnumViolation",
                                         "TypeMismatch", "MissingRequired", "ShapeMismatch"};
  for (const auto& name : kftest::fixture_charts()) {
    auto t = m.tally(name);
    INFO(name);
    CHECK(t.exploits_kf == 8);
    CHECK(t.misconfig_kf == 7);
    CHECK(t.exploits_rbac == 0);
    CHECK(t.misconfig_rbac == 0);
  }
  for (const auto& r : m.results) {
    INFO(r.workload << " " << r.entry);
    CHECK(r.applicable);
    CHECK(reasons.count(r.reason) == 1);
  }
  CHECK(m.table().find("8/8") != std::string::npos);
}

TEST_CASE("a validator that whitelists hostNetwork lets E1 through") {
  AttackWorkload w = workload("nginx-mini");
  for (auto& k : w.validator.kinds) {
    if (k.kind != "Deployment") continue;
    SchemaNode* spec = const_cast<SchemaNode*>(
        schema_at(k.schema, FieldPath::parse("spec.template.spec")));
    REQUIRE(spec != nullptr);
    spec->set("hostNetwork", Placeholder::kBool, true);
  }
  AttackMatrix m = run_catalog({w});
  for (const auto& r : m.results) {
    if (r.entry == "E1") CHECK_FALSE(r.blocked_kf);
  }
  CHECK(m.tally("nginx-mini").exploits_kf == 7);
}

TEST_CASE("RBAC that denies a kind blocks its attacks") {
  AttackWorkload w = workload("mlflow-mini");
  w.rbac = parse_rbac("kinds:\n  Secret: [create]\n");
  AttackMatrix m = run_catalog({w});
  CHECK(m.tally("mlflow-mini").exploits_rbac == 8);
}

}  // TEST_SUITE

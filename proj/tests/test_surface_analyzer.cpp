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

#include <algorithm>
#include <cmath>

#include "support.hpp"

using namespace kubefence;

namespace {

struct Row {
  const char* workload;
  std::size_t rbac;
  double rbac_pct;
  std::size_t kf;
  double kf_pct;
};

// Published restrictable-field counts over a 4882-field surface.
const Row kRows[] = {
    {"Nginx", 3747, 76.75, 4751, 97.32},      {"Mlflow", 3883, 79.54, 4826, 98.85},
    {"PostgreSQL", 2906, 59.52, 4711, 96.50}, {"RabbitMQ", 3676, 75.30, 4708, 96.44},
    {"SonarQube", 1012, 20.73, 4772, 97.75},
};

Validator validator_with(const std::string& kind, const std::vector<std::string>& keys) {
  SchemaNode s;
  for (const auto& k : keys) s.set(k, Placeholder::kString);
  Validator v;
  v.kinds.push_back({kind, s});
  return v;
}

}  // namespace

TEST_SUITE("surface_analyzer") {

TEST_CASE("published reductions are reproduced") {
  for (const auto& r : kRows) {
    INFO(r.workload);
    CHECK(std::fabs(compute_reduction(r.rbac, 4882).value() - r.rbac_pct) <= 0.01);
    CHECK(std::fabs(compute_reduction(r.kf, 4882).value() - r.kf_pct) <= 0.01);
  }
  CHECK(compute_reduction(3747, 4882).str() == "76.75");
  CHECK(compute_reduction(1012, 4882).str() == "20.73");
}

TEST_CASE("rounding is half-up in hundredths") {
  for (std::size_t t : {1u, 3u, 7u, 15u, 4882u}) {
    for (std::size_t r = 0; r <= t; ++r) {
      long long want = static_cast<long long>(std::floor(10000.0 * r / t + 0.5 + 1e-9));
      CHECK(compute_reduction(r, t).hundredths == want);
    }
  }
  CHECK_THROWS_AS(compute_reduction(0, 0), Error);
}

TEST_CASE("toy surface") {
  FieldCatalog cat;
  for (const char* p : {"a", "b", "c", "d", "e"}) cat.kinds["Secret"].insert(FieldPath::parse(p));
  for (const char* p : {"spec.a", "spec.b", "spec.c", "spec.d", "spec.e", "spec.f", "spec.g",
                        "spec.h", "metadata.name", "metadata.labels"}) {
    cat.kinds["Deployment"].insert(FieldPath::parse(p));
  }
  RbacPolicy rbac;
  rbac.kinds["Deployment"] = {"create"};
  SchemaNode spec;
  spec.set("a", Placeholder::kInt);
  spec.set("b", Placeholder::kString);
  SchemaNode meta;
  meta.set("name", Placeholder::kString);
  meta.set("labels", Placeholder::kDict);
  SchemaNode root;
  root.set("spec", spec);
  root.set("metadata", meta);
  Validator v;
  v.kinds.push_back({"Deployment", root});
  SurfaceReport r = analyze(cat, v, rbac);
  CHECK(r.total == 15);
  CHECK(r.restrictable_rbac == 5);
  CHECK(r.restrictable_kf == 11);
  CHECK(r.reduction_rbac.str() == "33.33");
  CHECK(r.reduction_kf.str() == "73.33");
  CHECK(r.improvement.str() == "40.00");
}

TEST_CASE("permissive RBAC with everything whitelisted restricts nothing") {
  FieldCatalog cat;
  cat.kinds["ConfigMap"] = {FieldPath::parse("data"), FieldPath::parse("metadata.name")};
  SchemaNode root;
  root.set("data", Placeholder::kDict);
  SchemaNode meta;
  meta.set("name", Placeholder::kString);
  root.set("metadata", meta);
  Validator v;
  v.kinds.push_back({"ConfigMap", root});
  SurfaceReport r = analyze(cat, v, permissive_rbac());
  CHECK(r.reduction_rbac.str() == "0.00");
  CHECK(r.reduction_kf.str() == "0.00");
}

TEST_CASE("errors") {
  FieldCatalog empty;
  CHECK_THROWS_AS(analyze(empty, Validator{}, permissive_rbac()), Error);
  FieldCatalog cat;
  cat.kinds["Pod"] = {FieldPath::parse("spec")};
  try {
    analyze(cat, validator_with("Widget", {"x"}), permissive_rbac());
    FAIL("expected UnknownKindInValidator");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownKindInValidator);
  }
}

TEST_CASE("catalog and rbac files") {
  FieldCatalog cat = load_catalog(kftest::fixtures() / "catalog/fields.yaml");
  CHECK(cat.total() > 1000);
  CHECK(cat.has_kind("Deployment"));
  CHECK(cat.kinds["Deployment"].count(
      FieldPath::parse("spec.template.spec.containers[].securityContext.runAsNonRoot")));
  RbacPolicy rbac = load_rbac(kftest::fixtures() / "rbac/mlflow-mini.yaml");
  CHECK(rbac.allows_kind("Secret"));
  CHECK_FALSE(rbac.allows_kind("Pod"));
  CHECK(load_rbac(kftest::fixtures() / "rbac/permissive.yaml").allows("Pod", "create"));
}

TEST_CASE("fixture validators reduce more than RBAC") {
  FieldCatalog cat = load_catalog(kftest::fixtures() / "catalog/fields.yaml");
  for (const auto& name : kftest::fixture_charts()) {
    RbacPolicy rbac = load_rbac(kftest::fixtures() / ("rbac/" + name + ".yaml"));
    AnalyzeOptions o;
    o.count_value_locks = true;
    SurfaceReport r = analyze(cat, kftest::generated(name).validator, rbac, o);
    INFO(name);
    CHECK(r.restrictable_kf > r.restrictable_rbac);
    CHECK(r.value_locked > 0);
    CHECK(r.reduction_kf_with_values->hundredths >= r.reduction_kf.hundredths);
  }
}

TEST_CASE("property: KF restrictable fields are a superset of RBAC restrictable fields") {
  kftest::TreeGen g(41);
  const std::vector<std::string> kinds = {"Pod", "Service", "Secret", "ConfigMap", "Job"};
  for (int i = 0; i < 150; ++i) {
    FieldCatalog cat;
    Validator v;
    RbacPolicy rbac;
    for (const auto& k : kinds) {
      int n = g.uniform(1, 12);
      std::set<std::string> keys;
      for (int j = 0; j < n; ++j) {
        std::string p = g.key();
        if (g.coin()) p += "." + g.key();
        cat.kinds[k].insert(FieldPath::parse(p));
        keys.insert(p.substr(0, p.find('.')));
      }
      if (g.coin(0.6)) rbac.kinds[k] = {"create"};
      if (g.coin(0.6)) {
        std::vector<std::string> pick;
        for (const auto& key : keys) {
          if (g.coin()) pick.push_back(key);
        }
        v.kinds.push_back({k, validator_with(k, pick).kinds[0].schema});
      }
    }
    std::set<std::string> rbac_restricted;
    std::set<std::string> kf_restricted;
    for (const auto& [kind, paths] : cat.kinds) {
      auto white = rbac.allows_kind(kind) ? whitelisted_fields(cat, v, kind) : std::set<FieldPath>{};
      for (const auto& p : paths) {
        std::string id = kind + "/" + p.str();
        if (!rbac.allows_kind(kind)) rbac_restricted.insert(id);
        if (!white.count(p)) kf_restricted.insert(id);
      }
    }
    CHECK(std::includes(kf_restricted.begin(), kf_restricted.end(), rbac_restricted.begin(),
                        rbac_restricted.end()));
    SurfaceReport r = analyze(cat, v, rbac);
    CHECK(r.restrictable_rbac == rbac_restricted.size());
    CHECK(r.restrictable_kf == kf_restricted.size());
    CHECK(r.restrictable_kf >= r.restrictable_rbac);

    std::reverse(v.kinds.begin(), v.kinds.end());
    SurfaceReport again = analyze(cat, v, rbac);
    CHECK(again.restrictable_kf == r.restrictable_kf);
  }
}

}  // TEST_SUITE

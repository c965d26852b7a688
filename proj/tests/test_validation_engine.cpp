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

const Validator& mlflow() { return kftest::generated("mlflow-mini").validator; }

DocNode mlflow_deployment() {
  for (const auto& m : kftest::concrete_manifests("mlflow-mini")) {
    if (m.find("kind")->text() == "Deployment") return m;
  }
  FAIL("no Deployment");
  return {};
}

DocNode& first_container(DocNode& d) {
  return const_cast<DocNode&>(
      resolve(d, FieldPath::parse("spec.template.spec.containers"))->items()[0]);
}

}  // namespace

TEST_SUITE("validation_engine") {

TEST_CASE("unknown kind") {
  Verdict v = validate_object(parse_document("kind: CronJob\nspec: {}\n"), mlflow());
  CHECK_FALSE(v.allowed);
  CHECK(v.reason == ViolationReason::kUnknownKind);
}

TEST_CASE("unknown field") {
  DocNode d = mlflow_deployment();
  const_cast<DocNode*>(resolve(d, FieldPath::parse("spec.template.spec")))
      ->set("hostNetwork", DocNode::boolean(true));
  Verdict v = validate_object(d, mlflow());
  CHECK_FALSE(v.allowed);
  CHECK(v.reason == ViolationReason::kUnknownField);
  CHECK(v.path.str() == "spec.template.spec.hostNetwork");
}

TEST_CASE("enum violation on imagePullPolicy") {
  BuildOptions opts;
  opts.locks = {};
  std::vector<DocNode> docs;
  for (const char* f : {"golden/merge/manifest-1.yaml", "golden/merge/manifest-2.yaml"}) {
    docs.push_back(parse_document(kftest::read_file(kftest::fixtures() / f)));
  }
  Validator val = build_validator(docs, opts);
  DocNode d = docs[1];
  d.find("containers")->items()[0].set("imagePullPolicy", DocNode::plain("Never"));
  Verdict v = validate_object(d, val);
  CHECK_FALSE(v.allowed);
  CHECK(v.reason == ViolationReason::kEnumViolation);
  CHECK(v.path.str() == "containers[].imagePullPolicy");
  ValidateOptions symbolic;
  symbolic.symbolic = true;
  CHECK(validate_object(docs[0], val, symbolic).allowed);
  CHECK_FALSE(validate_object(docs[0], val).allowed);
}

TEST_CASE("malicious deployment is denied at runAsNonRoot") {
  DocNode d = parse_document(kftest::read_file(kftest::fixtures() / "golden/malicious-deployment.yaml"));
  Verdict v = validate_object(d, mlflow());
  CHECK_FALSE(v.allowed);
  CHECK(v.reason == ViolationReason::kLockViolation);
  CHECK(v.path.str() == "spec.template.spec.containers[].securityContext.runAsNonRoot");
  CHECK(v.to_json().find("runAsNonRoot") != std::string::npos);
}

TEST_CASE("all violations are collected on request") {
  DocNode d = mlflow_deployment();
  DocNode& c = first_container(d);
  c.set("stdin", DocNode::boolean(true));
  c.set("tty", DocNode::boolean(true));
  ValidateOptions o;
  o.all_violations = true;
  Verdict v = validate_object(d, mlflow(), o);
  CHECK_FALSE(v.allowed);
  CHECK(v.violations.size() >= 2);
  CHECK(v.violations[0].path == v.path);
}

TEST_CASE("patches") {
  const Validator& val = mlflow();
  CHECK(validate_patch(parse_document("spec:\n  replicas: 3\n"), PatchType::kMerge, "Deployment", val)
            .allowed);
  DocNode remove = parse_document(
      R"([{"op": "remove", "path": "/spec/template/spec/containers/0/securityContext/runAsNonRoot"}])",
      DocFormat::kJson);
  Verdict r = validate_patch(remove, PatchType::kJsonPatch, "Deployment", val);
  CHECK_FALSE(r.allowed);
  CHECK(r.reason == ViolationReason::kLockViolation);
  Verdict h = validate_patch(parse_document("spec:\n  template:\n    spec:\n      hostPID: true\n"),
                             PatchType::kStrategicMerge, "Deployment", val);
  CHECK_FALSE(h.allowed);
  CHECK(h.reason == ViolationReason::kUnknownField);
  CHECK(patch_type_from_content_type("application/merge-patch+json") == PatchType::kMerge);
  CHECK(patch_type_from_content_type("application/json-patch+json") == PatchType::kJsonPatch);
  CHECK(patch_type_from_content_type("application/strategic-merge-patch+json") ==
        PatchType::kStrategicMerge);
  CHECK_THROWS_AS(patch_type_from_content_type("text/plain"), Error);
}

TEST_CASE("property: engine agrees with the brute-force oracle") {
  kftest::TreeGen g(31);
  int cases = 0;
  int allows = 0;
  int disagreements = 0;
  while (cases < 1500) {
    SchemaNode s = g.schema(3);
    Validator v = kftest::single_kind_validator(s);
    DocNode obj = g.conforming(s, 1);
    if (g.coin(0.6)) g.perturb(obj, s);
    DocNode full = kftest::with_kind(obj);
    bool engine = validate_object(full, v).allowed;
    bool oracle = kftest::oracle_allows(full, v);
    if (engine != oracle) {
      ++disagreements;
      INFO(to_yaml(kftest::with_kind(schema_to_doc(s))) << "\n--\n" << to_yaml(full));
      CHECK(engine == oracle);
    }
    allows += engine;
    ++cases;
  }
  CHECK(disagreements == 0);
  CHECK(allows > 100);
  CHECK(cases - allows > 100);
}

TEST_CASE("property: widening a placeholder never turns allow into deny") {
  kftest::TreeGen g(32);
  for (int i = 0; i < 300; ++i) {
    DocNode obj = g.document(3);
    SchemaNode narrow;
    try {
      narrow = observe(obj);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kShapeConflict);
      continue;
    }
    SchemaNode wide;
    wide.set("body", Placeholder::kDict, true);
    wide.set("kind", SchemaNode::constant(Scalar{"Thing", ScalarKind::kString, false}));
    Validator vn = kftest::single_kind_validator(narrow);
    Validator vw;
    vw.kinds.push_back({"Thing", wide});
    DocNode full = kftest::with_kind(obj);
    bool a = validate_object(full, vn).allowed;
    CHECK(a);
    if (obj.is_mapping() && a) CHECK(validate_object(full, vw).allowed);
  }
}

TEST_CASE("property: deny verdicts are stable") {
  kftest::TreeGen g(33);
  for (int i = 0; i < 200; ++i) {
    SchemaNode s = g.schema(3);
    Validator v = kftest::single_kind_validator(s);
    DocNode obj = g.conforming(s, 1);
    g.perturb(obj, s);
    DocNode full = kftest::with_kind(obj);
    Verdict a = validate_object(full, v);
    Verdict b = validate_object(full, v);
    CHECK(a.allowed == b.allowed);
    CHECK(a.path == b.path);
    CHECK(a.reason == b.reason);
  }
}

TEST_CASE("batch and parallel batch agree") {
  kftest::TreeGen g(34);
  SchemaNode s = g.schema(3);
  Validator v = kftest::single_kind_validator(s);
  std::vector<DocNode> objs;
  for (int i = 0; i < 400; ++i) {
    DocNode o = g.conforming(s, 1);
    if (g.coin()) g.perturb(o, s);
    objs.push_back(kftest::with_kind(o));
  }
  auto a = validate_batch(objs, v);
  auto b = validate_batch_parallel(objs, v);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].allowed == b[i].allowed);
    CHECK(a[i].path == b[i].path);
  }
}

}  // TEST_SUITE

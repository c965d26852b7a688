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

#include <sys/wait.h>

#include <array>
#include <cstdio>

#include "support.hpp"

using namespace kubefence;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(KUBEFENCE_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 2") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("generate").code == 2);
}

TEST_CASE("generate then validate") {
  kftest::TempDir t;
  auto out = t.path() / "v.yaml";
  Run g = run("generate " + q(kftest::chart_dir("mlflow-mini")) + " -o " + q(out));
  REQUIRE(g.code == 0);
  Validator v = load_validator(out);
  std::set<std::string> kinds;
  for (const auto& k : v.kinds) kinds.insert(k.kind);
  CHECK(kinds == std::set<std::string>{"Secret", "Service", "Deployment"});

  Run bad = run("validate " + q(kftest::fixtures() / "golden/malicious-deployment.yaml") +
                " --validator " + q(out));
  CHECK(bad.code == 1);
  CHECK(bad.out.find("runAsNonRoot") != std::string::npos);

  auto rendered = t.path() / "rendered.yaml";
  REQUIRE(run("render " + q(kftest::chart_dir("mlflow-mini")) + " --concrete -o " + q(rendered))
              .code == 0);
  for (const auto& m : split_manifests(kftest::read_file(rendered))) {
    auto one = t.path() / "one.yaml";
    kftest::write_file(one, to_yaml(m));
    CHECK(run("validate " + q(one) + " --validator " + q(out)).code == 0);
  }
}

TEST_CASE("generated validator on stdout equals the library result") {
  Run g = run("generate " + q(kftest::chart_dir("nginx-mini")));
  REQUIRE(g.code == 0);
  Validator cli = parse_validator(g.out);
  const Validator& lib = kftest::generated("nginx-mini").validator;
  REQUIRE(cli.kinds.size() == lib.kinds.size());
  for (std::size_t i = 0; i < lib.kinds.size(); ++i) CHECK(cli.kinds[i].schema == lib.kinds[i].schema);
}

TEST_CASE("catalog prints fifteen entries") {
  Run c = run("catalog");
  CHECK(c.code == 0);
  CHECK(parse_document(c.out).find("entries")->size() == 15);
}

TEST_CASE("analyze and attack-test") {
  kftest::TempDir t;
  auto v = t.path() / "v.yaml";
  REQUIRE(run("generate " + q(kftest::chart_dir("postgres-mini")) + " -o " + q(v)).code == 0);
  Run a = run("analyze --catalog " + q(kftest::fixtures() / "catalog/fields.yaml") +
              " --validator " + q(v) + " --rbac " + q(kftest::fixtures() / "rbac/postgres-mini.yaml"));
  CHECK(a.code == 0);
  CHECK_FALSE(a.out.empty());

  auto m = t.path() / "m.yaml";
  REQUIRE(run("render " + q(kftest::chart_dir("postgres-mini")) + " --concrete -o " + q(m)).code == 0);
  Run at = run("attack-test --validator " + q(v) + " --manifests " + q(m));
  CHECK(at.code == 0);
  CHECK(at.out.find("postgres") != std::string::npos);
}

}  // TEST_SUITE

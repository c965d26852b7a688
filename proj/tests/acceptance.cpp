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

// Acceptance checks: one [PASS]/[FAIL] line per criterion.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "proxy_harness.hpp"

using namespace kubefence;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Outcome golden_schema() {
  auto t0 = Clock::now();
  Chart c = load_chart(kftest::fixtures() / "golden/schema-chart");
  c.locks = default_lock_rules();
  std::string got = to_yaml(parse_document(to_yaml(generate_values_schema(c).tree)));
  std::string want = to_yaml(parse_document(
      kftest::read_file(kftest::fixtures() / "golden/schema-chart.expected.yaml")));
  double s = seconds_since(t0);
  std::ostringstream d;
  d << "byte-equal=" << (got == want) << " runtime=" << s << "s";
  return {got == want && s < 1.0, d.str()};
}

Outcome variant_count() {
  Chart c = load_chart(kftest::fixtures() / "golden/schema-chart");
  auto two = explore_variants(generate_values_schema(c));
  bool ok = two.size() == 2 &&
            resolve(two[0].values, FieldPath::parse("postgreSQL.arch"))->text() == "standalone" &&
            resolve(two[1].values, FieldPath::parse("postgreSQL.arch"))->text() == "repl";

  kftest::TempDir t;
  fs::create_directories(t.path() / "templates");
  kftest::write_file(t.path() / "values.yaml",
                     "a:\n  # a.mode\n  # `x` or `y`\n  mode: x\n"
                     "b:\n  # b.level\n  # `low`, `mid` or `high`\n  level: low\n");
  kftest::write_file(t.path() / "templates/cm.yaml",
                     "apiVersion: v1\nkind: ConfigMap\ndata:\n  mode: {{ .Values.a.mode }}\n");
  auto mixed = explore_variants(generate_values_schema(load_chart(t.path())));
  const std::vector<std::string> a = {"x", "y", "y"};
  const std::vector<std::string> b = {"low", "mid", "high"};
  bool mixed_ok = mixed.size() == 3;
  for (std::size_t i = 0; mixed_ok && i < 3; ++i) {
    mixed_ok = resolve(mixed[i].values, FieldPath::parse("a.mode"))->text() == a[i] &&
               resolve(mixed[i].values, FieldPath::parse("b.level"))->text() == b[i];
  }
  std::ostringstream d;
  d << "single=" << two.size() << " mixed=" << mixed.size();
  return {ok && mixed_ok, d.str()};
}

Outcome merge_enum() {
  std::vector<DocNode> docs = {
      parse_document(kftest::read_file(kftest::fixtures() / "golden/merge/manifest-1.yaml")),
      parse_document(kftest::read_file(kftest::fixtures() / "golden/merge/manifest-2.yaml"))};
  BuildOptions o;
  o.locks = {};
  Validator v = build_validator(docs, o);
  const SchemaNode* el = schema_at(*v.find("Pod"), FieldPath::parse("containers[]"));
  if (el == nullptr) return {false, "no containers element"};
  const SchemaEntry* pull = el->find("imagePullPolicy");
  bool ok = pull != nullptr && pull->node.type() == SchemaNode::Type::kEnum;
  std::vector<std::string> values;
  if (ok) {
    for (const auto& s : pull->node.as_enum().values) values.push_back(s.text);
  }
  ok = ok && values == std::vector<std::string>{"IfNotPresent", "Always"};
  for (const char* k : {"name", "image"}) {
    const SchemaEntry* e = el->find(k);
    ok = ok && e != nullptr && e->node.type() == SchemaNode::Type::kPlaceholder &&
         e->node.placeholder() == Placeholder::kString;
  }
  return {ok, "imagePullPolicy=[" + (values.empty() ? "" : values[0] + ", " + values.back()) + "]"};
}

Outcome soundness() {
  auto t0 = Clock::now();
  std::size_t charts = 0;
  std::size_t total = 0;
  std::size_t allowed = 0;
  bool kinds_ok = true;
  for (const auto& name : kftest::fixture_charts()) {
    Chart c = load_chart(kftest::chart_dir(name));
    auto r = generate_policy(c, BuildOptions{});
    kinds_ok = kinds_ok && r.validator.kinds.size() >= 3;
    ValidateOptions o;
    o.symbolic = true;
    for (const auto& m : r.manifests) {
      ++total;
      allowed += validate_object(m.manifest, r.validator, o).allowed;
    }
    ++charts;
  }
  double s = seconds_since(t0);
  std::ostringstream d;
  d << charts << " charts, " << allowed << "/" << total << " allowed, runtime=" << s << "s";
  return {charts >= 2 && kinds_ok && total > 0 && allowed == total && s < 10.0, d.str()};
}

Outcome attack_matrix() {
  std::vector<AttackWorkload> ws;
  for (const auto& name : kftest::fixture_charts()) {
    ws.push_back({name, kftest::generated(name).validator, kftest::concrete_manifests(name),
                  permissive_rbac()});
  }
  AttackMatrix m = run_catalog(ws);
  bool ok = attack_catalog().size() == 15;
  std::ostringstream d;
  for (const auto& name : kftest::fixture_charts()) {
    auto t = m.tally(name);
    ok = ok && t.exploits_kf == 8 && t.misconfig_kf == 7 && t.exploits_rbac == 0 &&
         t.misconfig_rbac == 0;
    d << name << " KF " << t.exploits_kf << "/" << t.misconfig_kf << " RBAC " << t.exploits_rbac
      << "/" << t.misconfig_rbac << "; ";
  }
  return {ok, d.str()};
}

Outcome surface() {
  struct Row {
    std::size_t count;
    double pct;
  };
  const Row rows[] = {{3747, 76.75}, {4751, 97.32}, {3883, 79.54}, {4826, 98.85},
                      {2906, 59.52}, {4711, 96.50}, {3676, 75.30}, {4708, 96.44},
                      {1012, 20.73}, {4772, 97.75}};
  int matched = 0;
  for (const auto& r : rows) {
    matched += std::fabs(compute_reduction(r.count, 4882).value() - r.pct) <= 0.01;
  }
  kftest::TreeGen g(61);
  int superset = 0;
  const int catalogs = 120;
  for (int i = 0; i < catalogs; ++i) {
    FieldCatalog cat;
    Validator v;
    RbacPolicy rbac;
    for (const char* k : {"Pod", "Service", "Secret", "ConfigMap"}) {
      SchemaNode s;
      for (int j = g.uniform(1, 10); j > 0; --j) {
        std::string key = g.key();
        cat.kinds[k].insert(FieldPath::parse(key));
        if (g.coin()) s.set(key, Placeholder::kString);
      }
      if (g.coin(0.6)) rbac.kinds[k] = {"create"};
      if (g.coin(0.7)) v.kinds.push_back({k, s});
    }
    std::size_t rbac_only = 0;
    std::size_t kf = 0;
    for (const auto& [kind, paths] : cat.kinds) {
      bool allowed = rbac.allows_kind(kind);
      auto white = allowed ? whitelisted_fields(cat, v, kind) : std::set<FieldPath>{};
      for (const auto& p : paths) {
        bool kf_restricted = white.count(p) == 0;
        kf += kf_restricted;
        rbac_only += !allowed && !kf_restricted;
      }
    }
    SurfaceReport r = analyze(cat, v, rbac);
    bool ok = rbac_only == 0 && r.restrictable_kf == kf && r.restrictable_kf >= r.restrictable_rbac;
    superset += ok;
  }
  std::ostringstream d;
  d << matched << "/10 percentages, superset " << superset << "/" << catalogs;
  return {matched == 10 && superset == catalogs, d.str()};
}

Outcome oracle() {
  kftest::TreeGen g(71);
  int cases = 0;
  int disagreements = 0;
  for (; cases < 1200; ++cases) {
    SchemaNode s = g.schema(3);
    Validator v = kftest::single_kind_validator(s);
    DocNode obj = g.conforming(s, 1);
    if (g.coin(0.6)) g.perturb(obj, s);
    DocNode full = kftest::with_kind(obj);
    disagreements += validate_object(full, v).allowed != kftest::oracle_allows(full, v);
  }
  std::ostringstream d;
  d << cases << " pairs, " << disagreements << " disagreements";
  return {disagreements == 0 && cases >= 1000, d.str()};
}

std::string mlflow_deployment_json() {
  for (const auto& m : kftest::concrete_manifests("mlflow-mini")) {
    if (m.find("kind")->text() == "Deployment") return to_json(m);
  }
  return {};
}

Outcome proxy() {
  auto t0 = Clock::now();
  const std::string path = "/apis/apps/v1/namespaces/default/deployments";
  kftest::TempDir dir;
  kftest::MockUpstream up;
  std::ostringstream d;
  bool ok = true;
  std::size_t requests = 0;
  std::string good = mlflow_deployment_json();
  std::string bad = kftest::read_file(kftest::fixtures() / "golden/malicious-deployment.yaml");
  {
    kftest::RunningProxy proxy(dir, up.port());
    httplib::Client cli("127.0.0.1", proxy.port());
    auto r = cli.Post(path, good, "application/json");
    ++requests;
    bool relay = r && r->status == 201 && up.bodies().size() == 1 && up.bodies()[0] == good;
    auto denied = cli.Post(path, bad, "application/yaml");
    ++requests;
    bool deny = denied && denied->status == 403 &&
                denied->body.find("runAsNonRoot") != std::string::npos &&
                denied->body.find("\"Status\"") != std::string::npos;
    d << "relay=" << relay << " deny403=" << deny;
    ok = relay && deny;

    std::atomic<int> wrong{0};
    std::vector<std::thread> threads;
    for (int c = 0; c < 50; ++c) {
      threads.emplace_back([&, c] {
        httplib::Client cc("127.0.0.1", proxy.port());
        for (int i = 0; i < 4; ++i) {
          bool allow = (c + i) % 2 == 0;
          auto res = allow ? cc.Post(path, good, "application/json")
                           : cc.Post(path, bad, "application/yaml");
          if (!res || res->status != (allow ? 201 : 403)) ++wrong;
        }
      });
    }
    for (auto& t : threads) t.join();
    requests += 200;
    ok = ok && wrong == 0;

    std::string body = good;
    body.append(4096 - std::min<std::size_t>(4096, body.size()), ' ');
    auto measure = [&](int port) {
      httplib::Client mc("127.0.0.1", port);
      mc.set_keep_alive(true);
      mc.set_tcp_nodelay(true);
      std::vector<double> ms;
      for (int i = 0; i < 1000; ++i) {
        auto s = Clock::now();
        auto res = mc.Post(path, body, "application/json");
        ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - s).count());
        if (!res || res->status != 201) ++wrong;
      }
      std::sort(ms.begin(), ms.end());
      return ms;
    };
    auto direct = measure(up.port());
    auto proxied = measure(proxy.port());
    requests += 1000;
    double p50 = proxied[500] - direct[500];
    double p99 = proxied[990] - direct[500];
    d << " p50=" << p50 << "ms p99=" << p99 << "ms";
    ok = ok && wrong == 0 && p50 < 5.0 && p99 < 50.0;
  }
  std::istringstream log(kftest::read_file(dir.path() / "audit.jsonl"));
  std::size_t lines = 0;
  bool well_formed = true;
  for (std::string line; std::getline(log, line);) {
    ++lines;
    auto j = nlohmann::json::parse(line, nullptr, false);
    well_formed = well_formed && !j.is_discarded() && j.contains("decision") && j.contains("status");
  }
  double s = seconds_since(t0);
  d << " audit=" << lines << "/" << requests << " runtime=" << s << "s";
  return {ok && well_formed && lines == requests && s < 60.0, d.str()};
}

Outcome differential() {
  if (std::system("python3 -c 'import yaml' >/dev/null 2>&1") != 0) {
    return {false, "python3 with PyYAML unavailable"};
  }
  ExternalRenderer r;
  r.argv = {"python3", std::string(KUBEFENCE_SOURCE_DIR) + "/tools/render_reference.py",
            "{chart_dir}", "{values_file}", "{release_name}"};
  int same = 0;
  int total = 0;
  for (const auto& name : kftest::fixture_charts()) {
    Chart c = load_chart(kftest::chart_dir(name));
    RenderContext ctx;
    ctx.values = c.values;
    ++total;
    same += render_stream(c, ctx) == run_external_renderer(r, c, c.values, ctx.release_name);
  }
  std::ostringstream d;
  d << same << "/" << total << " charts byte-identical";
  return {same == total, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"values schema golden", golden_schema},
      {"variant count", variant_count},
      {"merge produces enum", merge_enum},
      {"soundness closure", soundness},
      {"attack matrix", attack_matrix},
      {"surface arithmetic", surface},
      {"validation oracle equivalence", oracle},
      {"proxy end-to-end", proxy},
      {"template-engine differential", differential},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << n << ". " << name << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

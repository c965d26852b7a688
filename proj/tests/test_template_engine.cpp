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

#include <cstdlib>
#include <functional>

#include "support.hpp"

using namespace kubefence;
namespace fs = std::filesystem;

namespace {

// Renders `text` as the single template of a throwaway chart.
std::string render_text(const std::string& text, const std::string& values_yaml,
                        const std::string& partial = "", bool symbolic = false) {
  Chart chart;
  chart.name = "t";
  chart.values = parse_document(values_yaml);
  if (!partial.empty()) {
    TemplateFile p{"_helpers.tpl", partial, tmpl::parse_template(partial, "_helpers.tpl")};
    for (const auto& n : p.ast.nodes) {
      if (n.kind == tmpl::Node::Kind::kDefine) chart.defines.emplace(n.name, n.body);
    }
  }
  TemplateFile f{"t.yaml", text, tmpl::parse_template(text, "t.yaml")};
  RenderContext ctx;
  ctx.values = chart.values;
  ctx.symbolic = symbolic;
  return render_file(chart, f, ctx);
}

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

const char* kSecret =
    "data:\n"
    "  MLFLOW_TRACKING: x\n"
    "{{- if .Values.backendStore.postgres.Enabled }}\n"
    "  PGUSER: {{ .Values.backendStore.postgres.user }}\n"
    "  PGPASSWORD: {{ .Values.backendStore.postgres.password }}\n"
    "{{- end }}\n";

}  // namespace

TEST_SUITE("template_engine") {

TEST_CASE("parse shapes") {
  auto ast = tmpl::parse_template("{{ .Values.tracking.host }}");
  REQUIRE(ast.nodes.size() == 1);
  CHECK(ast.nodes[0].kind == tmpl::Node::Kind::kExpr);
  CHECK(ast.nodes[0].pipeline.str() == ".Values.tracking.host");

  auto secret = tmpl::parse_template(kSecret);
  bool found_if = false;
  for (const auto& n : secret.nodes) {
    if (n.kind != tmpl::Node::Kind::kIf) continue;
    found_if = true;
    CHECK(n.pipeline.str() == ".Values.backendStore.postgres.Enabled");
    int exprs = 0;
    for (const auto& b : n.body) exprs += b.kind == tmpl::Node::Kind::kExpr;
    CHECK(exprs == 2);
  }
  CHECK(found_if);
}

TEST_CASE("parse errors") {
  CHECK(error_of([] { tmpl::parse_template("{{ weird .x }}"); }) ==
        ErrorCode::kUnsupportedFunction);
  CHECK(error_of([] { tmpl::parse_template("{{ if .x }}a"); }) ==
        ErrorCode::kTemplateSyntaxError);
  CHECK(error_of([] { tmpl::parse_template("{{ end }}"); }) == ErrorCode::kTemplateSyntaxError);
  CHECK(error_of([] { tmpl::parse_template("{{ $x := 1 }}"); }) ==
        ErrorCode::kTemplateSyntaxError);
  CHECK(error_of([] { tmpl::parse_template("{{ with .x }}{{ end }}"); }) ==
        ErrorCode::kUnsupportedFunction);
  CHECK(error_of([] { tmpl::parse_template("{{ .x "); }) == ErrorCode::kTemplateSyntaxError);
}

TEST_CASE("literal text is the identity") {
  std::string text = "apiVersion: v1\nkind: ConfigMap\ndata:\n  a: \"b\"\n";
  CHECK(render_text(text, "{}") == text);
}

TEST_CASE("conditional block with placeholders and without") {
  std::string on = render_text(
      kSecret, "backendStore:\n  postgres:\n    Enabled: true\n    user: string\n    password: string\n");
  CHECK(on == "data:\n  MLFLOW_TRACKING: x\n  PGUSER: string\n  PGPASSWORD: string\n");
  std::string off = render_text(kSecret, "backendStore:\n  postgres:\n    Enabled: false\n");
  CHECK(off == "data:\n  MLFLOW_TRACKING: x\n");
}

TEST_CASE("bool placeholder renders both branches") {
  std::string out = render_text(kSecret,
                                "backendStore:\n  postgres:\n    Enabled: bool\n    user: string\n"
                                "    password: string\n",
                                "", true);
  CHECK(out ==
        "data:\n  MLFLOW_TRACKING: x\n  PGUSER: string\n  PGPASSWORD: string\n\n---\n"
        "data:\n  MLFLOW_TRACKING: x\n");
}

TEST_CASE("range over a list placeholder emits one element") {
  std::string out = render_text("{{- range .Values.s }}\n- name: {{ .name }}\n{{- end }}",
                                "s: [list]\n", "", true);
  CHECK(out == "\n- name: string");
}

TEST_CASE("trim markers") {
  CHECK(render_text("a:   \n  {{- \"x\" }}", "{}") == "a:x");
  CHECK(render_text("{{ \"x\" -}}  \n\n b", "{}") == "xb");
  CHECK(render_text("{{- /* note */ -}}\n  a", "{}") == "a");
}

TEST_CASE("functions") {
  std::string v = "s: Hello\nn: 3\nb: true\nm:\n  k: v\n  j: [1, 2]\nempty: \"\"\n";
  CHECK(render_text("{{ .Values.s | quote }}", v) == "\"Hello\"");
  CHECK(render_text("{{ .Values.s | upper }}|{{ lower .Values.s }}", v) == "HELLO|hello");
  CHECK(render_text("{{ .Values.missing | default \"d\" }}", v) == "d");
  CHECK(render_text("{{ .Values.empty | default \"d\" }}", v) == "d");
  CHECK(render_text("{{ .Values.s | default \"d\" }}", v) == "Hello");
  CHECK(render_text("{{ trunc 3 .Values.s }}", v) == "Hel");
  CHECK(render_text("{{ trunc -2 .Values.s }}", v) == "lo");
  CHECK(render_text("{{ .Values.s | trimSuffix \"lo\" }}", v) == "Hel");
  CHECK(render_text("x:{{ toYaml .Values.m | nindent 2 }}", v) == "x:\n  k: v\n  j: [1, 2]");
  CHECK(render_text("{{ toYaml .Values.m | indent 4 }}", v) == "    k: v\n    j: [1, 2]");
  CHECK(render_text("{{ if eq .Values.s \"Hello\" }}y{{ else }}n{{ end }}", v) == "y");
  CHECK(render_text("{{ if eq .Values.n 3 }}y{{ else }}n{{ end }}", v) == "y");
  CHECK(render_text("{{ if eq .Values.n \"3\" }}y{{ else }}n{{ end }}", v) == "n");
  CHECK(render_text("{{ if not .Values.b }}y{{ else }}n{{ end }}", v) == "n");
  CHECK(render_text("{{ if and .Values.b .Values.empty }}y{{ else }}n{{ end }}", v) == "n");
  CHECK(render_text("{{ if or .Values.empty .Values.b }}y{{ else }}n{{ end }}", v) == "y");
  CHECK(render_text("{{ if .Values.x }}1{{ else if .Values.b }}2{{ else }}3{{ end }}", v) == "2");
  CHECK(render_text("{{ .Values.m }}", v) == "map[j:[1 2] k:v]");
  CHECK(render_text("{{ range .Values.m.j }}[{{ . }}]{{ end }}", v) == "[1][2]");
  CHECK(render_text("{{ range .Values.none }}x{{ else }}none{{ end }}", v) == "none");
  CHECK(render_text("{{ .Release.Name }}/{{ .Release.Service }}/{{ .Chart.Name }}", v) ==
        "release-name/Helm/t");
  CHECK(render_text("{{ include \"h\" . | upper }}", v, "{{ define \"h\" }}{{ .Values.s }}{{ end }}") ==
        "HELLO");
  CHECK(render_text("{{ template \"h\" .Values }}", v, "{{ define \"h\" }}{{ .s }}{{ end }}") ==
        "Hello");
}

TEST_CASE("render errors") {
  CHECK(error_of([] { render_text("{{ .Values.nope }}", "{}"); }) ==
        ErrorCode::kUnresolvedReference);
  CHECK(error_of([] { render_text("{{ template \"nope\" . }}", "{}"); }) ==
        ErrorCode::kTemplateCallUnknown);
}

TEST_CASE("split manifests") {
  auto two = split_manifests("kind: A\napiVersion: v1\n---\nkind: B\napiVersion: v1\n");
  CHECK(two.size() == 2);
  CHECK(split_manifests("").empty());
  CHECK(error_of([] { split_manifests("apiVersion: v1\n"); }) == ErrorCode::kMissingKind);
  CHECK(error_of([] { split_manifests("kind: [\n"); }) == ErrorCode::kParseError);
}

TEST_CASE("mlflow-mini renders Secret, Service and Deployment") {
  auto docs = kftest::concrete_manifests("mlflow-mini");
  std::set<std::string> kinds;
  for (const auto& d : docs) kinds.insert(d.find("kind")->text());
  CHECK(kinds == std::set<std::string>{"Secret", "Service", "Deployment"});
}

TEST_CASE("property: rendering is a pure function") {
  for (const auto& name : kftest::fixture_charts()) {
    Chart c = load_chart(kftest::chart_dir(name));
    RenderContext ctx;
    ctx.values = c.values;
    std::string a = render_stream(c, ctx);
    CHECK(a == render_stream(c, ctx));
    CHECK(a == render_stream(load_chart(kftest::chart_dir(name)), ctx));
  }
}

TEST_CASE("external renderer adapter") {
  Chart c = load_chart(kftest::chart_dir("nginx-mini"));
  ExternalRenderer r;
  r.argv = split_command_line("cat {values_file}");
  std::string out = run_external_renderer(r, c, c.values, "rel");
  CHECK(parse_document(out) == c.values);
  r.argv = split_command_line("sh -c 'exit 3'");
  CHECK(error_of([&] { run_external_renderer(r, c, c.values, "rel"); }) ==
        ErrorCode::kRendererFailed);
  r.argv = split_command_line("sleep 5");
  r.timeout_seconds = 1;
  CHECK(error_of([&] { run_external_renderer(r, c, c.values, "rel"); }) ==
        ErrorCode::kRendererFailed);
  CHECK(split_command_line("a 'b c' \"d\\\"e\" f\\ g") ==
        std::vector<std::string>{"a", "b c", "d\"e", "f g"});
}

TEST_CASE("conformance with the reference renderer on concrete values") {
  if (std::system("python3 -c 'import yaml' >/dev/null 2>&1") != 0) {
    MESSAGE("python3 with PyYAML unavailable");
    return;
  }
  ExternalRenderer r;
  r.argv = {"python3", std::string(KUBEFENCE_SOURCE_DIR) + "/tools/render_reference.py",
            "{chart_dir}", "{values_file}", "{release_name}"};
  for (const auto& name : kftest::fixture_charts()) {
    Chart c = load_chart(kftest::chart_dir(name));
    for (const char* release : {"release-name", "prod"}) {
      RenderContext ctx;
      ctx.values = c.values;
      ctx.release_name = release;
      INFO(name << " " << release);
      CHECK(render_stream(c, ctx) == run_external_renderer(r, c, c.values, release));
    }
  }
}

}  // TEST_SUITE

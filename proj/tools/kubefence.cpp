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

// kubefence: generate, render, validate, serve, analyze, attack-test, catalog.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kubefence/attack.hpp"
#include "kubefence/proxy.hpp"
#include "kubefence/surface.hpp"
#include "kubefence/validation.hpp"

namespace fs = std::filesystem;
using namespace kubefence;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + out);
  f << text;
  if (!f.flush()) throw Error(ErrorCode::kIoError, "cannot write " + out);
}

// Helm-style coalesce: maps merge recursively, everything else replaces.
void coalesce(DocNode& base, const DocNode& over) {
  if (!base.is_mapping() || !over.is_mapping()) {
    base = over;
    return;
  }
  for (const auto& e : over.entries()) {
    DocNode* cur = base.find(e.key);
    if (cur != nullptr && cur->is_mapping() && e.value.is_mapping()) {
      coalesce(*cur, e.value);
    } else {
      base.set(e.key, e.value);
    }
  }
}

std::vector<DocNode> load_manifests(const fs::path& path) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::recursive_directory_iterator(path)) {
      auto ext = e.path().extension().string();
      if (e.is_regular_file() && (ext == ".yaml" || ext == ".yml" || ext == ".json")) {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<DocNode> out;
  for (const auto& f : files) {
    for (auto& d : split_manifests(read_input(f.string()))) out.push_back(std::move(d));
  }
  return out;
}

std::optional<ExternalRenderer> external_renderer(const std::string& command) {
  if (command.empty()) return std::nullopt;
  ExternalRenderer r;
  r.argv = split_command_line(command);
  if (r.argv.empty()) throw Error(ErrorCode::kConfigError, "empty renderer command");
  return r;
}

std::string workload_name(const Validator& v, const std::string& path) {
  return v.chart.empty() ? fs::path(path).stem().string() : v.chart;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KubeFence: workload-specific API policies for Kubernetes", "kubefence"};
  app.require_subcommand(1);
  bool pretty = false;
  app.add_flag("--pretty", pretty, "Human-readable tables on standard error");

  // generate
  auto* gen = app.add_subcommand("generate", "Derive a validator from a chart");
  std::string gen_chart, gen_out, renderer_cmd;
  bool strict_merge = false, serial = false;
  gen->add_option("chart", gen_chart, "Chart directory")->required()->check(CLI::ExistingDirectory);
  gen->add_option("--out,-o", gen_out, "Validator output file (stdout when omitted)");
  gen->add_flag("--strict-merge", strict_merge,
                "Keep constants instead of widening them into a placeholder");
  gen->add_option("--renderer-cmd", renderer_cmd,
                  "External renderer argv ({chart_dir}, {values_file}, {release_name})");
  gen->add_flag("--serial", serial, "Render variants on one thread");

  // render
  auto* ren = app.add_subcommand("render", "Render a chart");
  std::string ren_chart, ren_values, ren_out, release_name = "release-name";
  bool concrete = false;
  ren->add_option("chart", ren_chart, "Chart directory")->required()->check(CLI::ExistingDirectory);
  ren->add_option("--values,-f", ren_values, "Values file merged over the chart defaults")
      ->check(CLI::ExistingFile);
  ren->add_flag("--concrete", concrete,
                "Render the concrete values instead of the explored variants");
  ren->add_option("--release-name", release_name, "Release name for --concrete");
  ren->add_option("--renderer-cmd", renderer_cmd, "External renderer argv");
  ren->add_option("--out,-o", ren_out, "Output file");

  // validate
  auto* val = app.add_subcommand("validate", "Check manifests against a validator");
  std::string val_manifest, val_validator, patch_type, patch_kind;
  bool all_violations = false;
  val->add_option("manifest", val_manifest, "Manifest file, or - for stdin")->required();
  val->add_option("--validator", val_validator, "Validator file")
      ->required()
      ->check(CLI::ExistingFile);
  val->add_flag("--all-violations", all_violations, "Report every violation");
  val->add_option("--patch-type", patch_type, "Treat the input as a patch of this content type");
  val->add_option("--kind", patch_kind, "Kind targeted by --patch-type");

  // serve
  auto* srv = app.add_subcommand("serve", "Run the enforcement proxy");
  std::string config_path;
  if (const char* env = std::getenv("KUBEFENCE_CONFIG")) config_path = env;
  srv->add_option("--config,-c", config_path, "Proxy config (default $KUBEFENCE_CONFIG)");

  // analyze
  auto* ana = app.add_subcommand("analyze", "Attack-surface reduction vs kind-level RBAC");
  std::string catalog_path;
  std::vector<std::string> ana_validators, ana_rbac;
  bool count_value_locks = false;
  ana->add_option("--catalog", catalog_path, "Field catalog")->required()->check(CLI::ExistingFile);
  ana->add_option("--validator", ana_validators, "Validator file (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  ana->add_option("--rbac", ana_rbac, "RBAC file, one or one per validator")
      ->required()
      ->check(CLI::ExistingFile);
  ana->add_flag("--count-value-locks", count_value_locks,
                "Also count value-restricted fields as restricted");

  // attack-test
  auto* att = app.add_subcommand("attack-test", "Replay the malicious specification catalog");
  std::vector<std::string> att_validators, att_manifests, att_rbac;
  att->add_option("--validator", att_validators, "Validator file (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  att->add_option("--manifests", att_manifests, "Manifest file or directory per validator")
      ->required()
      ->check(CLI::ExistingPath);
  att->add_option("--rbac", att_rbac, "RBAC file, one or one per validator")
      ->check(CLI::ExistingFile);
  att->add_flag("--all-violations", all_violations, "Collect every violation");

  // catalog
  auto* cat = app.add_subcommand("catalog", "Print the malicious specification catalog");
  std::string cat_out;
  cat->add_option("--out,-o", cat_out, "Output file");

  if (argc <= 1) {
    std::cerr << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) {
      Chart chart = load_chart(gen_chart);
      BuildOptions build;
      build.strict = strict_merge;
      RenderOptions render;
      render.external = external_renderer(renderer_cmd);
      GenerateResult r = generate_policy(chart, build, render, !serial);
      std::string text = serialize_validator(r.validator);
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        write_output(gen_out, text);
        nlohmann::ordered_json j;
        j["validator"] = gen_out;
        j["chart"] = r.validator.chart;
        j["variants"] = r.variants.size();
        j["manifests"] = r.manifests.size();
        auto kinds = nlohmann::ordered_json::array();
        for (const auto& k : r.validator.kinds) kinds.push_back(k.kind);
        j["kinds"] = kinds;
        std::cout << j.dump() << "\n";
      }
      if (pretty) {
        std::cerr << "chart " << chart.name << ": " << r.variants.size() << " variant(s), "
                  << r.manifests.size() << " manifest(s), " << r.validator.kinds.size()
                  << " kind(s)\n";
      }
      return kExitOk;
    }

    if (*ren) {
      Chart chart = load_chart(ren_chart);
      std::string text;
      if (concrete) {
        DocNode values = chart.values;
        if (!ren_values.empty()) coalesce(values, parse_document(read_input(ren_values)));
        if (auto ext = external_renderer(renderer_cmd)) {
          text = run_external_renderer(*ext, chart, values, release_name);
        } else {
          RenderContext ctx;
          ctx.values = std::move(values);
          ctx.release_name = release_name;
          text = render_stream(chart, ctx);
        }
      } else {
        RenderOptions render;
        render.external = external_renderer(renderer_cmd);
        ValuesSchema schema = generate_values_schema(chart);
        auto manifests = render_variants(chart, explore_variants(schema), render);
        std::ostringstream out;
        for (const auto& m : manifests) {
          out << "---\n# variant: " << m.variant << "\n" << to_yaml(m.manifest) << "\n";
        }
        text = out.str();
      }
      write_output(ren_out, text);
      return kExitOk;
    }

    if (*val) {
      Validator validator = load_validator(val_validator);
      ValidateOptions opts;
      opts.all_violations = all_violations;
      std::string input = read_input(val_manifest);
      std::vector<Verdict> verdicts;
      if (!patch_type.empty()) {
        if (patch_kind.empty()) {
          std::cerr << "kubefence: --patch-type requires --kind\n";
          return kExitUsage;
        }
        PatchType t = patch_type_from_content_type(patch_type);
        DocFormat fmt = DocFormat::kYaml;
        verdicts.push_back(
            validate_patch(parse_document(input, fmt), t, patch_kind, validator, opts));
      } else {
        for (const auto& doc : parse_stream(input)) {
          verdicts.push_back(validate_object(doc, validator, opts));
        }
        if (verdicts.empty()) throw Error(ErrorCode::kParseError, "no documents in input");
      }
      bool all_ok = true;
      for (const auto& v : verdicts) {
        std::cout << v.to_json() << "\n";
        all_ok = all_ok && v.allowed;
        if (pretty) {
          std::cerr << (v.allowed ? "ALLOW " : "DENY  ") << v.kind;
          if (!v.allowed) {
            std::cerr << "  " << violation_reason_name(v.reason) << " at " << v.path.str()
                      << ": " << v.message;
          }
          std::cerr << "\n";
        }
      }
      return all_ok ? kExitOk : kExitFail;
    }

    if (*srv) {
      if (config_path.empty()) {
        std::cerr << "kubefence: serve needs --config or KUBEFENCE_CONFIG\n";
        return kExitUsage;
      }
      return run_proxy(load_proxy_config(config_path));
    }

    if (*ana) {
      if (ana_rbac.size() != 1 && ana_rbac.size() != ana_validators.size()) {
        std::cerr << "kubefence: give one --rbac or one per --validator\n";
        return kExitUsage;
      }
      FieldCatalog catalog = load_catalog(catalog_path);
      AnalyzeOptions opts;
      opts.count_value_locks = count_value_locks;
      std::vector<SurfaceReport> reports;
      for (std::size_t i = 0; i < ana_validators.size(); ++i) {
        Validator v = load_validator(ana_validators[i]);
        RbacPolicy rbac = load_rbac(ana_rbac.size() == 1 ? ana_rbac[0] : ana_rbac[i]);
        reports.push_back(analyze(catalog, v, rbac, opts, workload_name(v, ana_validators[i])));
      }
      std::cout << surface_json(reports) << "\n";
      if (pretty) std::cerr << format_surface_table(reports, count_value_locks);
      return kExitOk;
    }

    if (*att) {
      if (att_manifests.size() != att_validators.size()) {
        std::cerr << "kubefence: give one --manifests per --validator\n";
        return kExitUsage;
      }
      if (!att_rbac.empty() && att_rbac.size() != 1 && att_rbac.size() != att_validators.size()) {
        std::cerr << "kubefence: give one --rbac or one per --validator\n";
        return kExitUsage;
      }
      std::vector<AttackWorkload> workloads;
      for (std::size_t i = 0; i < att_validators.size(); ++i) {
        AttackWorkload w;
        w.validator = load_validator(att_validators[i]);
        w.name = workload_name(w.validator, att_validators[i]);
        w.manifests = load_manifests(att_manifests[i]);
        w.rbac = att_rbac.empty()       ? permissive_rbac()
                 : att_rbac.size() == 1 ? load_rbac(att_rbac[0])
                                        : load_rbac(att_rbac[i]);
        workloads.push_back(std::move(w));
      }
      ValidateOptions opts;
      opts.all_violations = all_violations;
      AttackMatrix m = run_catalog(workloads, opts);
      std::cout << m.to_json() << "\n";
      if (pretty) std::cerr << m.detail_table() << "\n" << m.table();
      return kExitOk;
    }

    if (*cat) {
      write_output(cat_out, catalog_yaml());
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "kubefence: " << e.what() << "\n";
    return kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "kubefence: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}

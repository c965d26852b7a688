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

#pragma once

#include <string>
#include <vector>

#include "kubefence/chart.hpp"

namespace kubefence {

struct RenderContext {
  DocNode values;
  std::string release_name = "release-name";
  std::string release_service = "Helm";
  // Overrides chart.name for `.Chart.Name` when non-empty.
  std::string chart_name;
  // Treat placeholder tokens in values as types: field access yields
  // `string`, `bool` conditions branch, ranges emit one synthetic element.
  bool symbolic = false;
};

struct RenderedFile {
  std::string path;  // relative to templates/
  std::string text;
};

/// Renders every non-partial template. Throws kUnresolvedReference,
/// kTemplateCallUnknown or kTemplateSyntaxError.
std::vector<RenderedFile> render(const Chart& chart, const RenderContext& ctx);

/// One template file. When a `bool` placeholder is consulted the file is
/// rendered with every such condition true, then false, joined by `---`.
std::string render_file(const Chart& chart, const TemplateFile& file,
                        const RenderContext& ctx);

/// Helm-style stream: `---\n# Source: <chart>/templates/<file>\n<doc>\n` per
/// non-empty document, in install order.
std::string render_stream(const Chart& chart, const RenderContext& ctx);
std::string format_stream(const std::string& chart_name,
                          const std::vector<RenderedFile>& files);

/// One DocNode per non-empty document; each needs `kind` and `apiVersion`.
/// Throws kMissingKind (detail holds the document index) or kParseError.
std::vector<DocNode> split_manifests(std::string_view text);

struct ExternalRenderer {
  // argv with `{chart_dir}`, `{values_file}` and `{release_name}` substituted.
  std::vector<std::string> argv;
  int timeout_seconds = 60;
};

/// Splits a command line on whitespace, honouring single and double quotes.
std::vector<std::string> split_command_line(std::string_view command);

/// Runs the external renderer with `values` written to a temporary file and
/// returns its standard output. Throws kRendererFailed.
std::string run_external_renderer(const ExternalRenderer& renderer,
                                  const Chart& chart, const DocNode& values,
                                  const std::string& release_name);

}  // namespace kubefence

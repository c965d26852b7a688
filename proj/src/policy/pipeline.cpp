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

#include <omp.h>

#include <exception>

#include "kubefence/policy.hpp"

namespace kubefence {

namespace {

std::vector<RenderedManifest> render_one(const Chart& chart,
                                         const ValuesVariant& variant,
                                         const RenderOptions& options) {
  std::string text;
  if (options.external) {
    text = run_external_renderer(*options.external, chart, variant.values,
                                 options.release_name);
  } else {
    RenderContext ctx;
    ctx.values = variant.values;
    ctx.release_name = options.release_name;
    ctx.symbolic = true;
    text = render_stream(chart, ctx);
  }
  std::vector<RenderedManifest> out;
  for (auto& doc : split_manifests(text)) {
    out.push_back(RenderedManifest{variant.index, std::move(doc)});
  }
  return out;
}

}  // namespace

std::vector<RenderedManifest> render_variants(const Chart& chart,
                                              const std::vector<ValuesVariant>& variants,
                                              const RenderOptions& options) {
  std::vector<RenderedManifest> out;
  for (const auto& v : variants) {
    for (auto& m : render_one(chart, v, options)) out.push_back(std::move(m));
  }
  return out;
}

std::vector<RenderedManifest> render_variants_parallel(
    const Chart& chart, const std::vector<ValuesVariant>& variants,
    const RenderOptions& options) {
  std::vector<std::vector<RenderedManifest>> parts(variants.size());
  std::vector<std::exception_ptr> errors(variants.size());
  const auto n = static_cast<long>(variants.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      parts[i] = render_one(chart, variants[i], options);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<RenderedManifest> out;
  for (auto& p : parts) {
    for (auto& m : p) out.push_back(std::move(m));
  }
  return out;
}

GenerateResult generate_policy(const Chart& chart, const BuildOptions& build,
                               const RenderOptions& render, bool parallel) {
  GenerateResult r;
  r.values_schema = generate_values_schema(chart);
  r.variants = explore_variants(r.values_schema);
  r.manifests = parallel ? render_variants_parallel(chart, r.variants, render)
                         : render_variants(chart, r.variants, render);
  std::vector<DocNode> docs;
  docs.reserve(r.manifests.size());
  for (const auto& m : r.manifests) docs.push_back(m.manifest);
  BuildOptions opts = build;
  opts.locks = chart.locks;
  if (opts.chart.empty()) opts.chart = chart.name;
  r.validator = build_validator(docs, opts);
  return r;
}

}  // namespace kubefence

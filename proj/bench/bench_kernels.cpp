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

// Serial vs OpenMP kernels on the fixture charts.

#include <benchmark/benchmark.h>

#include <filesystem>

#include "kubefence/chart.hpp"
#include "kubefence/policy.hpp"
#include "kubefence/validation.hpp"

namespace {

using namespace kubefence;

struct Workload {
  Chart chart;
  std::vector<ValuesVariant> variants;
  Validator validator;
  std::vector<DocNode> objects;
};

const Workload& workload() {
  static const Workload w = [] {
    Workload w;
    w.chart = load_chart(std::filesystem::path(KUBEFENCE_FIXTURES) / "charts/mlflow-mini");
    w.variants = explore_variants(generate_values_schema(w.chart));
    GenerateResult r = generate_policy(w.chart, BuildOptions{});
    w.validator = r.validator;
    while (w.objects.size() < 4096) {
      for (const auto& m : r.manifests) w.objects.push_back(m.manifest);
    }
    return w;
  }();
  return w;
}

ValidateOptions symbolic() {
  ValidateOptions o;
  o.symbolic = true;
  return o;
}

void BM_ValidateSerial(benchmark::State& state) {
  const auto& w = workload();
  for (auto _ : state) benchmark::DoNotOptimize(validate_batch(w.objects, w.validator, symbolic()));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.objects.size()));
}

void BM_ValidateParallel(benchmark::State& state) {
  const auto& w = workload();
  for (auto _ : state) {
    benchmark::DoNotOptimize(validate_batch_parallel(w.objects, w.validator, symbolic()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.objects.size()));
}

void BM_RenderSerial(benchmark::State& state) {
  const auto& w = workload();
  for (auto _ : state) benchmark::DoNotOptimize(render_variants(w.chart, w.variants));
}

void BM_RenderParallel(benchmark::State& state) {
  const auto& w = workload();
  for (auto _ : state) benchmark::DoNotOptimize(render_variants_parallel(w.chart, w.variants));
}

}  // namespace

BENCHMARK(BM_ValidateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ValidateParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RenderParallel)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

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

// Shared helpers for the unit, property and acceptance tests.

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "kubefence/attack.hpp"
#include "kubefence/policy.hpp"
#include "kubefence/surface.hpp"
#include "kubefence/validation.hpp"

namespace kftest {

using namespace kubefence;

std::filesystem::path fixtures();
std::filesystem::path chart_dir(const std::string& name);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Fresh directory under the system temp dir, removed by the destructor.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

const std::vector<std::string>& fixture_charts();

/// Full pipeline with default options; cached per chart.
const GenerateResult& generated(const std::string& chart);

/// Concrete render of the chart defaults, split into manifests.
std::vector<DocNode> concrete_manifests(const std::string& chart);

// ---- random trees

struct TreeGen {
  explicit TreeGen(std::uint64_t seed) : rng(seed) {}
  std::mt19937_64 rng;

  int uniform(int lo, int hi);
  bool coin(double p = 0.5);

  std::string key();
  DocNode scalar();
  DocNode document(int depth);
  SchemaNode schema(int depth);
  /// An object built to fit `schema`, possibly perturbed.
  DocNode conforming(const SchemaNode& schema, int depth);
  void perturb(DocNode& node, const SchemaNode& schema);
};

/// Wraps a random schema into a single-kind validator rooted at `kind: Thing`.
Validator single_kind_validator(SchemaNode schema);
DocNode with_kind(DocNode object);

/// Independent allow/deny oracle: flattens the object into positions and
/// checks each one against the schema reached by the same path.
bool oracle_allows(const DocNode& object, const Validator& validator);

/// Exact string equality of every key and scalar; order-sensitive.
bool same_tree(const DocNode& a, const DocNode& b);

}  // namespace kftest

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

#include "kubefence/policy.hpp"

namespace kubefence {

struct Verdict {
  bool allowed = true;
  std::string kind;
  // Deny only: first violation.
  FieldPath path;
  ViolationReason reason = ViolationReason::kUnknownField;
  std::string message;
  // Every violation, when collected.
  std::vector<Violation> violations;

  static Verdict allow(std::string kind = {});
  static Verdict deny(std::string kind, Violation v);

  std::string to_json() const;
};

struct ValidateOptions {
  bool all_violations = false;
  // Placeholder tokens in the object stand for their type.
  bool symbolic = false;
};

Verdict validate_object(const DocNode& object, const Validator& validator,
                        const ValidateOptions& options = {});

enum class PatchType { kMerge, kStrategicMerge, kJsonPatch };

/// Maps a Content-Type header to a patch type; throws kUnsupportedPatchType.
PatchType patch_type_from_content_type(std::string_view content_type);

Verdict validate_patch(const DocNode& patch, PatchType type, std::string_view kind,
                       const Validator& validator,
                       const ValidateOptions& options = {});

/// Serial reference for the batch kernel.
std::vector<Verdict> validate_batch(const std::vector<DocNode>& objects,
                                    const Validator& validator,
                                    const ValidateOptions& options = {});

/// OpenMP version; element i equals validate_batch(...)[i].
std::vector<Verdict> validate_batch_parallel(const std::vector<DocNode>& objects,
                                             const Validator& validator,
                                             const ValidateOptions& options = {});

}  // namespace kubefence

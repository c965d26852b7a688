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

#include <stdexcept>
#include <string>
#include <string_view>

namespace kubefence {

struct Position {
  int line = 0;    // 1-based; 0 when unknown
  int column = 0;  // 1-based; 0 when unknown

  bool known() const { return line > 0; }
  friend bool operator==(const Position&, const Position&) = default;
};

enum class ErrorCode {
  kSyntaxError,
  kMultipleDocuments,
  kUnsupportedYaml,
  kMissingValues,
  kMissingTemplates,
  kParseError,
  kDuplicateDefine,
  kAnnotationPathUnresolved,
  kTemplateSyntaxError,
  kUnsupportedFunction,
  kUnresolvedReference,
  kTemplateCallUnknown,
  kMissingKind,
  kLockConflict,
  kShapeConflict,
  kInvalidSchema,
  kUnsupportedPatchType,
  kZeroTotal,
  kUnknownKindInValidator,
  kInapplicableKind,
  kRendererFailed,
  kConfigError,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

/// All recoverable failures in the library are reported through this type.
/// The code is stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, Position position = {})
      : std::runtime_error(format(code, message, position)),
        code_(code),
        detail_(message),
        position_(position) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }
  Position position() const { return position_; }

 private:
  static std::string format(ErrorCode code, const std::string& message,
                            Position position);

  ErrorCode code_;
  std::string detail_;
  Position position_;
};

}  // namespace kubefence

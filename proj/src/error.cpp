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

#include "kubefence/error.hpp"

namespace kubefence {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kMultipleDocuments: return "MultipleDocuments";
    case ErrorCode::kUnsupportedYaml: return "UnsupportedYaml";
    case ErrorCode::kMissingValues: return "MissingValues";
    case ErrorCode::kMissingTemplates: return "MissingTemplates";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicateDefine: return "DuplicateDefine";
    case ErrorCode::kAnnotationPathUnresolved: return "AnnotationPathUnresolved";
    case ErrorCode::kTemplateSyntaxError: return "TemplateSyntaxError";
    case ErrorCode::kUnsupportedFunction: return "UnsupportedFunction";
    case ErrorCode::kUnresolvedReference: return "UnresolvedReference";
    case ErrorCode::kTemplateCallUnknown: return "TemplateCallUnknown";
    case ErrorCode::kMissingKind: return "MissingKind";
    case ErrorCode::kLockConflict: return "LockConflict";
    case ErrorCode::kShapeConflict: return "ShapeConflict";
    case ErrorCode::kInvalidSchema: return "InvalidSchema";
    case ErrorCode::kUnsupportedPatchType: return "UnsupportedPatchType";
    case ErrorCode::kZeroTotal: return "ZeroTotal";
    case ErrorCode::kUnknownKindInValidator: return "UnknownKindInValidator";
    case ErrorCode::kInapplicableKind: return "InapplicableKind";
    case ErrorCode::kRendererFailed: return "RendererFailed";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

std::string Error::format(ErrorCode code, const std::string& message,
                          Position position) {
  std::string out(error_code_name(code));
  if (position.known()) {
    out += " at " + std::to_string(position.line) + ":" +
           std::to_string(position.column);
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace kubefence

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

// Syntax tree for the supported subset of the Helm (Go text/template)
// dialect: literal text, `{{ pipeline }}`, if/else-if/else, range, define,
// template/include, with `{{-`/`-}}` whitespace trimming applied at parse
// time.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kubefence/yaml_model.hpp"

namespace kubefence::tmpl {

struct Pipeline;

struct Operand {
  enum class Kind { kField, kString, kNumber, kBool, kPipeline };
  Kind kind = Kind::kField;
  // kField: `.a.b` (from_root=false) or `$.a.b` (from_root=true).
  bool from_root = false;
  std::vector<std::string> fields;
  // kString / kNumber / kBool literal text.
  std::string literal;
  // kPipeline: parenthesized sub-pipeline.
  Box<Pipeline> pipeline;
  Position position;

  std::string str() const;
};

struct Command {
  std::string function;  // empty: the command is a single operand
  std::vector<Operand> args;
  Position position;
};

struct Pipeline {
  std::vector<Command> commands;
  Position position;

  std::string str() const;
};

struct Node;
using NodeList = std::vector<Node>;

struct Node {
  enum class Kind { kText, kExpr, kIf, kRange, kTemplateCall, kDefine };
  Kind kind = Kind::kText;
  std::string text;    // kText
  Pipeline pipeline;   // kExpr / kIf condition / kRange collection /
                       // kTemplateCall context (may be empty)
  std::string name;    // kTemplateCall / kDefine
  NodeList body;       // then-body, range body, define body
  NodeList else_body;  // else (an else-if is a single nested kIf)
  Position position;
};

struct TemplateAst {
  NodeList nodes;
};

/// Functions callable in pipelines and conditions.
bool is_supported_function(std::string_view name);

/// Throws kTemplateSyntaxError or kUnsupportedFunction.
TemplateAst parse_template(std::string_view text, std::string_view file = "");

}  // namespace kubefence::tmpl

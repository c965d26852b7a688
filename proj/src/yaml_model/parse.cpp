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

#include <algorithm>
#include <optional>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/eventhandler.h>
#include <yaml-cpp/yaml.h>

#include "kubefence/yaml_model.hpp"

namespace kubefence {

namespace {

Position to_position(const YAML::Mark& mark) {
  if (mark.line < 0) return {};
  return Position{mark.line + 1, mark.column + 1};
}

// Builds DocNodes straight from parser events so that positions, quoting and
// anchors are visible (the yaml-cpp node API hides all three).
class TreeBuilder : public YAML::EventHandler {
 public:
  explicit TreeBuilder(const ParseOptions& options) : options_(options) {}

  void OnDocumentStart(const YAML::Mark&) override {}
  void OnDocumentEnd() override {}

  void OnNull(const YAML::Mark& mark, YAML::anchor_t anchor) override {
    check_anchor(mark, anchor);
    DocNode node;
    node.position = to_position(mark);
    add(std::move(node), mark);
  }

  void OnAlias(const YAML::Mark& mark, YAML::anchor_t) override {
    throw Error(ErrorCode::kUnsupportedYaml, "aliases are not supported",
                to_position(mark));
  }

  void OnAnchor(const YAML::Mark& mark, const std::string& name) override {
    throw Error(ErrorCode::kUnsupportedYaml,
                "anchors are not supported (&" + name + ")",
                to_position(mark));
  }

  void OnScalar(const YAML::Mark& mark, const std::string& tag,
                YAML::anchor_t anchor, const std::string& value) override {
    check_anchor(mark, anchor);
    std::string kept_tag = check_tag(mark, tag);
    Scalar scalar;
    scalar.text = value;
    if (tag == "!") {
      scalar.kind = ScalarKind::kString;
      scalar.quoted = true;
    } else {
      scalar.kind = infer_scalar_kind(value);
    }
    DocNode node = DocNode::scalar(std::move(scalar));
    node.position = to_position(mark);
    node.tag = std::move(kept_tag);
    add(std::move(node), mark);
  }

  void OnSequenceStart(const YAML::Mark& mark, const std::string& tag,
                       YAML::anchor_t anchor,
                       YAML::EmitterStyle::value style) override {
    check_anchor(mark, anchor);
    std::string kept_tag = check_tag(mark, tag);
    check_not_key(mark);
    DocNode node = DocNode::sequence({}, style == YAML::EmitterStyle::Flow);
    node.position = to_position(mark);
    node.tag = std::move(kept_tag);
    stack_.push_back(Frame{std::move(node), std::nullopt});
  }

  void OnSequenceEnd() override { pop(); }

  void OnMapStart(const YAML::Mark& mark, const std::string& tag,
                  YAML::anchor_t anchor,
                  YAML::EmitterStyle::value style) override {
    check_anchor(mark, anchor);
    std::string kept_tag = check_tag(mark, tag);
    check_not_key(mark);
    DocNode node = DocNode::mapping({}, style == YAML::EmitterStyle::Flow);
    node.position = to_position(mark);
    node.tag = std::move(kept_tag);
    stack_.push_back(Frame{std::move(node), std::nullopt});
  }

  void OnMapEnd() override { pop(); }

  std::optional<DocNode> take() {
    auto out = std::move(root_);
    root_.reset();
    return out;
  }

 private:
  struct Frame {
    DocNode node;
    std::optional<std::string> pending_key;
  };

  void check_anchor(const YAML::Mark& mark, YAML::anchor_t anchor) {
    if (anchor != YAML::NullAnchor) {
      throw Error(ErrorCode::kUnsupportedYaml, "anchors are not supported",
                  to_position(mark));
    }
  }

  std::string check_tag(const YAML::Mark& mark, const std::string& tag) {
    if (tag.empty() || tag == "?" || tag == "!") return {};
    if (std::find(options_.allowed_tags.begin(), options_.allowed_tags.end(),
                  tag) != options_.allowed_tags.end()) {
      return tag;
    }
    throw Error(ErrorCode::kUnsupportedYaml, "unsupported tag '" + tag + "'",
                to_position(mark));
  }

  void check_not_key(const YAML::Mark& mark) {
    if (!stack_.empty() && stack_.back().node.is_mapping() &&
        !stack_.back().pending_key) {
      throw Error(ErrorCode::kUnsupportedYaml,
                  "only scalar mapping keys are supported", to_position(mark));
    }
  }

  void pop() {
    Frame frame = std::move(stack_.back());
    stack_.pop_back();
    add(std::move(frame.node), YAML::Mark::null_mark());
  }

  void add(DocNode node, const YAML::Mark& mark) {
    if (stack_.empty()) {
      root_ = std::move(node);
      return;
    }
    Frame& top = stack_.back();
    if (top.node.is_sequence()) {
      top.node.items().push_back(std::move(node));
      return;
    }
    if (!top.pending_key) {
      top.pending_key = node.is_null() ? std::string("null") : node.text();
      return;
    }
    if (top.node.find(*top.pending_key) != nullptr) {
      throw Error(ErrorCode::kSyntaxError,
                  "duplicate mapping key '" + *top.pending_key + "'",
                  to_position(mark).known() ? to_position(mark)
                                            : node.position);
    }
    top.node.entries().push_back(
        MappingEntry{std::move(*top.pending_key), std::move(node)});
    top.pending_key.reset();
  }

  const ParseOptions& options_;
  std::vector<Frame> stack_;
  std::optional<DocNode> root_;
};

Position offset_to_position(std::string_view text, std::size_t offset) {
  Position pos{1, 1};
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

// JSON goes through nlohmann's SAX interface: strict syntax, duplicate-key
// detection, and the original spelling of floats.
class JsonBuilder : public nlohmann::json_sax<nlohmann::json> {
 public:
  explicit JsonBuilder(std::string_view text) : text_(text) {}

  bool null() override { return add(DocNode::null()); }
  bool boolean(bool value) override { return add(DocNode::boolean(value)); }
  bool number_integer(number_integer_t value) override {
    return add(DocNode::integer(value));
  }
  bool number_unsigned(number_unsigned_t value) override {
    return add(DocNode::scalar(
        Scalar{std::to_string(value), ScalarKind::kInteger, false}));
  }
  bool number_float(number_float_t, const string_t& text) override {
    return add(DocNode::scalar(Scalar{text, ScalarKind::kFloat, false}));
  }
  bool string(string_t& value) override {
    return add(DocNode::string(value));
  }
  bool binary(binary_t&) override { return false; }
  bool start_object(std::size_t) override {
    stack_.push_back(Frame{DocNode::mapping(), std::nullopt});
    return true;
  }
  bool key(string_t& key) override {
    Frame& top = stack_.back();
    if (top.node.find(key) != nullptr) {
      throw Error(ErrorCode::kSyntaxError, "duplicate object key '" + key + "'");
    }
    top.pending_key = key;
    return true;
  }
  bool end_object() override { return pop(); }
  bool start_array(std::size_t) override {
    stack_.push_back(Frame{DocNode::sequence(), std::nullopt});
    return true;
  }
  bool end_array() override { return pop(); }
  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    std::string what = ex.what();
    throw Error(ErrorCode::kSyntaxError, what,
                offset_to_position(text_, position > 0 ? position - 1 : 0));
  }

  DocNode take() { return std::move(root_); }

 private:
  struct Frame {
    DocNode node;
    std::optional<std::string> pending_key;
  };

  bool pop() {
    DocNode node = std::move(stack_.back().node);
    stack_.pop_back();
    return add(std::move(node));
  }

  bool add(DocNode node) {
    if (stack_.empty()) {
      root_ = std::move(node);
      return true;
    }
    Frame& top = stack_.back();
    if (top.node.is_sequence()) {
      top.node.items().push_back(std::move(node));
    } else {
      top.node.entries().push_back(
          MappingEntry{std::move(*top.pending_key), std::move(node)});
      top.pending_key.reset();
    }
    return true;
  }

  std::string_view text_;
  std::vector<Frame> stack_;
  DocNode root_;
};

DocNode parse_json(std::string_view text) {
  JsonBuilder builder(text);
  nlohmann::json::sax_parse(text.begin(), text.end(), &builder);
  return builder.take();
}

template <typename Fn>
void with_yaml_errors(Fn&& fn) {
  try {
    fn();
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kSyntaxError, e.msg, to_position(e.mark));
  }
}

}  // namespace

DocNode parse_document(std::string_view text, DocFormat format) {
  ParseOptions options;
  options.format = format;
  return parse_document(text, options);
}

DocNode parse_document(std::string_view text, const ParseOptions& options) {
  if (options.format == DocFormat::kJson) return parse_json(text);

  DocNode result;
  with_yaml_errors([&] {
    std::istringstream in{std::string(text)};
    YAML::Parser parser(in);
    TreeBuilder builder(options);
    if (!parser.HandleNextDocument(builder)) return;
    result = builder.take().value_or(DocNode{});
    while (parser.HandleNextDocument(builder)) {
      auto extra = builder.take();
      if (extra && !extra->is_null()) {
        throw Error(ErrorCode::kMultipleDocuments,
                    "input holds more than one YAML document",
                    extra->position);
      }
    }
  });
  return result;
}

std::vector<DocNode> parse_stream(std::string_view text,
                                  const ParseOptions& options) {
  std::vector<DocNode> docs;
  if (options.format == DocFormat::kJson) {
    docs.push_back(parse_json(text));
    return docs;
  }
  with_yaml_errors([&] {
    std::istringstream in{std::string(text)};
    YAML::Parser parser(in);
    TreeBuilder builder(options);
    while (parser.HandleNextDocument(builder)) {
      auto doc = builder.take();
      if (doc && !doc->is_null()) docs.push_back(std::move(*doc));
    }
  });
  return docs;
}

}  // namespace kubefence

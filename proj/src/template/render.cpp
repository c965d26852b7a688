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
#include <cstdio>

#include "kubefence/template_engine.hpp"

namespace kubefence {

namespace {

using tmpl::Command;
using tmpl::Node;
using tmpl::NodeList;
using tmpl::Operand;
using tmpl::Pipeline;

// nullopt stands for Go's missing value (nil from a failed map lookup).
using Value = std::optional<DocNode>;

constexpr int kMaxTemplateDepth = 64;

enum class BoolBranch { kTrue, kFalse };

struct Scope {
  const DocNode* root;
  const DocNode* dot;
};

std::string go_quote(std::string_view s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\a': out += "\\a"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\v': out += "\\v"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\x%02x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

std::string print_node(const DocNode& node);

std::string print_scalar(const Scalar& s) {
  switch (s.kind) {
    case ScalarKind::kNull: return "";
    case ScalarKind::kBoolean:
    case ScalarKind::kInteger: return canonical_scalar(s);
    default: return s.text;
  }
}

// Go's %v rendering of collections: `[a b]` and `map[k:v]` (sorted keys).
std::string print_node(const DocNode& node) {
  if (node.is_scalar()) return print_scalar(node.as_scalar());
  if (node.is_sequence()) {
    std::string out = "[";
    for (std::size_t i = 0; i < node.items().size(); ++i) {
      if (i > 0) out += ' ';
      out += node.items()[i].is_null() ? "<nil>" : print_node(node.items()[i]);
    }
    return out + "]";
  }
  std::vector<const MappingEntry*> entries;
  for (const auto& e : node.entries()) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(),
            [](auto* a, auto* b) { return a->key < b->key; });
  std::string out = "map[";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) out += ' ';
    out += entries[i]->key + ":" +
           (entries[i]->value.is_null() ? "<nil>" : print_node(entries[i]->value));
  }
  return out + "]";
}

bool is_empty(const Value& v) {
  if (!v) return true;
  const DocNode& n = *v;
  if (n.is_sequence()) return n.items().empty();
  if (n.is_mapping()) return n.entries().empty();
  const Scalar& s = n.as_scalar();
  switch (s.kind) {
    case ScalarKind::kNull: return true;
    case ScalarKind::kBoolean: return canonical_scalar(s) == "false";
    case ScalarKind::kInteger: return canonical_scalar(s) == "0";
    case ScalarKind::kFloat: {
      try {
        return std::stod(s.text) == 0.0;
      } catch (...) {
        return false;
      }
    }
    case ScalarKind::kString: return s.text.empty();
  }
  return false;
}

std::string indent_text(std::string_view text, long width) {
  std::string pad(static_cast<std::size_t>(std::max(0L, width)), ' ');
  std::string out = pad;
  for (char c : text) {
    out += c;
    if (c == '\n') out += pad;
  }
  return out;
}

class Renderer {
 public:
  Renderer(const Chart& chart, const RenderContext& ctx, std::string file,
           BoolBranch branch)
      : chart_(chart), ctx_(ctx), file_(std::move(file)), branch_(branch) {}

  bool consulted_bool() const { return consulted_; }

  std::string run(const NodeList& nodes, const DocNode& root) {
    std::string out;
    Scope scope{&root, &root};
    exec(nodes, scope, out);
    return out;
  }

 private:
  [[noreturn]] void unresolved(const std::string& what, Position pos) const {
    throw Error(ErrorCode::kUnresolvedReference, what + " in " + file_, pos);
  }

  std::optional<Placeholder> symbol(const DocNode& n) const {
    if (!ctx_.symbolic) return std::nullopt;
    return placeholder_of(n);
  }

  bool truthy(const Value& v) {
    if (v) {
      if (auto p = symbol(*v)) {
        if (*p == Placeholder::kBool) {
          consulted_ = true;
          return branch_ == BoolBranch::kTrue;
        }
        return true;
      }
    }
    return !is_empty(v);
  }

  void exec(const NodeList& nodes, const Scope& scope, std::string& out) {
    for (const auto& node : nodes) exec(node, scope, out);
  }

  void exec(const Node& node, const Scope& scope, std::string& out) {
    switch (node.kind) {
      case Node::Kind::kText:
        out += node.text;
        return;
      case Node::Kind::kDefine:
        return;
      case Node::Kind::kExpr: {
        Value v = eval(node.pipeline, scope);
        if (!v) unresolved(node.pipeline.str(), node.position);
        out += print_node(*v);
        return;
      }
      case Node::Kind::kIf:
        exec(truthy(eval(node.pipeline, scope)) ? node.body : node.else_body,
             scope, out);
        return;
      case Node::Kind::kRange:
        exec_range(node, scope, out);
        return;
      case Node::Kind::kTemplateCall: {
        Value arg;
        if (!node.pipeline.commands.empty()) arg = eval(node.pipeline, scope);
        out += call_template(node.name, arg, node.position);
        return;
      }
    }
  }

  void exec_range(const Node& node, const Scope& scope, std::string& out) {
    Value coll = eval(node.pipeline, scope);
    if (!coll || coll->is_null()) {
      exec(node.else_body, scope, out);
      return;
    }
    if (auto p = symbol(*coll)) {
      if (*p != Placeholder::kList && *p != Placeholder::kDict) {
        throw Error(ErrorCode::kTemplateSyntaxError,
                    "range over " + std::string(placeholder_token(*p)) +
                        " value in " + file_,
                    node.position);
      }
      DocNode element = placeholder_node(Placeholder::kString);
      exec(node.body, Scope{scope.root, &element}, out);
      return;
    }
    if (coll->is_scalar()) {
      throw Error(ErrorCode::kTemplateSyntaxError,
                  "range can't iterate over " + coll->text() + " in " + file_,
                  node.position);
    }
    if (coll->is_sequence()) {
      if (coll->items().empty()) exec(node.else_body, scope, out);
      for (const auto& item : coll->items()) {
        exec(node.body, Scope{scope.root, &item}, out);
      }
      return;
    }
    if (coll->entries().empty()) exec(node.else_body, scope, out);
    std::vector<const MappingEntry*> entries;
    for (const auto& e : coll->entries()) entries.push_back(&e);
    std::sort(entries.begin(), entries.end(),
              [](auto* a, auto* b) { return a->key < b->key; });
    for (const auto* e : entries) {
      exec(node.body, Scope{scope.root, &e->value}, out);
    }
  }

  std::string call_template(const std::string& name, const Value& arg,
                            Position pos) {
    auto it = chart_.defines.find(name);
    if (it == chart_.defines.end()) {
      throw Error(ErrorCode::kTemplateCallUnknown, name + " in " + file_, pos);
    }
    if (depth_ >= kMaxTemplateDepth) {
      throw Error(ErrorCode::kTemplateSyntaxError,
                  "template recursion too deep at " + name, pos);
    }
    DocNode data = arg ? *arg : DocNode::null();
    ++depth_;
    std::string out;
    exec(it->second, Scope{&data, &data}, out);
    --depth_;
    return out;
  }

  Value field(const Value& base, const std::string& key) const {
    if (!base) return std::nullopt;
    if (symbol(*base)) return placeholder_node(Placeholder::kString);
    if (!base->is_mapping()) return std::nullopt;
    const DocNode* v = base->find(key);
    if (v == nullptr) return std::nullopt;
    return *v;
  }

  Value operand(const Operand& op, const Scope& scope) {
    switch (op.kind) {
      case Operand::Kind::kField: {
        Value v = *(op.from_root ? scope.root : scope.dot);
        for (const auto& f : op.fields) v = field(v, f);
        return v;
      }
      case Operand::Kind::kString: return DocNode::string(op.literal);
      case Operand::Kind::kNumber:
      case Operand::Kind::kBool: return DocNode::plain(op.literal);
      case Operand::Kind::kPipeline: return eval(*op.pipeline, scope);
    }
    return std::nullopt;
  }

  Value eval(const Pipeline& p, const Scope& scope) {
    Value piped;
    bool have_piped = false;
    for (const auto& cmd : p.commands) {
      std::vector<Value> args;
      for (const auto& a : cmd.args) args.push_back(operand(a, scope));
      if (cmd.function.empty()) {
        if (have_piped) {
          throw Error(ErrorCode::kTemplateSyntaxError,
                      "cannot pipe into a value in " + file_, cmd.position);
        }
        piped = std::move(args.front());
      } else {
        if (have_piped) args.push_back(std::move(piped));
        piped = call(cmd, args);
      }
      have_piped = true;
    }
    return piped;
  }

  std::string to_text(const Value& v) const { return v ? print_node(*v) : ""; }

  bool any_symbol(const Value& v) const { return v && symbol(*v); }

  long to_int(const Value& v, const Command& cmd) const {
    try {
      if (v && v->is_scalar()) return std::stol(canonical_scalar(v->as_scalar()));
    } catch (...) {
    }
    throw Error(ErrorCode::kTemplateSyntaxError,
                cmd.function + " expects an integer in " + file_, cmd.position);
  }

  void arity(const Command& cmd, const std::vector<Value>& args,
             std::size_t n) const {
    if (args.size() != n) {
      throw Error(ErrorCode::kTemplateSyntaxError,
                  cmd.function + " expects " + std::to_string(n) +
                      " arguments in " + file_,
                  cmd.position);
    }
  }

  Value call(const Command& cmd, std::vector<Value>& args) {
    const std::string& fn = cmd.function;
    const DocNode string_symbol = placeholder_node(Placeholder::kString);
    if (fn == "default") {
      if (args.empty() || args.size() > 2) arity(cmd, args, 2);
      if (args.size() == 1) return args[0];
      return truthy_default(args[1]) ? args[1] : args[0];
    }
    if (fn == "quote") {
      std::string out;
      bool first = true;
      for (const auto& a : args) {
        if (!a) continue;
        if (any_symbol(a)) return string_symbol;
        if (!first) out += ' ';
        out += go_quote(to_text(a));
        first = false;
      }
      return DocNode::string(out);
    }
    if (fn == "upper" || fn == "lower") {
      arity(cmd, args, 1);
      if (any_symbol(args[0])) return string_symbol;
      std::string s = to_text(args[0]);
      for (auto& c : s) {
        c = fn == "upper" ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                          : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      return DocNode::string(s);
    }
    if (fn == "trunc") {
      arity(cmd, args, 2);
      if (any_symbol(args[1])) return string_symbol;
      long n = to_int(args[0], cmd);
      std::string s = to_text(args[1]);
      auto len = static_cast<long>(s.size());
      if (n >= 0 && len > n) s = s.substr(0, static_cast<std::size_t>(n));
      if (n < 0 && len > -n) s = s.substr(static_cast<std::size_t>(len + n));
      return DocNode::string(s);
    }
    if (fn == "trimSuffix") {
      arity(cmd, args, 2);
      if (any_symbol(args[1])) return string_symbol;
      std::string suffix = to_text(args[0]);
      std::string s = to_text(args[1]);
      if (!suffix.empty() && s.ends_with(suffix)) s.resize(s.size() - suffix.size());
      return DocNode::string(s);
    }
    if (fn == "indent" || fn == "nindent") {
      arity(cmd, args, 2);
      std::string s = indent_text(to_text(args[1]), to_int(args[0], cmd));
      return DocNode::string(fn == "nindent" ? "\n" + s : s);
    }
    if (fn == "toYaml") {
      arity(cmd, args, 1);
      if (!args[0]) return DocNode::string("null");
      return DocNode::string(to_yaml(*args[0]));
    }
    if (fn == "eq") {
      if (args.size() < 2) arity(cmd, args, 2);
      for (std::size_t i = 1; i < args.size(); ++i) {
        if (values_equal(args[0], args[i])) return DocNode::boolean(true);
      }
      return DocNode::boolean(false);
    }
    if (fn == "not") {
      arity(cmd, args, 1);
      return DocNode::boolean(!truthy(args[0]));
    }
    if (fn == "and" || fn == "or") {
      if (args.empty()) arity(cmd, args, 2);
      for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        bool t = truthy(args[i]);
        if (fn == "and" ? !t : t) return args[i];
      }
      return args.back();
    }
    if (fn == "include") {
      if (args.empty() || args.size() > 2) arity(cmd, args, 2);
      if (!args[0] || !args[0]->is_scalar()) {
        throw Error(ErrorCode::kTemplateSyntaxError,
                    "include expects a template name in " + file_, cmd.position);
      }
      Value ctx = args.size() == 2 ? args[1] : Value{};
      return DocNode::string(call_template(args[0]->text(), ctx, cmd.position));
    }
    throw Error(ErrorCode::kUnsupportedFunction, fn, cmd.position);
  }

  // `default` treats a bool placeholder as set: it stands for a value the
  // user supplies, so the default never applies.
  bool truthy_default(const Value& v) const {
    if (any_symbol(v)) return true;
    return !is_empty(v);
  }

  bool values_equal(const Value& a, const Value& b) const {
    if (!a || !b) return !a && !b;
    if (any_symbol(a) || any_symbol(b)) return false;
    if (!a->is_scalar() || !b->is_scalar()) return *a == *b;
    bool a_str = a->as_scalar().kind == ScalarKind::kString;
    bool b_str = b->as_scalar().kind == ScalarKind::kString;
    if (a_str != b_str) return false;
    return print_node(*a) == print_node(*b);
  }

  const Chart& chart_;
  const RenderContext& ctx_;
  std::string file_;
  BoolBranch branch_;
  bool consulted_ = false;
  int depth_ = 0;
};

DocNode build_root(const Chart& chart, const RenderContext& ctx) {
  auto text = [&](const std::string& s) {
    return ctx.symbolic ? DocNode::plain(s) : DocNode::string(s);
  };
  Mapping release{{"Name", text(ctx.release_name)},
                  {"Service", DocNode::string(ctx.release_service)}};
  Mapping meta{{"Name", DocNode::string(ctx.chart_name.empty() ? chart.name
                                                               : ctx.chart_name)}};
  DocNode values = ctx.values.is_null() ? DocNode::mapping() : ctx.values;
  return DocNode::mapping(Mapping{{"Values", std::move(values)},
                                  {"Release", DocNode::mapping(std::move(release))},
                                  {"Chart", DocNode::mapping(std::move(meta))}});
}

int install_rank(std::string_view kind) {
  static constexpr std::string_view kOrder[] = {
      "Namespace", "NetworkPolicy", "ResourceQuota", "LimitRange",
      "PodSecurityPolicy", "PodDisruptionBudget", "ServiceAccount", "Secret",
      "SecretList", "ConfigMap", "StorageClass", "PersistentVolume",
      "PersistentVolumeClaim", "CustomResourceDefinition", "ClusterRole",
      "ClusterRoleList", "ClusterRoleBinding", "ClusterRoleBindingList", "Role",
      "RoleList", "RoleBinding", "RoleBindingList", "Service", "DaemonSet", "Pod",
      "ReplicationController", "ReplicaSet", "Deployment",
      "HorizontalPodAutoscaler", "StatefulSet", "Job", "CronJob", "IngressClass",
      "Ingress", "APIService"};
  for (std::size_t i = 0; i < std::size(kOrder); ++i) {
    if (kOrder[i] == kind) return static_cast<int>(i);
  }
  return -1;
}

// Top-level `kind:` of a rendered document, read textually.
std::string peek_kind(std::string_view doc) {
  std::size_t pos = 0;
  while (pos < doc.size()) {
    std::size_t nl = doc.find('\n', pos);
    std::string_view line = doc.substr(pos, nl == std::string_view::npos
                                                ? std::string_view::npos
                                                : nl - pos);
    if (line.starts_with("kind:")) {
      std::string_view v = line.substr(5);
      while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
      while (!v.empty() && (v.back() == ' ' || v.back() == '\r')) v.remove_suffix(1);
      if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') &&
          v.back() == v.front()) {
        v = v.substr(1, v.size() - 2);
      }
      return std::string(v);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return "";
}

std::string_view trim_space(std::string_view s) {
  auto sp = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!s.empty() && sp(s.front())) s.remove_prefix(1);
  while (!s.empty() && sp(s.back())) s.remove_suffix(1);
  return s;
}

// Splits on lines that start with `---`, as the stream separator.
std::vector<std::string_view> split_documents(std::string_view text) {
  std::vector<std::string_view> docs;
  std::size_t start = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, end - pos);
    if (line.starts_with("---") &&
        trim_space(line.substr(3)).empty()) {
      docs.push_back(text.substr(start, pos - start));
      start = nl == std::string_view::npos ? text.size() : nl + 1;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  docs.push_back(text.substr(start));
  return docs;
}

}  // namespace

std::string render_file(const Chart& chart, const TemplateFile& file,
                        const RenderContext& ctx) {
  DocNode root = build_root(chart, ctx);
  Renderer first(chart, ctx, file.path, BoolBranch::kTrue);
  std::string out = first.run(file.ast.nodes, root);
  if (!first.consulted_bool()) return out;
  Renderer second(chart, ctx, file.path, BoolBranch::kFalse);
  return out + "\n---\n" + second.run(file.ast.nodes, root);
}

std::vector<RenderedFile> render(const Chart& chart, const RenderContext& ctx) {
  std::vector<RenderedFile> out;
  for (const auto& f : chart.templates) {
    out.push_back(RenderedFile{f.path, render_file(chart, f, ctx)});
  }
  return out;
}

std::string format_stream(const std::string& chart_name,
                          const std::vector<RenderedFile>& files) {
  struct Doc {
    std::string source;
    std::string_view body;
    int rank;
    std::string kind;
  };
  std::vector<Doc> docs;
  for (const auto& f : files) {
    for (auto d : split_documents(f.text)) {
      d = trim_space(d);
      if (d.empty()) continue;
      std::string kind = peek_kind(d);
      docs.push_back(Doc{chart_name + "/templates/" + f.path, d,
                         install_rank(kind), kind});
    }
  }
  std::stable_sort(docs.begin(), docs.end(), [](const Doc& a, const Doc& b) {
    if (a.rank >= 0 && b.rank >= 0) return a.rank < b.rank;
    if (a.rank >= 0) return true;
    if (b.rank >= 0) return false;
    return a.kind < b.kind;
  });
  std::string out;
  for (const auto& d : docs) {
    out += "---\n# Source: " + d.source + "\n";
    out += d.body;
    out += "\n";
  }
  return out;
}

std::string render_stream(const Chart& chart, const RenderContext& ctx) {
  return format_stream(ctx.chart_name.empty() ? chart.name : ctx.chart_name,
                       render(chart, ctx));
}

std::vector<DocNode> split_manifests(std::string_view text) {
  std::vector<DocNode> out;
  std::size_t index = 0;
  for (auto d : split_documents(text)) {
    DocNode doc;
    try {
      doc = parse_document(d);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError,
                  "document " + std::to_string(index) + ": " + e.detail(),
                  e.position());
    }
    if (doc.is_null()) continue;
    const DocNode* kind = doc.is_mapping() ? doc.find("kind") : nullptr;
    const DocNode* api = doc.is_mapping() ? doc.find("apiVersion") : nullptr;
    if (kind == nullptr || !kind->is_scalar() || kind->is_null() ||
        api == nullptr) {
      throw Error(ErrorCode::kMissingKind, std::to_string(index));
    }
    out.push_back(std::move(doc));
    ++index;
  }
  return out;
}

}  // namespace kubefence

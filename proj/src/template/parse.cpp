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

#include <array>
#include <cctype>

#include "kubefence/template_ast.hpp"

namespace kubefence::tmpl {

namespace {

constexpr std::array<std::string_view, 14> kFunctions = {
    "default", "quote", "upper", "lower", "indent", "nindent", "toYaml",
    "trunc", "trimSuffix", "eq", "not", "and", "or", "include"};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

struct Token {
  enum class Kind { kIdent, kField, kString, kNumber, kPipe, kOpen, kClose, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  bool from_root = false;
  std::vector<std::string> fields;
  Position position;
};

class Source {
 public:
  Source(std::string_view text, std::string_view file) : text_(text), file_(file) {}

  Position position_of(std::size_t offset) const {
    Position p{1, 1};
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++p.line;
        p.column = 1;
      } else {
        ++p.column;
      }
    }
    return p;
  }

  [[noreturn]] void fail(std::size_t offset, const std::string& msg) const {
    std::string where = file_.empty() ? "" : std::string(file_) + ": ";
    throw Error(ErrorCode::kTemplateSyntaxError, where + msg, position_of(offset));
  }

  std::string_view text() const { return text_; }
  std::string_view file() const { return file_; }

 private:
  std::string_view text_;
  std::string_view file_;
};

// Tokenizes the inside of one `{{ ... }}` action.
std::vector<Token> lex_action(const Source& src, std::size_t begin,
                              std::size_t end) {
  std::string_view t = src.text();
  std::vector<Token> out;
  std::size_t i = begin;
  while (i < end) {
    char c = t[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    Token tok;
    tok.position = src.position_of(i);
    if (c == '|') {
      tok.kind = Token::Kind::kPipe;
      ++i;
    } else if (c == '(') {
      tok.kind = Token::Kind::kOpen;
      ++i;
    } else if (c == ')') {
      tok.kind = Token::Kind::kClose;
      ++i;
    } else if (c == '"') {
      tok.kind = Token::Kind::kString;
      ++i;
      while (true) {
        if (i >= end) src.fail(i, "unterminated string literal");
        char d = t[i++];
        if (d == '"') break;
        if (d == '\\') {
          if (i >= end) src.fail(i, "unterminated string literal");
          char e = t[i++];
          switch (e) {
            case 'n': tok.text += '\n'; break;
            case 't': tok.text += '\t'; break;
            case 'r': tok.text += '\r'; break;
            case '\\': tok.text += '\\'; break;
            case '"': tok.text += '"'; break;
            default: src.fail(i - 1, std::string("unknown escape \\") + e);
          }
        } else {
          tok.text += d;
        }
      }
    } else if (c == '`') {
      tok.kind = Token::Kind::kString;
      std::size_t close = t.find('`', i + 1);
      if (close == std::string_view::npos || close >= end) {
        src.fail(i, "unterminated raw string");
      }
      tok.text = std::string(t.substr(i + 1, close - i - 1));
      i = close + 1;
    } else if (c == '.' || c == '$') {
      tok.kind = Token::Kind::kField;
      if (c == '$') {
        tok.from_root = true;
        ++i;
        if (i < end && is_ident(t[i])) {
          src.fail(i - 1, "template variables are not supported");
        }
      }
      while (i < end && t[i] == '.') {
        ++i;
        std::size_t s = i;
        while (i < end && is_ident(t[i])) ++i;
        if (s == i) {
          // a lone `.` is the current context
          if (!tok.fields.empty() || tok.from_root) {
            src.fail(i, "expected field name after '.'");
          }
          break;
        }
        tok.fields.emplace_back(t.substr(s, i - s));
      }
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < end &&
                std::isdigit(static_cast<unsigned char>(t[i + 1])))) {
      tok.kind = Token::Kind::kNumber;
      std::size_t s = i++;
      while (i < end && (std::isdigit(static_cast<unsigned char>(t[i])) ||
                         t[i] == '.')) {
        ++i;
      }
      tok.text = std::string(t.substr(s, i - s));
    } else if (is_ident_start(c)) {
      tok.kind = Token::Kind::kIdent;
      std::size_t s = i;
      while (i < end && is_ident(t[i])) ++i;
      tok.text = std::string(t.substr(s, i - s));
    } else if (c == ':' || c == '=') {
      src.fail(i, "template variables are not supported");
    } else {
      src.fail(i, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(tok));
  }
  Token eof;
  eof.position = src.position_of(end);
  out.push_back(eof);
  return out;
}

class PipelineParser {
 public:
  PipelineParser(const Source& src, std::vector<Token> tokens, std::size_t start)
      : src_(src), tokens_(std::move(tokens)), pos_(start) {}

  bool at_end() const { return peek().kind == Token::Kind::kEnd; }
  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_++]; }

  Pipeline pipeline() {
    Pipeline p;
    p.position = peek().position;
    p.commands.push_back(command());
    while (peek().kind == Token::Kind::kPipe) {
      ++pos_;
      p.commands.push_back(command());
    }
    return p;
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    std::string where = src_.file().empty() ? "" : std::string(src_.file()) + ": ";
    throw Error(ErrorCode::kTemplateSyntaxError, where + msg, at.position);
  }

 private:
  bool operand_start() const {
    switch (peek().kind) {
      case Token::Kind::kField:
      case Token::Kind::kString:
      case Token::Kind::kNumber:
      case Token::Kind::kOpen:
        return true;
      case Token::Kind::kIdent:
        return peek().text == "true" || peek().text == "false" ||
               is_supported_function(peek().text);
      default:
        return false;
    }
  }

  Command command() {
    Command cmd;
    cmd.position = peek().position;
    if (peek().kind == Token::Kind::kIdent && peek().text != "true" &&
        peek().text != "false") {
      Token fn = next();
      if (!is_supported_function(fn.text)) {
        throw Error(ErrorCode::kUnsupportedFunction, fn.text, fn.position);
      }
      cmd.function = fn.text;
      while (operand_start()) cmd.args.push_back(operand());
      return cmd;
    }
    if (!operand_start()) fail(peek(), "expected a value or function");
    cmd.args.push_back(operand());
    if (operand_start()) fail(peek(), "unexpected operand after value");
    return cmd;
  }

  Operand operand() {
    Token tok = next();
    Operand op;
    op.position = tok.position;
    switch (tok.kind) {
      case Token::Kind::kField:
        op.kind = Operand::Kind::kField;
        op.from_root = tok.from_root;
        op.fields = std::move(tok.fields);
        return op;
      case Token::Kind::kString:
        op.kind = Operand::Kind::kString;
        op.literal = std::move(tok.text);
        return op;
      case Token::Kind::kNumber:
        op.kind = Operand::Kind::kNumber;
        op.literal = std::move(tok.text);
        return op;
      case Token::Kind::kOpen: {
        op.kind = Operand::Kind::kPipeline;
        op.pipeline = Box<Pipeline>(pipeline());
        if (peek().kind != Token::Kind::kClose) fail(peek(), "expected ')'");
        ++pos_;
        return op;
      }
      case Token::Kind::kIdent:
        if (tok.text == "true" || tok.text == "false") {
          op.kind = Operand::Kind::kBool;
          op.literal = tok.text;
          return op;
        }
        // a bare function name in argument position: zero-arg call
        op.kind = Operand::Kind::kPipeline;
        {
          Pipeline p;
          p.position = tok.position;
          Command c;
          c.function = tok.text;
          c.position = tok.position;
          p.commands.push_back(std::move(c));
          op.pipeline = Box<Pipeline>(std::move(p));
        }
        return op;
      default:
        fail(tok, "expected an operand");
    }
  }

  const Source& src_;
  std::vector<Token> tokens_;
  std::size_t pos_;
};

struct Frame {
  Node node;
  bool in_else = false;
  // Frames opened by `else if` close together with their parent.
  bool chained = false;
};

class Parser {
 public:
  Parser(std::string_view text, std::string_view file) : src_(text, file) {}

  TemplateAst run() {
    std::string_view t = src_.text();
    std::size_t i = 0;
    bool trim_next = false;
    while (i <= t.size()) {
      std::size_t open = t.find("{{", i);
      std::string_view literal =
          t.substr(i, open == std::string_view::npos ? std::string_view::npos
                                                     : open - i);
      if (trim_next) {
        std::size_t k = 0;
        while (k < literal.size() && is_space(literal[k])) ++k;
        literal.remove_prefix(k);
        trim_next = false;
      }
      if (open == std::string_view::npos) {
        emit_text(literal);
        break;
      }
      std::size_t inner = open + 2;
      bool trim_left = inner + 1 < t.size() && t[inner] == '-' &&
                       is_space(t[inner + 1]);
      if (trim_left) {
        std::size_t k = literal.size();
        while (k > 0 && is_space(literal[k - 1])) --k;
        literal = literal.substr(0, k);
        inner += 1;
      }
      emit_text(literal);
      std::size_t close = find_close(inner, open);
      std::size_t inner_end = close;
      if (close >= 2 && t[close - 1] == '-' && is_space(t[close - 2]) &&
          close - 1 >= inner) {
        trim_next = true;
        inner_end = close - 1;
      }
      action(inner, inner_end, open);
      i = close + 2;
    }
    if (stack_.size() > 1) {
      src_.fail(t.size(), "unexpected end of template: missing {{ end }}");
    }
    TemplateAst ast;
    ast.nodes = std::move(stack_.front().node.body);
    return ast;
  }

 private:
  std::size_t find_close(std::size_t from, std::size_t open) const {
    std::string_view t = src_.text();
    std::size_t i = from;
    while (i + 1 < t.size()) {
      char c = t[i];
      if (c == '"') {
        ++i;
        while (i < t.size() && t[i] != '"') {
          if (t[i] == '\\') ++i;
          ++i;
        }
        ++i;
        continue;
      }
      if (c == '`') {
        std::size_t e = t.find('`', i + 1);
        if (e == std::string_view::npos) break;
        i = e + 1;
        continue;
      }
      if (c == '}' && t[i + 1] == '}') return i;
      ++i;
    }
    src_.fail(open, "unclosed action");
  }

  NodeList& current() {
    Frame& f = stack_.back();
    return f.in_else ? f.node.else_body : f.node.body;
  }

  void emit_text(std::string_view text) {
    if (text.empty()) return;
    NodeList& list = current();
    if (!list.empty() && list.back().kind == Node::Kind::kText) {
      list.back().text += text;
      return;
    }
    Node n;
    n.kind = Node::Kind::kText;
    n.text = std::string(text);
    list.push_back(std::move(n));
  }

  void action(std::size_t begin, std::size_t end, std::size_t open) {
    std::string_view body = src_.text().substr(begin, end - begin);
    std::size_t a = 0;
    while (a < body.size() && is_space(body[a])) ++a;
    std::size_t b = body.size();
    while (b > a && is_space(body[b - 1])) --b;
    std::string_view trimmed = body.substr(a, b - a);
    if (trimmed.size() >= 4 && trimmed.substr(0, 2) == "/*" &&
        trimmed.substr(trimmed.size() - 2) == "*/") {
      return;
    }
    std::vector<Token> tokens = lex_action(src_, begin, end);
    Position pos = src_.position_of(open);
    if (tokens.front().kind == Token::Kind::kEnd) {
      src_.fail(open, "empty action");
    }
    const Token& head = tokens.front();
    if (head.kind == Token::Kind::kIdent) {
      const std::string& kw = head.text;
      if (kw == "if" || kw == "range") {
        PipelineParser p(src_, tokens, 1);
        if (p.at_end()) src_.fail(open, "missing condition in " + kw);
        Frame f;
        f.node.kind = kw == "if" ? Node::Kind::kIf : Node::Kind::kRange;
        f.node.pipeline = p.pipeline();
        f.node.position = pos;
        expect_end(p);
        stack_.push_back(std::move(f));
        return;
      }
      if (kw == "else") {
        Frame& f = stack_.back();
        if (stack_.size() == 1 || f.in_else ||
            (f.node.kind != Node::Kind::kIf &&
             f.node.kind != Node::Kind::kRange)) {
          src_.fail(open, "unexpected {{ else }}");
        }
        f.in_else = true;
        if (tokens.size() > 2 && tokens[1].kind == Token::Kind::kIdent &&
            tokens[1].text == "if") {
          if (f.node.kind != Node::Kind::kIf) {
            src_.fail(open, "{{ else if }} inside range");
          }
          PipelineParser p(src_, tokens, 2);
          if (p.at_end()) src_.fail(open, "missing condition in else if");
          Frame chained;
          chained.node.kind = Node::Kind::kIf;
          chained.node.pipeline = p.pipeline();
          chained.node.position = pos;
          chained.chained = true;
          expect_end(p);
          stack_.push_back(std::move(chained));
        } else if (tokens.size() > 1 && tokens[1].kind != Token::Kind::kEnd) {
          src_.fail(open, "unexpected tokens after else");
        }
        return;
      }
      if (kw == "end") {
        if (tokens.size() > 2) src_.fail(open, "unexpected tokens after end");
        if (stack_.size() == 1) src_.fail(open, "unexpected {{ end }}");
        while (true) {
          Frame f = std::move(stack_.back());
          stack_.pop_back();
          bool chained = f.chained;
          current().push_back(std::move(f.node));
          if (!chained) break;
        }
        return;
      }
      if (kw == "define") {
        if (stack_.size() != 1) src_.fail(open, "define must be top-level");
        if (tokens.size() != 3 || tokens[1].kind != Token::Kind::kString) {
          src_.fail(open, "expected {{ define \"name\" }}");
        }
        Frame f;
        f.node.kind = Node::Kind::kDefine;
        f.node.name = tokens[1].text;
        f.node.position = pos;
        stack_.push_back(std::move(f));
        return;
      }
      if (kw == "template") {
        if (tokens.size() < 3 || tokens[1].kind != Token::Kind::kString) {
          src_.fail(open, "expected {{ template \"name\" [context] }}");
        }
        Node n;
        n.kind = Node::Kind::kTemplateCall;
        n.name = tokens[1].text;
        n.position = pos;
        PipelineParser p(src_, tokens, 2);
        if (!p.at_end()) n.pipeline = p.pipeline();
        expect_end(p);
        current().push_back(std::move(n));
        return;
      }
      if (kw == "with" || kw == "block" || kw == "break" || kw == "continue") {
        throw Error(ErrorCode::kUnsupportedFunction, kw, head.position);
      }
    }
    PipelineParser p(src_, tokens, 0);
    Node n;
    n.kind = Node::Kind::kExpr;
    n.pipeline = p.pipeline();
    n.position = pos;
    expect_end(p);
    current().push_back(std::move(n));
  }

  void expect_end(PipelineParser& p) {
    if (!p.at_end()) p.fail(p.peek(), "unexpected token in action");
  }

  Source src_;
  std::vector<Frame> stack_ = std::vector<Frame>(1);
};

}  // namespace

bool is_supported_function(std::string_view name) {
  for (auto f : kFunctions) {
    if (f == name) return true;
  }
  return false;
}

std::string Operand::str() const {
  switch (kind) {
    case Kind::kField: {
      std::string out = from_root ? "$" : "";
      for (const auto& f : fields) out += "." + f;
      return out.empty() ? "." : out;
    }
    case Kind::kString: return "\"" + literal + "\"";
    case Kind::kNumber:
    case Kind::kBool: return literal;
    case Kind::kPipeline: return "(" + pipeline->str() + ")";
  }
  return "";
}

std::string Pipeline::str() const {
  std::string out;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (i > 0) out += " | ";
    const Command& c = commands[i];
    out += c.function;
    for (const auto& a : c.args) {
      if (!out.empty() && out.back() != ' ') out += ' ';
      out += a.str();
    }
  }
  return out;
}

TemplateAst parse_template(std::string_view text, std::string_view file) {
  return Parser(text, file).run();
}

}  // namespace kubefence::tmpl

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

#include "support.hpp"

#include <unistd.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

namespace kftest {

std::filesystem::path fixtures() { return KUBEFENCE_FIXTURES; }

std::filesystem::path chart_dir(const std::string& name) {
  return fixtures() / "charts" / name;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "kftest-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

const std::vector<std::string>& fixture_charts() {
  static const std::vector<std::string> charts = {"mlflow-mini", "nginx-mini",
                                                  "postgres-mini"};
  return charts;
}

const GenerateResult& generated(const std::string& chart) {
  static std::mutex mu;
  static std::map<std::string, GenerateResult> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(chart);
  if (it == cache.end()) {
    Chart c = load_chart(chart_dir(chart));
    BuildOptions build;
    build.locks = c.locks;
    build.chart = c.name;
    it = cache.emplace(chart, generate_policy(c, build)).first;
  }
  return it->second;
}

std::vector<DocNode> concrete_manifests(const std::string& chart) {
  Chart c = load_chart(chart_dir(chart));
  RenderContext ctx;
  ctx.values = c.values;
  return split_manifests(render_stream(c, ctx));
}

// ---- random trees

int TreeGen::uniform(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool TreeGen::coin(double p) { return std::bernoulli_distribution(p)(rng); }

std::string TreeGen::key() {
  static const char* keys[] = {"alpha", "beta", "gamma", "delta", "name", "image",
                               "spec",  "ports", "env", "limits", "host", "mode"};
  return keys[uniform(0, 11)];
}

DocNode TreeGen::scalar() {
  static const char* plain[] = {"true", "false", "0", "7", "42", "-3", "1.5",
                                "null", "10.0.0.1", "nginx", "Always", "x y"};
  if (coin(0.2)) return DocNode::string(coin() ? "quoted" : "5");
  return DocNode::plain(plain[uniform(0, 11)]);
}

DocNode TreeGen::document(int depth) {
  int pick = depth <= 0 ? 0 : uniform(0, 2);
  if (pick == 0) return scalar();
  if (pick == 1) {
    Sequence items;
    int n = uniform(0, 4);
    bool flow = coin(0.3);
    for (int i = 0; i < n; ++i) items.push_back(flow ? scalar() : document(depth - 1));
    return DocNode::sequence(std::move(items), flow && n > 0);
  }
  DocNode m = DocNode::mapping();
  int n = uniform(0, 6);
  for (int i = 0; i < n; ++i) {
    std::string k = key();
    if (m.find(k) == nullptr) m.set(k, document(depth - 1));
  }
  return m;
}

SchemaNode TreeGen::schema(int depth) {
  int pick = depth <= 0 ? uniform(0, 3) : uniform(0, 5);
  switch (pick) {
    case 0: {
      static const Placeholder ps[] = {Placeholder::kBool, Placeholder::kInt,
                                       Placeholder::kString, Placeholder::kIP,
                                       Placeholder::kList, Placeholder::kDict};
      return ps[uniform(0, 5)];
    }
    case 1: return SchemaNode::constant(scalar().as_scalar());
    case 2: {
      std::vector<Scalar> values;
      int n = uniform(2, 3);
      for (int i = 0; i < n; ++i) values.push_back(scalar().as_scalar());
      return SchemaNode::enumeration(std::move(values));
    }
    case 3: {
      DocNode v = coin(0.3) ? placeholder_node(coin() ? Placeholder::kDict : Placeholder::kInt)
                            : DocNode::boolean(coin());
      return SchemaNode::locked(v, coin() ? LockMode::kPin : LockMode::kRequireAndPin);
    }
    case 4: {
      if (coin(0.15)) return SchemaNode::empty_sequence();
      return SchemaNode::sequence_of(schema(depth - 1));
    }
    default: {
      SchemaNode m;
      int n = uniform(1, 6);
      for (int i = 0; i < n; ++i) {
        std::string k = key();
        if (m.find(k) != nullptr) continue;
        SchemaEntry& e = m.set(k, schema(depth - 1), coin(0.3));
        e.required = coin(0.15);
      }
      return m;
    }
  }
}

namespace {

DocNode sample_for(TreeGen& g, Placeholder p) {
  switch (p) {
    case Placeholder::kBool: return DocNode::boolean(g.coin());
    case Placeholder::kInt: return DocNode::integer(g.uniform(-5, 500));
    case Placeholder::kString: return g.scalar();
    case Placeholder::kIP: return DocNode::plain("192.168.0." + std::to_string(g.uniform(0, 255)));
    case Placeholder::kList: return DocNode::sequence({g.scalar()});
    case Placeholder::kDict: return DocNode::mapping({{"k", g.scalar()}});
  }
  return DocNode::null();
}

}  // namespace

DocNode TreeGen::conforming(const SchemaNode& s, int depth) {
  switch (s.type()) {
    case SchemaNode::Type::kPlaceholder: return sample_for(*this, s.placeholder());
    case SchemaNode::Type::kConstant: return DocNode::scalar(s.as_constant().value);
    case SchemaNode::Type::kEnum: {
      const auto& v = s.as_enum().values;
      return DocNode::scalar(v[uniform(0, static_cast<int>(v.size()) - 1)]);
    }
    case SchemaNode::Type::kLocked: {
      const auto& l = s.as_locked();
      if (auto p = placeholder_of(l.value)) return sample_for(*this, *p);
      return l.value;
    }
    case SchemaNode::Type::kSequence: {
      const auto& el = s.as_sequence().element;
      Sequence items;
      if (el) {
        int n = uniform(0, 3);
        for (int i = 0; i < n; ++i) items.push_back(conforming(*el, depth + 1));
      }
      return DocNode::sequence(std::move(items));
    }
    case SchemaNode::Type::kMapping: {
      DocNode m = DocNode::mapping();
      for (const auto& e : s.as_mapping().entries) {
        if (e.required || coin(0.7)) m.set(e.key, conforming(e.node, depth + 1));
      }
      return m;
    }
  }
  return DocNode::null();
}

void TreeGen::perturb(DocNode& node, const SchemaNode& s) {
  // Descend to a random mapping or sequence position and damage it.
  if (node.is_mapping() && !node.entries().empty() && coin(0.6)) {
    auto& e = node.entries()[uniform(0, static_cast<int>(node.entries().size()) - 1)];
    const SchemaNode* child = s.type() == SchemaNode::Type::kMapping ? nullptr : &s;
    if (s.type() == SchemaNode::Type::kMapping) {
      if (const SchemaEntry* se = s.find(e.key)) child = &se->node;
    }
    if (child != nullptr) {
      perturb(e.value, *child);
      return;
    }
  }
  if (node.is_sequence() && !node.items().empty() && coin(0.6) &&
      s.type() == SchemaNode::Type::kSequence && s.as_sequence().element) {
    perturb(node.items()[uniform(0, static_cast<int>(node.items().size()) - 1)],
            *s.as_sequence().element);
    return;
  }
  switch (uniform(0, 4)) {
    case 0:
      if (node.is_mapping()) {
        node.set("zeta", scalar());
      } else {
        node = scalar();
      }
      return;
    case 1: node = scalar(); return;
    case 2: node = document(2); return;
    case 3:
      if (node.is_mapping() && !node.entries().empty()) {
        node.erase(node.entries().front().key);
      } else {
        node = DocNode::sequence({scalar()});
      }
      return;
    default: node = DocNode::mapping({{key(), scalar()}}); return;
  }
}

Validator single_kind_validator(SchemaNode schema) {
  SchemaNode root;
  root.set("kind", SchemaNode::constant(Scalar{"Thing", ScalarKind::kString, false}));
  root.set("body", std::move(schema), true);
  Validator v;
  v.kinds.push_back(KindPolicy{"Thing", std::move(root)});
  v.chart = "random";
  return v;
}

DocNode with_kind(DocNode object) {
  return DocNode::mapping({{"kind", DocNode::plain("Thing")}, {"body", std::move(object)}});
}

// ---- oracle

namespace {

struct Position {
  std::vector<std::string> steps;  // "[]" for an element
  const DocNode* node;
};

void positions(const DocNode& node, std::vector<std::string>& steps,
               std::vector<Position>& out) {
  out.push_back(Position{steps, &node});
  if (node.is_mapping()) {
    for (const auto& e : node.entries()) {
      steps.push_back("." + e.key);
      positions(e.value, steps, out);
      steps.pop_back();
    }
  } else if (node.is_sequence()) {
    for (const auto& item : node.items()) {
      steps.push_back("[]");
      positions(item, steps, out);
      steps.pop_back();
    }
  }
}

enum class Lookup { kFound, kMissing, kAbsorbed };

Lookup lookup(const SchemaNode& root, const std::vector<std::string>& steps,
              const SchemaNode** found) {
  const SchemaNode* cur = &root;
  for (const auto& step : steps) {
    auto t = cur->type();
    if (t != SchemaNode::Type::kMapping && t != SchemaNode::Type::kSequence) {
      return Lookup::kAbsorbed;
    }
    if (step == "[]") {
      // A shape error at the parent is reported there.
      if (t != SchemaNode::Type::kSequence) return Lookup::kAbsorbed;
      if (!cur->as_sequence().element) return Lookup::kAbsorbed;
      cur = cur->as_sequence().element.get();
      continue;
    }
    if (t != SchemaNode::Type::kMapping) return Lookup::kAbsorbed;
    std::string key = step.substr(1);
    const SchemaEntry* hit = nullptr;
    for (const auto& e : cur->as_mapping().entries) {
      if (e.key == key) hit = &e;
    }
    if (hit == nullptr) return Lookup::kMissing;
    cur = &hit->node;
  }
  *found = cur;
  return Lookup::kFound;
}

bool dotted_quad(const std::string& s) {
  int parts = 0;
  std::size_t i = 0;
  while (true) {
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t len = i - start;
    if (len == 0 || len > 3) return false;
    if (len > 1 && s[start] == '0') return false;
    if (std::stoi(s.substr(start, len)) > 255) return false;
    ++parts;
    if (i == s.size()) break;
    if (s[i] != '.') return false;
    ++i;
  }
  return parts == 4;
}

// Normalized value for scalar comparison: kind tag plus a canonical spelling.
std::string norm(const Scalar& s) {
  switch (s.kind) {
    case ScalarKind::kNull: return "n:";
    case ScalarKind::kBoolean: {
      std::string t = s.text;
      for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return "b:" + t;
    }
    case ScalarKind::kInteger: return "i:" + std::to_string(std::stoll(s.text, nullptr, 0));
    case ScalarKind::kFloat: {
      std::ostringstream o;
      o.precision(17);
      o << std::stod(s.text);
      return "f:" + o.str();
    }
    case ScalarKind::kString: return "s:" + s.text;
  }
  return "?";
}

bool admits(Placeholder p, const DocNode& n) {
  if (p == Placeholder::kList) return n.is_sequence();
  if (p == Placeholder::kDict) return n.is_mapping();
  if (!n.is_scalar()) return false;
  ScalarKind k = n.as_scalar().kind;
  if (p == Placeholder::kBool) return k == ScalarKind::kBoolean;
  if (p == Placeholder::kInt) return k == ScalarKind::kInteger;
  if (p == Placeholder::kIP) return k == ScalarKind::kString && dotted_quad(n.text());
  return true;
}

std::optional<Placeholder> token_of(const DocNode& v) {
  if (!v.is_scalar() || v.as_scalar().quoted || v.as_scalar().kind != ScalarKind::kString) {
    return std::nullopt;
  }
  static const std::map<std::string, Placeholder> tokens = {
      {"bool", Placeholder::kBool}, {"int", Placeholder::kInt},
      {"string", Placeholder::kString}, {"IP", Placeholder::kIP},
      {"[list]", Placeholder::kList}, {"{dict}", Placeholder::kDict}};
  auto it = tokens.find(v.text());
  if (it == tokens.end()) return std::nullopt;
  return it->second;
}

bool leaf_ok(const SchemaNode& s, const DocNode& n) {
  switch (s.type()) {
    case SchemaNode::Type::kPlaceholder: return admits(s.placeholder(), n);
    case SchemaNode::Type::kConstant:
      return n.is_scalar() && norm(n.as_scalar()) == norm(s.as_constant().value);
    case SchemaNode::Type::kEnum:
      if (!n.is_scalar()) return false;
      for (const auto& v : s.as_enum().values) {
        if (norm(v) == norm(n.as_scalar())) return true;
      }
      return false;
    case SchemaNode::Type::kLocked: {
      const DocNode& want = s.as_locked().value;
      if (auto p = token_of(want)) return admits(*p, n);
      return n.is_scalar() && norm(n.as_scalar()) == norm(want.as_scalar());
    }
    case SchemaNode::Type::kMapping: {
      if (!n.is_mapping()) return false;
      for (const auto& e : s.as_mapping().entries) {
        if (e.required && n.find(e.key) == nullptr) return false;
      }
      return true;
    }
    case SchemaNode::Type::kSequence:
      if (!n.is_sequence()) return false;
      return s.as_sequence().element || n.items().empty();
  }
  return false;
}

}  // namespace

bool oracle_allows(const DocNode& object, const Validator& validator) {
  if (!object.is_mapping()) return false;
  const DocNode* kind = object.find("kind");
  if (kind == nullptr || !kind->is_scalar() || kind->is_null()) return false;
  const SchemaNode* root = nullptr;
  for (const auto& k : validator.kinds) {
    if (k.kind == kind->text()) root = &k.schema;
  }
  if (root == nullptr) return false;
  std::vector<Position> all;
  std::vector<std::string> steps;
  positions(object, steps, all);
  for (const auto& p : all) {
    const SchemaNode* s = nullptr;
    switch (lookup(*root, p.steps, &s)) {
      case Lookup::kMissing: return false;
      case Lookup::kAbsorbed: continue;
      case Lookup::kFound:
        if (!leaf_ok(*s, *p.node)) return false;
    }
  }
  return true;
}

bool same_tree(const DocNode& a, const DocNode& b) {
  if (a.type() != b.type()) return false;
  if (a.is_scalar()) {
    if (a.as_scalar().kind != b.as_scalar().kind) return false;
    return a.is_null() || a.text() == b.text();
  }
  if (a.is_sequence()) {
    if (a.items().size() != b.items().size()) return false;
    for (std::size_t i = 0; i < a.items().size(); ++i) {
      if (!same_tree(a.items()[i], b.items()[i])) return false;
    }
    return true;
  }
  if (a.entries().size() != b.entries().size()) return false;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    if (a.entries()[i].key != b.entries()[i].key) return false;
    if (!same_tree(a.entries()[i].value, b.entries()[i].value)) return false;
  }
  return true;
}

}  // namespace kftest

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
#include <fstream>
#include <sstream>

#include "kubefence/chart.hpp"

namespace fs = std::filesystem;

namespace kubefence {

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Re-raises a document error as a ParseError naming the file.
DocNode parse_file(const fs::path& path, std::string_view text) {
  try {
    return parse_document(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.detail(),
                e.position());
  }
}

void collect_defines(const TemplateFile& file,
                     std::map<std::string, tmpl::NodeList>& defines) {
  for (const auto& node : file.ast.nodes) {
    if (node.kind != tmpl::Node::Kind::kDefine) continue;
    if (!defines.emplace(node.name, node.body).second) {
      throw Error(ErrorCode::kDuplicateDefine, node.name, node.position);
    }
  }
}

std::string chart_name(const fs::path& dir) {
  fs::path meta = dir / "Chart.yaml";
  std::string fallback = dir.filename().string();
  if (fallback.empty()) fallback = dir.parent_path().filename().string();
  if (!fs::exists(meta)) return fallback;
  DocNode doc = parse_file(meta, read_file(meta));
  if (const DocNode* n = doc.find("name"); n && n->is_scalar() && !n->is_null()) {
    return n->text();
  }
  return fallback;
}

bool options_contain(const std::vector<Scalar>& options, const DocNode& value) {
  if (!value.is_scalar()) return false;
  return std::any_of(options.begin(), options.end(), [&](const Scalar& s) {
    return scalar_equal(s, value.as_scalar());
  });
}

EnumAnnotation make_annotation(const DocNode& values, std::string_view dotted,
                               std::vector<Scalar> options) {
  FieldPath raw = FieldPath::parse(dotted);
  auto target = resolve_values_path(values, raw);
  if (!target) {
    throw Error(ErrorCode::kAnnotationPathUnresolved, std::string(dotted));
  }
  const DocNode* leaf = resolve(values, *target);
  if (leaf == nullptr || !leaf->is_scalar()) {
    throw Error(ErrorCode::kAnnotationPathUnresolved,
                std::string(dotted) + " does not name a scalar");
  }
  if (options.size() < 2) {
    throw Error(ErrorCode::kParseError,
                "enum annotation for " + std::string(dotted) +
                    " needs at least two options");
  }
  if (!options_contain(options, *leaf)) {
    throw Error(ErrorCode::kParseError,
                "enum annotation for " + std::string(dotted) +
                    " does not list the default value '" + leaf->text() + "'");
  }
  return EnumAnnotation{std::move(*target), std::move(options)};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

// Returns the comment body, or nullopt when the line is not a comment.
std::optional<std::string_view> comment_body(std::string_view line) {
  line = trim(line);
  if (line.empty() || line.front() != '#') return std::nullopt;
  return trim(line.substr(1));
}

bool is_dotted_path(std::string_view s) {
  if (s.empty() || s.find('.') == std::string_view::npos) return false;
  if (s.front() == '.' || s.back() == '.') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
           c == '_' || c == '-';
  });
}

bool is_key_line(std::string_view line) {
  std::string_view t = trim(line);
  if (t.empty() || t.front() == '#') return false;
  if (t.starts_with("- ")) t = trim(t.substr(2));
  std::size_t colon = t.find(':');
  return colon != std::string_view::npos && colon > 0 &&
         (colon + 1 == t.size() || t[colon + 1] == ' ');
}

std::vector<Scalar> split_options(std::string_view body) {
  std::string text;
  for (char c : body) {
    if (c != '`') text += c;
  }
  std::vector<std::string> parts;
  std::size_t start = 0;
  // separators: " or " and ","
  for (std::size_t i = 0; i <= text.size(); ++i) {
    bool at_end = i == text.size();
    if (at_end || text[i] == ',') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    } else if (text.compare(i, 4, " or ") == 0) {
      parts.push_back(text.substr(start, i - start));
      i += 3;
      start = i + 1;
    }
  }
  std::vector<Scalar> out;
  for (const auto& p : parts) {
    std::string_view t = trim(p);
    if (t.empty()) continue;
    out.push_back(DocNode::plain(std::string(t)).as_scalar());
  }
  return out;
}

fs::path require_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, dir.string() + " is not a directory");
  }
  return dir;
}

}  // namespace

std::optional<FieldPath> resolve_values_path(const DocNode& values,
                                             const FieldPath& path) {
  if (resolve(values, path) != nullptr) return path;
  const DocNode* cur = &values;
  std::vector<FieldPath::Segment> segs;
  for (const auto& seg : path.segments()) {
    if (seg.wildcard || !cur->is_mapping()) return std::nullopt;
    const MappingEntry* hit = nullptr;
    for (const auto& e : cur->entries()) {
      if (e.key.size() == seg.key.size() &&
          std::equal(e.key.begin(), e.key.end(), seg.key.begin(),
                     [](char a, char b) {
                       return std::tolower(static_cast<unsigned char>(a)) ==
                              std::tolower(static_cast<unsigned char>(b));
                     })) {
        hit = &e;
        break;
      }
    }
    if (hit == nullptr) return std::nullopt;
    segs.push_back(FieldPath::Segment{hit->key, false});
    cur = &hit->value;
  }
  return FieldPath(std::move(segs));
}

std::vector<EnumAnnotation> extract_enum_annotations(std::string_view values_text,
                                                     const DocNode& values) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= values_text.size()) {
    std::size_t nl = values_text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(values_text.substr(start));
      break;
    }
    lines.push_back(values_text.substr(start, nl - start));
    start = nl + 1;
  }
  std::vector<EnumAnnotation> out;
  for (std::size_t i = 0; i + 2 < lines.size(); ++i) {
    auto first = comment_body(lines[i]);
    if (!first || !is_dotted_path(*first)) continue;
    auto second = comment_body(lines[i + 1]);
    if (!second || second->find('`') == std::string_view::npos) continue;
    if (!is_key_line(lines[i + 2])) continue;
    out.push_back(make_annotation(values, *first, split_options(*second)));
    i += 1;
  }
  return out;
}

std::vector<EnumAnnotation> parse_enum_sidecar(std::string_view text,
                                               const DocNode& values) {
  DocNode doc = parse_document(text);
  std::vector<EnumAnnotation> out;
  if (doc.is_null()) return out;
  if (!doc.is_mapping()) {
    throw Error(ErrorCode::kParseError, "enums.yaml must be a mapping");
  }
  for (const auto& e : doc.entries()) {
    if (!e.value.is_sequence()) {
      throw Error(ErrorCode::kParseError,
                  "enums.yaml: options for " + e.key + " must be a list",
                  e.value.position);
    }
    std::vector<Scalar> options;
    for (const auto& item : e.value.items()) {
      if (!item.is_scalar()) {
        throw Error(ErrorCode::kParseError,
                    "enums.yaml: options must be scalars", item.position);
      }
      options.push_back(item.as_scalar());
    }
    out.push_back(make_annotation(values, e.key, std::move(options)));
  }
  return out;
}

std::vector<LockRule> default_lock_rules() {
  auto rule = [](std::string_view target, std::optional<DocNode> value,
                 LockMode mode, std::string_view values_target = {}) {
    LockRule r;
    r.target = PathPattern::parse(target);
    if (!values_target.empty()) r.values_target = PathPattern::parse(values_target);
    r.value = std::move(value);
    r.mode = mode;
    return r;
  };
  return {
      rule("...containers[].securityContext.runAsNonRoot", DocNode::boolean(true),
           LockMode::kRequireAndPin, "...containerSecurityContext.runAsNonRoot"),
      rule("...containers[].securityContext.readOnlyRootFilesystem",
           DocNode::boolean(true), LockMode::kPin,
           "...containerSecurityContext.readOnlyRootFilesystem"),
      rule("...containers[].securityContext.allowPrivilegeEscalation",
           DocNode::boolean(false), LockMode::kPin,
           "...containerSecurityContext.allowPrivilegeEscalation"),
      rule("...containers[].securityContext.privileged", DocNode::boolean(false),
           LockMode::kPin, "...containerSecurityContext.privileged"),
      rule("...containers[].resources.limits", placeholder_node(Placeholder::kDict),
           LockMode::kRequireAndPin),
      rule("image.registry", std::nullopt, LockMode::kPin),
      rule("image.repository", std::nullopt, LockMode::kPin),
  };
}

std::vector<LockRule> parse_lock_rules(std::string_view text) {
  DocNode doc = parse_document(text);
  std::vector<LockRule> out;
  if (doc.is_null()) return out;
  if (!doc.is_sequence()) {
    throw Error(ErrorCode::kParseError, "locks.yaml must be a list of rules");
  }
  for (const auto& item : doc.items()) {
    if (!item.is_mapping()) {
      throw Error(ErrorCode::kParseError, "lock rule must be a mapping",
                  item.position);
    }
    LockRule r;
    const DocNode* target = item.find("target");
    if (target == nullptr || !target->is_scalar() || target->text().empty()) {
      throw Error(ErrorCode::kParseError, "lock rule without target",
                  item.position);
    }
    r.target = PathPattern::parse(target->text());
    if (const DocNode* vt = item.find("values_target")) {
      r.values_target = PathPattern::parse(vt->text());
    }
    if (const DocNode* v = item.find("value")) {
      if (!v->is_scalar() && !placeholder_of(*v)) {
        throw Error(ErrorCode::kParseError, "lock value must be a scalar",
                    v->position);
      }
      if (auto p = placeholder_of(*v)) {
        r.value = placeholder_node(*p);
      } else {
        r.value = *v;
      }
    }
    std::string mode = "pin";
    if (const DocNode* m = item.find("mode")) mode = m->text();
    if (mode == "pin") {
      r.mode = LockMode::kPin;
    } else if (mode == "require-and-pin" || mode == "require") {
      r.mode = LockMode::kRequireAndPin;
    } else {
      throw Error(ErrorCode::kParseError, "unknown lock mode '" + mode + "'",
                  item.position);
    }
    for (const auto& prev : out) {
      if (prev.target == r.target) {
        throw Error(ErrorCode::kParseError,
                    "duplicate lock target " + r.target.str(), item.position);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string serialize_lock_rules(const std::vector<LockRule>& rules) {
  Sequence items;
  for (const auto& r : rules) {
    Mapping m;
    m.push_back({"target", DocNode::string(r.target.str())});
    if (r.value) m.push_back({"value", *r.value});
    m.push_back({"mode", DocNode::plain(std::string(lock_mode_name(r.mode)))});
    if (r.values_target) {
      m.push_back({"values_target", DocNode::string(r.values_target->str())});
    }
    items.push_back(DocNode::mapping(std::move(m)));
  }
  return to_yaml(DocNode::sequence(std::move(items)));
}

Chart load_chart(const fs::path& directory) {
  fs::path dir = require_dir(directory);
  Chart chart;
  chart.directory = dir;
  chart.name = chart_name(dir);

  fs::path values_path = dir / "values.yaml";
  if (!fs::is_regular_file(values_path)) {
    throw Error(ErrorCode::kMissingValues, values_path.string());
  }
  chart.values_text = read_file(values_path);
  chart.values = parse_file(values_path, chart.values_text);
  if (chart.values.is_null()) chart.values = DocNode::mapping();
  if (!chart.values.is_mapping()) {
    throw Error(ErrorCode::kParseError,
                values_path.string() + ": values must be a mapping");
  }

  fs::path tdir = dir / "templates";
  if (!fs::is_directory(tdir)) {
    throw Error(ErrorCode::kMissingTemplates, tdir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(tdir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    if (ext == ".yaml" || ext == ".yml" || ext == ".tpl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    TemplateFile tf;
    tf.path = f.filename().string();
    tf.text = read_file(f);
    if (trim(tf.text).empty()) {
      throw Error(ErrorCode::kParseError, f.string() + ": empty template file");
    }
    tf.ast = tmpl::parse_template(tf.text, tf.path);
    collect_defines(tf, chart.defines);
    bool partial = tf.path.front() == '_' || f.extension() == ".tpl";
    (partial ? chart.partials : chart.templates).push_back(std::move(tf));
  }
  if (chart.templates.empty()) {
    throw Error(ErrorCode::kMissingTemplates,
                tdir.string() + " has no renderable template");
  }

  chart.enums = extract_enum_annotations(chart.values_text, chart.values);
  fs::path sidecar = dir / "enums.yaml";
  if (fs::is_regular_file(sidecar)) {
    for (auto& a : parse_enum_sidecar(read_file(sidecar), chart.values)) {
      auto same = [&](const EnumAnnotation& x) { return x.target == a.target; };
      auto it = std::find_if(chart.enums.begin(), chart.enums.end(), same);
      if (it != chart.enums.end()) {
        *it = std::move(a);
      } else {
        chart.enums.push_back(std::move(a));
      }
    }
  }

  fs::path locks = dir / "locks.yaml";
  chart.locks = fs::is_regular_file(locks) ? parse_lock_rules(read_file(locks))
                                           : default_lock_rules();
  return chart;
}

}  // namespace kubefence

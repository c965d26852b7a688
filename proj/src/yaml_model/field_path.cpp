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

#include "kubefence/yaml_model.hpp"

namespace kubefence {

namespace {

std::string escape_key(std::string_view key) {
  std::string out;
  out.reserve(key.size());
  for (char c : key) {
    if (c == '.' || c == '[' || c == ']' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

[[noreturn]] void bad_path(std::string_view text, std::string_view why) {
  throw Error(ErrorCode::kSyntaxError,
              "invalid field path '" + std::string(text) + "': " +
                  std::string(why));
}

}  // namespace

FieldPath FieldPath::parse(std::string_view text) {
  std::vector<Segment> segs;
  if (text.empty() || text == ".") return FieldPath{};

  std::string key;
  bool have_key = false;
  bool after_wildcard = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\\') {
      if (i + 1 >= text.size()) bad_path(text, "dangling escape");
      key += text[++i];
      have_key = true;
      after_wildcard = false;
    } else if (c == '.') {
      if (have_key) {
        segs.push_back(Segment{std::move(key), false});
        key.clear();
        have_key = false;
      } else if (!after_wildcard && !(i == 0)) {
        bad_path(text, "empty segment");
      }
      after_wildcard = false;
    } else if (c == '[') {
      if (i + 1 >= text.size() || text[i + 1] != ']') {
        bad_path(text, "expected []");
      }
      if (have_key) {
        segs.push_back(Segment{std::move(key), false});
        key.clear();
        have_key = false;
      }
      segs.push_back(Segment{"", true});
      ++i;
      after_wildcard = true;
    } else if (c == ']') {
      bad_path(text, "unbalanced ]");
    } else {
      key += c;
      have_key = true;
      after_wildcard = false;
    }
  }
  if (have_key) segs.push_back(Segment{std::move(key), false});
  return FieldPath(std::move(segs));
}

std::string FieldPath::str() const {
  if (segments_.empty()) return ".";
  std::string out;
  bool first = true;
  for (const auto& seg : segments_) {
    if (seg.wildcard) {
      out += "[]";
    } else {
      if (!first) out += '.';
      out += escape_key(seg.key);
    }
    first = false;
  }
  return out;
}

FieldPath FieldPath::key(std::string key) const {
  FieldPath out = *this;
  out.segments_.push_back(Segment{std::move(key), false});
  return out;
}

FieldPath FieldPath::element() const {
  FieldPath out = *this;
  out.segments_.push_back(Segment{"", true});
  return out;
}

FieldPath FieldPath::parent() const {
  FieldPath out = *this;
  if (!out.segments_.empty()) out.segments_.pop_back();
  return out;
}

FieldPath FieldPath::concat(const FieldPath& tail) const {
  FieldPath out = *this;
  out.segments_.insert(out.segments_.end(), tail.segments_.begin(),
                       tail.segments_.end());
  return out;
}

bool FieldPath::starts_with(const FieldPath& prefix) const {
  return prefix.size() <= size() &&
         std::equal(prefix.segments_.begin(), prefix.segments_.end(),
                    segments_.begin());
}

bool FieldPath::ends_with(const FieldPath& suffix) const {
  return suffix.size() <= size() &&
         std::equal(suffix.segments_.rbegin(), suffix.segments_.rend(),
                    segments_.rbegin());
}

PathPattern PathPattern::parse(std::string_view text) {
  if (text.starts_with("...")) {
    return PathPattern(FieldPath::parse(text.substr(3)), true);
  }
  return PathPattern(FieldPath::parse(text), false);
}

std::string PathPattern::str() const {
  if (!any_prefix_) return path_.str();
  return path_.empty() ? "..." : "..." + path_.str();
}

bool PathPattern::matches(const FieldPath& path) const {
  return any_prefix_ ? path.ends_with(path_) : path == path_;
}

}  // namespace kubefence

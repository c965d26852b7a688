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
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "kubefence/proxy.hpp"

namespace kubefence {

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::kConfigError, msg);
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

long long int_field(const DocNode& n, const std::string& key) {
  if (!n.is_scalar() || n.as_scalar().kind != ScalarKind::kInteger) {
    config_error(key + " must be an integer");
  }
  long long v = 0;
  std::string text = canonical_scalar(n.as_scalar());
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    config_error(key + " is out of range");
  }
  return v;
}

std::string string_field(const DocNode& n, const std::string& key) {
  if (!n.is_scalar() || n.is_null()) config_error(key + " must be a string");
  return n.text();
}

}  // namespace

ParsedUrl parse_url(std::string_view url) {
  ParsedUrl out;
  auto sep = url.find("://");
  if (sep == std::string_view::npos) config_error("malformed URL: " + std::string(url));
  out.scheme = std::string(url.substr(0, sep));
  if (out.scheme != "http" && out.scheme != "https") {
    config_error("URL scheme must be http or https: " + std::string(url));
  }
  std::string_view rest = url.substr(sep + 3);
  auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  out.base_path = slash == std::string_view::npos ? "" : std::string(rest.substr(slash));
  while (!out.base_path.empty() && out.base_path.back() == '/') out.base_path.pop_back();
  if (authority.empty()) config_error("URL has no host: " + std::string(url));
  std::string_view host = authority;
  out.port = out.scheme == "https" ? 443 : 80;
  if (authority.front() == '[') {
    auto close = authority.find(']');
    if (close == std::string_view::npos) config_error("malformed IPv6 host: " + std::string(url));
    host = authority.substr(1, close - 1);
    authority.remove_prefix(close + 1);
    if (!authority.empty() && authority.front() != ':') {
      config_error("malformed URL: " + std::string(url));
    }
  } else if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    authority.remove_prefix(colon);
  } else {
    authority = {};
  }
  if (!authority.empty()) {
    std::string_view port = authority.substr(1);
    int p = 0;
    auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), p);
    if (port.empty() || ec != std::errc{} || end != port.data() + port.size() || p <= 0 ||
        p > 65535) {
      config_error("invalid port in URL: " + std::string(url));
    }
    out.port = p;
  }
  if (host.empty()) config_error("URL has no host: " + std::string(url));
  out.host = std::string(host);
  return out;
}

ProxyConfig parse_proxy_config(std::string_view yaml_text) {
  DocNode root;
  try {
    root = parse_document(yaml_text);
  } catch (const Error& e) {
    config_error(e.detail());
  }
  ProxyConfig c;
  if (root.is_null()) config_error("empty proxy config");
  if (!root.is_mapping()) config_error("proxy config must be a mapping");
  for (const auto& e : root.entries()) {
    const std::string& k = e.key;
    const DocNode& v = e.value;
    if (k == "listen_address") {
      c.listen_address = string_field(v, k);
    } else if (k == "listen_port") {
      long long p = int_field(v, k);
      if (p < 0 || p > 65535) config_error("listen_port out of range");
      c.listen_port = static_cast<int>(p);
    } else if (k == "upstream_url") {
      c.upstream_url = string_field(v, k);
    } else if (k == "tls_cert") {
      c.tls_cert = string_field(v, k);
    } else if (k == "tls_key") {
      c.tls_key = string_field(v, k);
    } else if (k == "upstream_client_cert") {
      c.upstream_client_cert = string_field(v, k);
    } else if (k == "upstream_client_key") {
      c.upstream_client_key = string_field(v, k);
    } else if (k == "upstream_ca") {
      c.upstream_ca = string_field(v, k);
    } else if (k == "validator") {
      c.validator_path = string_field(v, k);
    } else if (k == "audit_log") {
      c.audit_log = string_field(v, k);
    } else if (k == "body_limit") {
      long long b = int_field(v, k);
      if (b <= 0) config_error("body_limit must be > 0");
      c.body_limit = static_cast<std::size_t>(b);
    } else if (k == "upstream_timeout") {
      long long t = int_field(v, k);
      if (t <= 0) config_error("upstream_timeout must be > 0");
      c.upstream_timeout_seconds = static_cast<int>(t);
    } else if (k == "threads") {
      long long t = int_field(v, k);
      if (t <= 0 || t > 1024) config_error("threads must be in 1..1024");
      c.threads = static_cast<int>(t);
    } else if (k == "passthrough_verbs") {
      if (!v.is_sequence()) config_error("passthrough_verbs must be a list");
      c.passthrough_verbs.clear();
      for (const auto& item : v.items()) {
        c.passthrough_verbs.insert(upper(string_field(item, k)));
      }
    } else if (k == "resource_kinds") {
      if (!v.is_mapping()) config_error("resource_kinds must be a mapping");
      for (const auto& r : v.entries()) c.resource_kinds[r.key] = string_field(r.value, r.key);
    } else {
      config_error("unknown proxy config key '" + k + "'");
    }
  }
  if (c.upstream_url.empty()) config_error("upstream_url is required");
  parse_url(c.upstream_url);
  if (c.validator_path.empty()) config_error("validator is required");
  if (c.tls_cert.empty() != c.tls_key.empty()) {
    config_error("tls_cert and tls_key must be set together");
  }
  if (c.upstream_client_cert.empty() != c.upstream_client_key.empty()) {
    config_error("upstream_client_cert and upstream_client_key must be set together");
  }
  return c;
}

ProxyConfig load_proxy_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ProxyConfig c = parse_proxy_config(ss.str());
  // Relative file references resolve against the config file.
  auto base = path.parent_path();
  for (std::string* p : {&c.validator_path, &c.audit_log, &c.tls_cert, &c.tls_key,
                         &c.upstream_client_cert, &c.upstream_client_key, &c.upstream_ca}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) {
      *p = (base / *p).lexically_normal().string();
    }
  }
  return c;
}

const std::map<std::string, std::string>& builtin_resource_kinds() {
  static const std::map<std::string, std::string> table = {
      {"pods", "Pod"},
      {"services", "Service"},
      {"configmaps", "ConfigMap"},
      {"secrets", "Secret"},
      {"serviceaccounts", "ServiceAccount"},
      {"persistentvolumeclaims", "PersistentVolumeClaim"},
      {"persistentvolumes", "PersistentVolume"},
      {"namespaces", "Namespace"},
      {"endpoints", "Endpoints"},
      {"nodes", "Node"},
      {"replicationcontrollers", "ReplicationController"},
      {"deployments", "Deployment"},
      {"statefulsets", "StatefulSet"},
      {"daemonsets", "DaemonSet"},
      {"replicasets", "ReplicaSet"},
      {"jobs", "Job"},
      {"cronjobs", "CronJob"},
      {"ingresses", "Ingress"},
      {"networkpolicies", "NetworkPolicy"},
      {"poddisruptionbudgets", "PodDisruptionBudget"},
      {"horizontalpodautoscalers", "HorizontalPodAutoscaler"},
      {"roles", "Role"},
      {"rolebindings", "RoleBinding"},
      {"clusterroles", "ClusterRole"},
      {"clusterrolebindings", "ClusterRoleBinding"},
      {"storageclasses", "StorageClass"},
      {"customresourcedefinitions", "CustomResourceDefinition"},
  };
  return table;
}

std::optional<ApiPath> parse_api_path(std::string_view path) {
  std::vector<std::string> segs;
  std::size_t i = 0;
  while (i < path.size()) {
    auto j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    if (j > i) segs.emplace_back(path.substr(i, j - i));
    i = j + 1;
  }
  ApiPath out;
  std::size_t at = 0;
  if (segs.size() >= 2 && segs[0] == "api") {
    out.version = segs[1];
    at = 2;
  } else if (segs.size() >= 3 && segs[0] == "apis") {
    out.group = segs[1];
    out.version = segs[2];
    at = 3;
  } else {
    return std::nullopt;
  }
  std::vector<std::string> rest(segs.begin() + static_cast<long>(at), segs.end());
  if (rest.size() >= 2 && rest[0] == "namespaces" && rest.size() != 2) {
    out.namespace_name = rest[1];
    rest.erase(rest.begin(), rest.begin() + 2);
  }
  if (rest.empty()) return std::nullopt;
  out.resource = rest[0];
  if (rest.size() >= 2) out.name = rest[1];
  if (rest.size() >= 3) out.subresource = rest[2];
  if (rest.size() > 3) return std::nullopt;
  return out;
}

}  // namespace kubefence

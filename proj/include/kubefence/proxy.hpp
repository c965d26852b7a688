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

// Filtering reverse proxy. ProxyCore holds the request decision logic and
// is independent of the HTTP stack; ProxyServer binds it to cpp-httplib.

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kubefence/validation.hpp"

namespace kubefence {

struct ProxyConfig {
  std::string listen_address = "127.0.0.1";
  int listen_port = 8443;
  std::string upstream_url;
  std::string tls_cert;
  std::string tls_key;
  std::string upstream_client_cert;
  std::string upstream_client_key;
  std::string upstream_ca;
  std::string validator_path;
  std::string audit_log;
  std::size_t body_limit = 3 * 1024 * 1024;
  std::set<std::string> passthrough_verbs = {"GET", "HEAD", "OPTIONS", "DELETE"};
  // resource (plural, lower case) -> kind, merged over the built-in table
  std::map<std::string, std::string> resource_kinds;
  int upstream_timeout_seconds = 30;
  int threads = 16;
};

/// Throws kConfigError when a field is malformed or an invariant fails.
ProxyConfig parse_proxy_config(std::string_view yaml_text);
ProxyConfig load_proxy_config(const std::filesystem::path& path);

struct ParsedUrl {
  std::string scheme;  // http | https
  std::string host;
  int port = 0;
  std::string base_path;  // no trailing slash
};

/// Throws kConfigError on anything but http(s)://host[:port][/path].
ParsedUrl parse_url(std::string_view url);

const std::map<std::string, std::string>& builtin_resource_kinds();

struct ApiPath {
  std::string group;  // empty for the core group
  std::string version;
  std::string namespace_name;
  std::string resource;
  std::string name;
  std::string subresource;
};

/// `/api/v1/...` or `/apis/<group>/<version>/...`; nullopt otherwise.
std::optional<ApiPath> parse_api_path(std::string_view path);

struct AuditRecord {
  std::string timestamp;  // RFC 3339 with microseconds, UTC
  std::string client;
  std::string method;
  std::string path;
  std::string kind;
  std::string decision;  // allow | deny | error
  std::string deny_path;
  std::string reason;
  int status = 0;           // status returned to the client
  int upstream_status = 0;  // 0 when not forwarded
  long long elapsed_us = 0;

  std::string to_json() const;
};

std::string rfc3339_now();

/// JSON Lines appender; one write(2) per record on an O_APPEND descriptor.
/// Failures go to stderr and never propagate.
class AuditLog {
 public:
  AuditLog() = default;
  explicit AuditLog(const std::string& path);
  ~AuditLog();
  AuditLog(const AuditLog&) = delete;
  AuditLog& operator=(const AuditLog&) = delete;

  void emit(const AuditRecord& record);

 private:
  std::mutex mu_;
  int fd_ = -1;
  std::string path_;
};

struct ProxyRequest {
  std::string method;
  std::string path;   // without the query string
  std::string query;  // without '?'
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::string client;

  std::string header(std::string_view name) const;
  bool is_watch() const;
};

struct ProxyResponse {
  int status = 200;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;

  std::string header(std::string_view name) const;
};

class Upstream {
 public:
  virtual ~Upstream() = default;
  /// Throws on connection failure.
  virtual ProxyResponse forward(const ProxyRequest& request) = 0;
};

/// Kubernetes Status object for a rejected request.
std::string status_body(int code, std::string_view reason, std::string_view message,
                        std::string_view kind = {},
                        const std::optional<Violation>& cause = std::nullopt);

class ProxyCore {
 public:
  ProxyCore(ProxyConfig config, std::shared_ptr<const Validator> validator,
            Upstream& upstream, AuditLog* audit);

  /// Decides, forwards when allowed, and emits exactly one audit record.
  ProxyResponse handle(const ProxyRequest& request);

  /// Decision only; never forwards. `record` receives kind/decision fields.
  std::optional<ProxyResponse> check(const ProxyRequest& request,
                                     AuditRecord& record) const;

  std::shared_ptr<const Validator> validator() const;
  void swap_validator(std::shared_ptr<const Validator> next);
  /// Loads and swaps; keeps the old policy and returns false on failure.
  bool reload(const std::filesystem::path& path, std::string* error = nullptr);

  const ProxyConfig& config() const { return config_; }
  AuditLog* audit() const { return audit_; }
  std::string kind_for_resource(const std::string& resource) const;

 private:
  ProxyConfig config_;
  mutable std::mutex policy_mu_;
  std::shared_ptr<const Validator> validator_;
  Upstream& upstream_;
  AuditLog* audit_;
};

/// cpp-httplib upstream; one keep-alive client per calling thread.
class HttpUpstream : public Upstream {
 public:
  explicit HttpUpstream(const ProxyConfig& config);
  ProxyResponse forward(const ProxyRequest& request) override;

  /// Streams a long-lived GET (watch); `sink` returns false to stop.
  int stream(const ProxyRequest& request,
             const std::function<bool(const char*, std::size_t)>& sink,
             std::vector<std::pair<std::string, std::string>>* headers);

 private:
  ProxyConfig config_;
  ParsedUrl url_;
  std::uint64_t id_;
};

/// HTTP(S) listener around ProxyCore.
class ProxyServer {
 public:
  /// Loads the validator (fail-closed: throws when missing or corrupt).
  explicit ProxyServer(ProxyConfig config);
  ~ProxyServer();

  /// Binds the configured port (0 picks a free one) and returns it.
  int bind();
  /// Serves until stop(); bind() must have succeeded.
  void serve();
  void stop();
  bool reload();

  ProxyCore& core() { return *core_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ProxyConfig config_;
  std::unique_ptr<AuditLog> audit_;
  std::unique_ptr<HttpUpstream> upstream_;
  std::unique_ptr<ProxyCore> core_;
};

/// `kubefence serve`: runs until SIGINT/SIGTERM, reloads on SIGHUP.
int run_proxy(const ProxyConfig& config);

}  // namespace kubefence

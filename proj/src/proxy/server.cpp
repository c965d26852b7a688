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

#include <signal.h>

#include <cstdio>
#include <thread>
#include <unordered_map>

#include <httplib.h>

#include "kubefence/proxy.hpp"

namespace kubefence {

namespace {

std::atomic<std::uint64_t> next_upstream_id{1};

bool hop_by_hop(const std::string& name) {
  static const char* const kSkip[] = {"connection",        "keep-alive", "proxy-connection",
                                      "transfer-encoding", "te",         "trailer",
                                      "upgrade",           "content-length", "host"};
  std::string n = name;
  for (auto& c : n) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const char* s : kSkip) {
    if (n == s) return true;
  }
  return false;
}

std::string target_of(const ParsedUrl& url, const ProxyRequest& r) {
  std::string t = url.base_path + r.path;
  if (!r.query.empty()) t += "?" + r.query;
  return t;
}

httplib::Headers forward_headers(const ProxyRequest& r) {
  httplib::Headers h;
  for (const auto& [k, v] : r.headers) {
    if (!hop_by_hop(k)) h.emplace(k, v);
  }
  return h;
}

// Per-request state shared between the route handler and the error handler.
thread_local bool t_routed = false;

ProxyRequest to_proxy_request(const httplib::Request& req) {
  ProxyRequest r;
  r.method = req.method;
  const std::string& target = req.target.empty() ? req.path : req.target;
  auto q = target.find('?');
  r.path = target.substr(0, q);
  if (q != std::string::npos) r.query = target.substr(q + 1);
  for (const auto& [k, v] : req.headers) {
    if (k == "REMOTE_ADDR" || k == "REMOTE_PORT" || k == "LOCAL_ADDR" || k == "LOCAL_PORT") {
      continue;
    }
    r.headers.emplace_back(k, v);
  }
  r.body = req.body;
  r.client = req.remote_addr + ":" + std::to_string(req.remote_port);
  return r;
}

void write_response(const ProxyResponse& p, httplib::Response& res) {
  res.status = p.status;
  std::string content_type;
  for (const auto& [k, v] : p.headers) {
    if (hop_by_hop(k)) continue;
    std::string lk = k;
    for (auto& c : lk) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lk == "content-type") {
      content_type = v;
      continue;
    }
    res.headers.emplace(k, v);
  }
  if (!content_type.empty()) {
    res.set_content(p.body, content_type);
  } else {
    res.body = p.body;
  }
}

}  // namespace

HttpUpstream::HttpUpstream(const ProxyConfig& config)
    : config_(config), url_(parse_url(config.upstream_url)), id_(next_upstream_id++) {}

namespace {

httplib::Client& client_for(std::uint64_t id, const ProxyConfig& config,
                            const ParsedUrl& url) {
  thread_local std::unordered_map<std::uint64_t, std::unique_ptr<httplib::Client>> clients;
  auto& slot = clients[id];
  if (!slot) {
    std::string base = url.scheme + "://" +
                       (url.host.find(':') != std::string::npos ? "[" + url.host + "]"
                                                                 : url.host) +
                       ":" + std::to_string(url.port);
    if (!config.upstream_client_cert.empty()) {
      slot = std::make_unique<httplib::Client>(base, config.upstream_client_cert,
                                               config.upstream_client_key);
    } else {
      slot = std::make_unique<httplib::Client>(base);
    }
    if (!config.upstream_ca.empty()) slot->set_ca_cert_path(config.upstream_ca);
    slot->set_keep_alive(true);
    slot->set_tcp_nodelay(true);
    slot->set_connection_timeout(config.upstream_timeout_seconds, 0);
    slot->set_read_timeout(config.upstream_timeout_seconds, 0);
    slot->set_write_timeout(config.upstream_timeout_seconds, 0);
  }
  return *slot;
}

}  // namespace

ProxyResponse HttpUpstream::forward(const ProxyRequest& request) {
  httplib::Request req;
  req.method = request.method;
  req.path = target_of(url_, request);
  req.headers = forward_headers(request);
  req.body = request.body;
  auto& client = client_for(id_, config_, url_);
  auto result = client.send(req);
  if (!result) {
    throw Error(ErrorCode::kIoError, httplib::to_string(result.error()));
  }
  ProxyResponse out;
  out.status = result->status;
  for (const auto& [k, v] : result->headers) {
    if (!hop_by_hop(k)) out.headers.emplace_back(k, v);
  }
  out.body = std::move(result->body);
  return out;
}

int HttpUpstream::stream(const ProxyRequest& request,
                         const std::function<bool(const char*, std::size_t)>& sink,
                         std::vector<std::pair<std::string, std::string>>* headers) {
  // Watches are long-lived; use a dedicated connection without a read timeout.
  std::string base = url_.scheme + "://" + url_.host + ":" + std::to_string(url_.port);
  std::unique_ptr<httplib::Client> client =
      config_.upstream_client_cert.empty()
          ? std::make_unique<httplib::Client>(base)
          : std::make_unique<httplib::Client>(base, config_.upstream_client_cert,
                                              config_.upstream_client_key);
  if (!config_.upstream_ca.empty()) client->set_ca_cert_path(config_.upstream_ca);
  client->set_read_timeout(24 * 3600, 0);
  int status = 0;
  auto result = client->Get(
      target_of(url_, request), forward_headers(request),
      [&](const httplib::Response& r) {
        status = r.status;
        if (headers) {
          for (const auto& [k, v] : r.headers) {
            if (!hop_by_hop(k)) headers->emplace_back(k, v);
          }
        }
        return true;
      },
      [&](const char* data, std::size_t n) { return sink(data, n); });
  if (!result && status == 0) {
    throw Error(ErrorCode::kIoError, httplib::to_string(result.error()));
  }
  return status;
}

struct ProxyServer::Impl {
  std::unique_ptr<httplib::Server> server;
  int port = -1;
};

ProxyServer::ProxyServer(ProxyConfig config)
    : impl_(std::make_unique<Impl>()), config_(std::move(config)) {
  auto validator = std::make_shared<const Validator>(load_validator(config_.validator_path));
  if (validator->kinds.empty()) {
    throw Error(ErrorCode::kInvalidSchema, "validator has no kinds: " + config_.validator_path);
  }
  audit_ = std::make_unique<AuditLog>(config_.audit_log);
  upstream_ = std::make_unique<HttpUpstream>(config_);
  core_ = std::make_unique<ProxyCore>(config_, std::move(validator), *upstream_, audit_.get());

  if (!config_.tls_cert.empty()) {
    auto ssl = std::make_unique<httplib::SSLServer>(config_.tls_cert.c_str(),
                                                    config_.tls_key.c_str());
    if (!ssl->is_valid()) {
      throw Error(ErrorCode::kConfigError, "cannot load TLS certificate " + config_.tls_cert);
    }
    impl_->server = std::move(ssl);
  } else {
    impl_->server = std::make_unique<httplib::Server>();
  }
  auto& srv = *impl_->server;
  const std::size_t threads = static_cast<std::size_t>(config_.threads);
  srv.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  srv.set_payload_max_length(config_.body_limit);
  srv.set_read_timeout(30, 0);
  srv.set_tcp_nodelay(true);
  srv.set_keep_alive_max_count(1000);

  srv.set_pre_routing_handler([](const httplib::Request&, httplib::Response&) {
    t_routed = false;
    return httplib::Server::HandlerResponse::Unhandled;
  });

  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    t_routed = true;
    ProxyRequest pr = to_proxy_request(req);
    if (pr.is_watch()) {
      AuditRecord record;
      record.timestamp = rfc3339_now();
      record.client = pr.client;
      record.method = pr.method;
      record.path = pr.path;
      record.decision = "allow";
      auto start = std::chrono::steady_clock::now();
      ProxyCore* core = core_.get();
      HttpUpstream* up = upstream_.get();
      res.status = 200;
      res.set_chunked_content_provider(
          "application/json",
          [pr, record, start, core, up](std::size_t, httplib::DataSink& sink) mutable {
            try {
              record.upstream_status = up->stream(
                  pr, [&](const char* d, std::size_t n) { return sink.write(d, n); }, nullptr);
            } catch (const std::exception& e) {
              record.decision = "error";
              record.reason = "UpstreamUnavailable";
            }
            record.status = 200;
            record.elapsed_us = std::chrono::duration_cast<std::chrono::microseconds>(
                                    std::chrono::steady_clock::now() - start)
                                    .count();
            if (core->audit()) core->audit()->emit(record);
            sink.done();
            return true;
          });
      return;
    }
    write_response(core_->handle(pr), res);
  };
  srv.Get(".*", handler);
  srv.Post(".*", handler);
  srv.Put(".*", handler);
  srv.Patch(".*", handler);
  srv.Delete(".*", handler);
  srv.Options(".*", handler);

  // Errors raised by httplib itself (413 over the body limit, 400 on a
  // malformed request) bypass the handler; give them a Status body and audit.
  srv.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (t_routed) return httplib::Server::HandlerResponse::Unhandled;
    t_routed = true;
    std::string reason = res.status == 413 ? "RequestEntityTooLarge" : "BadRequest";
    std::string message = res.status == 413
                              ? "request body exceeds " + std::to_string(config_.body_limit) +
                                    " bytes"
                              : "malformed request";
    res.set_content(status_body(res.status, reason, message), "application/json");
    AuditRecord record;
    record.timestamp = rfc3339_now();
    record.client = req.remote_addr + ":" + std::to_string(req.remote_port);
    record.method = req.method;
    auto q = req.target.find('?');
    record.path = req.target.substr(0, q);
    record.decision = "error";
    record.reason = reason;
    record.status = res.status;
    if (audit_) audit_->emit(record);
    return httplib::Server::HandlerResponse::Handled;
  });
  srv.set_logger([](const httplib::Request&, const httplib::Response&) { t_routed = false; });
}

ProxyServer::~ProxyServer() { stop(); }

int ProxyServer::bind() {
  auto& srv = *impl_->server;
  if (config_.listen_port == 0) {
    impl_->port = srv.bind_to_any_port(config_.listen_address);
  } else if (srv.bind_to_port(config_.listen_address, config_.listen_port)) {
    impl_->port = config_.listen_port;
  } else {
    impl_->port = -1;
  }
  if (impl_->port < 0) {
    throw Error(ErrorCode::kIoError, "cannot bind " + config_.listen_address + ":" +
                                         std::to_string(config_.listen_port));
  }
  return impl_->port;
}

void ProxyServer::serve() { impl_->server->listen_after_bind(); }

void ProxyServer::stop() {
  if (impl_ && impl_->server && impl_->server->is_running()) impl_->server->stop();
}

bool ProxyServer::reload() {
  std::string error;
  if (core_->reload(config_.validator_path, &error)) {
    std::fprintf(stderr, "kubefence: reloaded %s\n", config_.validator_path.c_str());
    return true;
  }
  std::fprintf(stderr, "kubefence: reload failed, keeping previous policy: %s\n",
               error.c_str());
  return false;
}

int run_proxy(const ProxyConfig& config) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGHUP);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  ProxyServer server(config);
  int port = server.bind();
  std::fprintf(stderr, "kubefence: listening on %s:%d -> %s\n", config.listen_address.c_str(),
               port, config.upstream_url.c_str());
  std::thread worker([&] { server.serve(); });
  for (;;) {
    int sig = 0;
    if (sigwait(&set, &sig) != 0) continue;
    if (sig == SIGHUP) {
      server.reload();
      continue;
    }
    break;
  }
  server.stop();
  worker.join();
  return 0;
}

}  // namespace kubefence

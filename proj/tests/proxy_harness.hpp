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

// Mock upstream and an in-process proxy for end-to-end tests.

#pragma once

#include <httplib.h>

#include <sys/socket.h>
#include <netinet/in.h>
#include <unistd.h>

#include <memory>
#include <mutex>
#include <thread>

#include "kubefence/proxy.hpp"
#include "support.hpp"

namespace kftest {

using namespace kubefence;

// Records request bodies and answers 201 with a fixed body.
class MockUpstream {
 public:
  MockUpstream() {
    srv_.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard<std::mutex> lock(mu_);
        bodies_.push_back(req.body);
      }
      res.status = 201;
      res.set_content("{\"created\":true}", "application/json");
    });
    srv_.Get(".*", [](const httplib::Request& req, httplib::Response& res) {
      if (req.has_param("watch")) {
        res.set_chunked_content_provider("application/json",
                                         [](std::size_t, httplib::DataSink& sink) {
                                           sink.write("{\"a\":1}\n", 8);
                                           sink.write("{\"b\":2}\n", 8);
                                           sink.done();
                                           return true;
                                         });
        return;
      }
      res.set_content("{\"items\":[]}", "application/json");
    });
    srv_.new_task_queue = [] { return new httplib::ThreadPool(64); };
    srv_.set_tcp_nodelay(true);
    srv_.set_keep_alive_max_count(1000);
    port_ = srv_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { srv_.listen_after_bind(); });
    srv_.wait_until_ready();
  }
  ~MockUpstream() {
    srv_.stop();
    thread_.join();
  }
  int port() const { return port_; }
  std::vector<std::string> bodies() {
    std::lock_guard<std::mutex> lock(mu_);
    return bodies_;
  }

 private:
  httplib::Server srv_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::vector<std::string> bodies_;
};

// A proxy in front of `upstream_port`, serving on a background thread.
class RunningProxy {
 public:
  RunningProxy(const kftest::TempDir& dir, int upstream_port, std::size_t body_limit = 3 << 20) {
    validator_ = dir.path() / "mlflow.validator.yaml";
    kftest::write_file(validator_, serialize_validator(kftest::generated("mlflow-mini").validator));
    ProxyConfig c;
    c.listen_port = 0;
    c.upstream_url = "http://127.0.0.1:" + std::to_string(upstream_port);
    c.validator_path = validator_.string();
    c.audit_log = (dir.path() / "audit.jsonl").string();
    c.body_limit = body_limit;
    c.threads = 64;
    server_ = std::make_unique<ProxyServer>(c);
    port_ = server_->bind();
    thread_ = std::thread([this] { server_->serve(); });
  }
  ~RunningProxy() {
    server_->stop();
    thread_.join();
  }
  int port() const { return port_; }

 private:
  std::filesystem::path validator_;
  std::unique_ptr<ProxyServer> server_;
  std::thread thread_;
  int port_ = 0;
};

// A loopback port with nothing listening on it.
inline int dead_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

}  // namespace kftest

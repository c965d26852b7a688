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

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <ctime>

#include <json.hpp>

#include "kubefence/proxy.hpp"

namespace kubefence {

std::string rfc3339_now() {
  auto now = std::chrono::system_clock::now();
  auto us = std::chrono::duration_cast<std::chrono::microseconds>(now.time_since_epoch())
                .count();
  std::time_t secs = static_cast<std::time_t>(us / 1000000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::size_t n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buf + n, sizeof buf - n, ".%06lldZ", static_cast<long long>(us % 1000000));
  return buf;
}

std::string AuditRecord::to_json() const {
  nlohmann::ordered_json j;
  j["time"] = timestamp;
  j["client"] = client;
  j["method"] = method;
  j["path"] = path;
  if (!kind.empty()) j["kind"] = kind;
  j["decision"] = decision;
  if (!deny_path.empty()) j["deny_path"] = deny_path;
  if (!reason.empty()) j["reason"] = reason;
  j["status"] = status;
  if (upstream_status != 0) j["upstream_status"] = upstream_status;
  j["elapsed_us"] = elapsed_us;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

AuditLog::AuditLog(const std::string& path) : path_(path) {
  if (path.empty()) return;
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0640);
  if (fd_ < 0) {
    std::fprintf(stderr, "kubefence: cannot open audit log %s: %s\n", path.c_str(),
                 std::strerror(errno));
  }
}

AuditLog::~AuditLog() {
  if (fd_ >= 0) ::close(fd_);
}

void AuditLog::emit(const AuditRecord& record) {
  std::string line = record.to_json();
  line += '\n';
  std::lock_guard<std::mutex> lock(mu_);
  if (fd_ < 0) {
    if (!path_.empty()) {
      std::fprintf(stderr, "kubefence: audit log unavailable, dropped: %s", line.c_str());
    }
    return;
  }
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      std::fprintf(stderr, "kubefence: audit write failed: %s\n", std::strerror(errno));
      return;
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

}  // namespace kubefence

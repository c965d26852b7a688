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

#include <json.hpp>

#include "kubefence/proxy.hpp"

namespace kubefence {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string find_header(const std::vector<std::pair<std::string, std::string>>& headers,
                        std::string_view name) {
  for (const auto& [k, v] : headers) {
    if (iequals(k, name)) return v;
  }
  return {};
}

std::string_view status_reason(int code) {
  switch (code) {
    case 400: return "BadRequest";
    case 403: return "Forbidden";
    case 413: return "RequestEntityTooLarge";
    case 415: return "UnsupportedMediaType";
    case 502: return "BadGateway";
    default: return "InternalError";
  }
}

ProxyResponse status_response(int code, std::string_view message, std::string_view kind = {},
                              const std::optional<Violation>& cause = std::nullopt) {
  ProxyResponse r;
  r.status = code;
  r.headers.emplace_back("Content-Type", "application/json");
  r.body = status_body(code, status_reason(code), message, kind, cause);
  return r;
}

DocNode parse_body(const std::string& body, const std::string& content_type) {
  std::string ct = lower(content_type);
  if (body.empty()) throw Error(ErrorCode::kParseError, "empty request body");
  if (ct.find("yaml") != std::string::npos) return parse_document(body, DocFormat::kYaml);
  return parse_document(body, DocFormat::kJson);
}

std::string deny_message(const Verdict& v) {
  std::string what = v.kind.empty() ? std::string("request") : v.kind;
  return what + " denied by policy: " + std::string(violation_reason_name(v.reason)) +
         " at " + v.path.str() + ": " + v.message;
}

}  // namespace

std::string ProxyRequest::header(std::string_view name) const {
  return find_header(headers, name);
}

bool ProxyRequest::is_watch() const {
  if (method != "GET") return false;
  std::size_t i = 0;
  while (i <= query.size()) {
    auto j = query.find('&', i);
    if (j == std::string::npos) j = query.size();
    std::string_view kv(query.data() + i, j - i);
    if (kv == "watch=true" || kv == "watch=1" || kv == "watch") return true;
    i = j + 1;
  }
  return path.find("/watch/") != std::string::npos;
}

std::string ProxyResponse::header(std::string_view name) const {
  return find_header(headers, name);
}

std::string status_body(int code, std::string_view reason, std::string_view message,
                        std::string_view kind, const std::optional<Violation>& cause) {
  nlohmann::ordered_json j;
  j["kind"] = "Status";
  j["apiVersion"] = "v1";
  j["metadata"] = nlohmann::ordered_json::object();
  j["status"] = "Failure";
  j["message"] = std::string(message);
  j["reason"] = std::string(reason);
  if (!kind.empty() || cause) {
    nlohmann::ordered_json details;
    if (!kind.empty()) details["kind"] = std::string(kind);
    if (cause) {
      details["causes"] = nlohmann::ordered_json::array(
          {{{"reason", std::string(violation_reason_name(cause->reason))},
            {"message", cause->message},
            {"field", cause->path.str()}}});
    }
    j["details"] = std::move(details);
  }
  j["code"] = code;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

ProxyCore::ProxyCore(ProxyConfig config, std::shared_ptr<const Validator> validator,
                     Upstream& upstream, AuditLog* audit)
    : config_(std::move(config)),
      validator_(std::move(validator)),
      upstream_(upstream),
      audit_(audit) {}

std::shared_ptr<const Validator> ProxyCore::validator() const {
  std::lock_guard<std::mutex> lock(policy_mu_);
  return validator_;
}

void ProxyCore::swap_validator(std::shared_ptr<const Validator> next) {
  std::lock_guard<std::mutex> lock(policy_mu_);
  validator_.swap(next);
}

bool ProxyCore::reload(const std::filesystem::path& path, std::string* error) {
  try {
    auto next = std::make_shared<const Validator>(load_validator(path));
    if (next->kinds.empty()) throw Error(ErrorCode::kInvalidSchema, "validator has no kinds");
    swap_validator(std::move(next));
    return true;
  } catch (const std::exception& e) {
    if (error) *error = e.what();
    return false;
  }
}

std::string ProxyCore::kind_for_resource(const std::string& resource) const {
  std::string r = lower(resource);
  if (auto it = config_.resource_kinds.find(r); it != config_.resource_kinds.end()) {
    return it->second;
  }
  const auto& table = builtin_resource_kinds();
  if (auto it = table.find(r); it != table.end()) return it->second;
  return {};
}

std::optional<ProxyResponse> ProxyCore::check(const ProxyRequest& request,
                                              AuditRecord& record) const {
  const std::string& method = request.method;
  if (config_.passthrough_verbs.count(method) || request.is_watch()) {
    record.decision = "allow";
    return std::nullopt;
  }
  auto deny = [&](const Verdict& v) {
    record.decision = "deny";
    record.kind = v.kind;
    record.deny_path = v.path.str();
    record.reason = std::string(violation_reason_name(v.reason));
    Violation cause{v.path, v.reason, v.message};
    return status_response(403, deny_message(v), v.kind, cause);
  };
  auto fail = [&](int code, const std::string& reason, const std::string& message) {
    record.decision = code == 403 ? "deny" : "error";
    record.reason = reason;
    return status_response(code, message, record.kind);
  };

  if (method != "POST" && method != "PUT" && method != "PATCH") {
    return fail(403, "MethodNotAllowed", "method " + method + " is not permitted by policy");
  }
  std::shared_ptr<const Validator> policy = validator();
  if (!policy) return fail(403, "NoPolicy", "no policy loaded");

  std::string content_type = request.header("Content-Type");
  std::optional<PatchType> patch_type;
  std::string url_kind;
  if (method == "PATCH") {
    auto api = parse_api_path(request.path);
    if (api) {
      if (api->subresource.empty() || api->subresource == "status") {
        url_kind = kind_for_resource(api->resource);
      }
    }
    record.kind = url_kind;
    if (lower(content_type).rfind("application/apply-patch", 0) != 0) {
      try {
        patch_type = patch_type_from_content_type(content_type);
      } catch (const Error& e) {
        return fail(415, "UnsupportedPatchType",
                    "unsupported patch content type '" + content_type + "'");
      }
    }
  }

  DocNode body;
  try {
    body = parse_body(request.body, content_type);
  } catch (const Error& e) {
    return fail(400, std::string(error_code_name(e.code())),
                "request body could not be parsed: " + e.detail());
  }

  Verdict verdict;
  try {
    if (patch_type) {
      if (url_kind.empty()) {
        verdict = Verdict::deny("", Violation{FieldPath::parse("kind"),
                                              ViolationReason::kUnknownKind,
                                              "cannot infer kind from " + request.path});
      } else {
        verdict = validate_patch(body, *patch_type, url_kind, *policy);
      }
    } else {
      verdict = validate_object(body, *policy);
      if (!url_kind.empty() && verdict.allowed && verdict.kind != url_kind) {
        verdict = Verdict::deny(verdict.kind,
                                Violation{FieldPath::parse("kind"),
                                          ViolationReason::kUnknownKind,
                                          "body kind does not match " + url_kind});
      }
    }
  } catch (const std::exception& e) {
    return fail(403, "ValidationError", std::string("validation failed: ") + e.what());
  }
  record.kind = verdict.kind.empty() ? record.kind : verdict.kind;
  if (!verdict.allowed) return deny(verdict);
  record.decision = "allow";
  return std::nullopt;
}

ProxyResponse ProxyCore::handle(const ProxyRequest& request) {
  auto start = std::chrono::steady_clock::now();
  AuditRecord record;
  record.timestamp = rfc3339_now();
  record.client = request.client;
  record.method = request.method;
  record.path = request.path;

  ProxyResponse response;
  if (auto rejected = check(request, record)) {
    response = std::move(*rejected);
  } else {
    try {
      response = upstream_.forward(request);
      record.upstream_status = response.status;
    } catch (const std::exception& e) {
      record.decision = "error";
      record.reason = "UpstreamUnavailable";
      response = status_response(502, std::string("upstream request failed: ") + e.what(),
                                 record.kind);
    }
  }
  record.status = response.status;
  record.elapsed_us = std::chrono::duration_cast<std::chrono::microseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  if (audit_) audit_->emit(record);
  return response;
}

}  // namespace kubefence

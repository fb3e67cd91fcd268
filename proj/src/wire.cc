// Copyright 2026 The Codemix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "codemix/wire.h"

#include <thread>

#include "codemix/error.h"
#include "httplib.h"

namespace codemix::wire {

namespace {

struct SplitUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

SplitUrl Split(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto slash = base_url.find('/', host_start);
  if (slash == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, slash), prefix};
}

}  // namespace

nlohmann::json PostJson(const std::string& base_url, const std::string& path,
                        const nlohmann::json& body, const RetryPolicy& policy) {
  const auto url = Split(base_url);
  const std::string payload = body.dump();
  std::string last_error;
  auto backoff = policy.initial_backoff;
  for (int attempt = 0; attempt <= policy.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(policy.timeout);
    client.set_read_timeout(policy.timeout);
    client.set_write_timeout(policy.timeout);
    auto res = client.Post(url.path_prefix + path, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      parsed = nullptr;
    }
    if (res->status == 200) {
      if (parsed.is_null()) {
        throw OracleError(path + ": unparsable response body");
      }
      return parsed;
    }
    std::string message = "HTTP " + std::to_string(res->status);
    if (parsed.is_object() && parsed.contains("error")) {
      message += ": " + parsed["error"].dump();
    }
    if (res->status < 500) throw OracleError(path + ": " + message);
    last_error = message;
  }
  throw OracleError(path + ": giving up after " + std::to_string(policy.retries + 1) +
                    " attempts (" + last_error + ")");
}

}  // namespace codemix::wire

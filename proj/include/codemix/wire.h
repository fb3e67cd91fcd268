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

#ifndef CODEMIX_WIRE_H_
#define CODEMIX_WIRE_H_

#include <chrono>
#include <string>

#include "json.hpp"

// Client side of the JSON-over-HTTP envelope shared by the remote loss,
// translation and alignment services.
namespace codemix::wire {

struct RetryPolicy {
  int retries = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::seconds timeout{60};
};

// POSTs `body` to base_url + path. Retries transport failures and 5xx
// responses with exponential backoff; throws an oracle error when retries
// are exhausted, on 4xx, or on an unparsable response. Responses carrying
// {"error": ...} surface that message.
nlohmann::json PostJson(const std::string& base_url, const std::string& path,
                        const nlohmann::json& body, const RetryPolicy& policy = {});

}  // namespace codemix::wire

#endif  // CODEMIX_WIRE_H_

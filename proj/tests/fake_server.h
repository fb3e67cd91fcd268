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

#ifndef CODEMIX_TESTS_FAKE_SERVER_H_
#define CODEMIX_TESTS_FAKE_SERVER_H_

#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

namespace codemix::testing {

// In-process HTTP double. Handlers see the parsed request body and return
// (status, body). Every request body is recorded.
class FakeServer {
 public:
  using Handler = std::function<std::pair<int, std::string>(const nlohmann::json&)>;

  FakeServer() = default;
  ~FakeServer() { Stop(); }

  void On(const std::string& path, Handler handler) {
    server_.Post(path, [this, path, handler](const httplib::Request& req,
                                             httplib::Response& res) {
      nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
      {
        std::lock_guard lock(mu_);
        requests_.push_back({path, req.body});
      }
      const auto [status, out] = handler(body);
      res.status = status;
      res.set_content(out, "application/json");
    });
  }

  void Start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void Stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  struct Recorded {
    std::string path;
    std::string body;
  };
  std::vector<Recorded> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::vector<Recorded> requests_;
};

}  // namespace codemix::testing

#endif  // CODEMIX_TESTS_FAKE_SERVER_H_

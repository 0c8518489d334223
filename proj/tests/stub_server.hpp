// Copyright 2026 The Toolsmith Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace toolsmith::testing
{

// Chat-completions endpoint on 127.0.0.1 answering with `reply(request_json)`.
class StubServer
{
public:
  using Reply = std::function<std::string(const nlohmann::json &)>;

  explicit StubServer(Reply reply, int fail_first = 0) : reply_(std::move(reply)), fail_first_(fail_first)
  {
    server_.Post("/v1/chat/completions", [this](const httplib::Request & req, httplib::Response & res) {
      ++requests_;
      {
        std::lock_guard<std::mutex> lock(mutex_);
        last_auth_ = req.get_header_value("Authorization");
      }
      if (fail_first_-- > 0) {
        res.status = 503;
        res.set_content("busy", "text/plain");
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json out{
        {"choices", {{{"message", {{"role", "assistant"}, {"content", reply_(body)}}}}}},
        {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}},
      };
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer()
  {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  int requests() const { return requests_; }
  std::string last_auth() const
  {
    std::lock_guard<std::mutex> lock(mutex_);
    return last_auth_;
  }

private:
  Reply reply_;
  std::atomic<int> fail_first_;
  std::atomic<int> requests_{0};
  mutable std::mutex mutex_;
  std::string last_auth_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace toolsmith::testing

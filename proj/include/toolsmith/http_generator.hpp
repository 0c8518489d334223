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

#include <optional>
#include <string>

#include "json.hpp"

#include "toolsmith/designer_client.hpp"

namespace toolsmith
{

struct HttpConfig
{
  /// Full chat-completions URL, e.g. https://host/v1/chat/completions.
  std::string url;
  std::string model;
  /// Environment variable holding the bearer token; unset or empty means no auth header.
  std::string api_key_env = "TOOLSMITH_API_KEY";
  double timeout_s = 120.0;
  int retries = 1;
  std::optional<double> temperature;
};

/// Fills url/model/api_key_env from TOOLSMITH_ENDPOINT, TOOLSMITH_MODEL and
/// TOOLSMITH_API_KEY_ENV when set.
HttpConfig http_config_from_env(HttpConfig base = {});
HttpConfig http_config_from_json(const nlohmann::json & j, HttpConfig base = {});

struct Endpoint
{
  std::string scheme_host_port;
  std::string path;
};

/// Throws std::invalid_argument for URLs without an http(s) scheme.
Endpoint split_url(const std::string & url);

/// OpenAI-style chat request; the image, when present, goes in as a PNG data URL.
nlohmann::json build_request(const HttpConfig & config, const PromptBundle & bundle);
/// choices[0].message.content, as text. Throws GeneratorError.
Completion read_completion(const nlohmann::json & response);

class HttpGenerator : public GeneratorBackend
{
public:
  explicit HttpGenerator(HttpConfig config);

  std::string identity() const override;
  Completion complete(const PromptBundle & bundle, int agent_id) const override;

  const HttpConfig & config() const { return config_; }

private:
  HttpConfig config_;
};

}  // namespace toolsmith

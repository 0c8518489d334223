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

#include "toolsmith/http_generator.hpp"

#include <chrono>
#include <cstdlib>
#include <regex>

#include "httplib.h"

#include "toolsmith/render.hpp"

namespace toolsmith
{
namespace
{

std::optional<std::string> env(const char * name)
{
  const char * v = std::getenv(name);
  if (v == nullptr || *v == '\0') {
    return std::nullopt;
  }
  return std::string(v);
}

bool retryable(int status)
{
  return status == 429 || status >= 500;
}

}  // namespace

HttpConfig http_config_from_env(HttpConfig base)
{
  if (auto v = env("TOOLSMITH_ENDPOINT")) {
    base.url = *v;
  }
  if (auto v = env("TOOLSMITH_MODEL")) {
    base.model = *v;
  }
  if (auto v = env("TOOLSMITH_API_KEY_ENV")) {
    base.api_key_env = *v;
  }
  return base;
}

HttpConfig http_config_from_json(const nlohmann::json & j, HttpConfig base)
{
  for (const auto & [key, value] : j.items()) {
    if (key == "url") {
      base.url = value.get<std::string>();
    } else if (key == "model") {
      base.model = value.get<std::string>();
    } else if (key == "api_key_env") {
      base.api_key_env = value.get<std::string>();
    } else if (key == "timeout_s") {
      base.timeout_s = value.get<double>();
    } else if (key == "retries") {
      base.retries = value.get<int>();
    } else if (key == "temperature") {
      base.temperature = value.get<double>();
    } else {
      throw std::invalid_argument("unknown http setting '" + key + "'");
    }
  }
  return base;
}

Endpoint split_url(const std::string & url)
{
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw std::invalid_argument("endpoint URL must start with http:// or https://: '" + url + "'");
  }
  return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

nlohmann::json build_request(const HttpConfig & config, const PromptBundle & bundle)
{
  nlohmann::json content;
  if (bundle.image) {
    content = nlohmann::json::array({
      {{"type", "text"}, {"text", bundle.text()}},
      {{"type", "image_url"}, {"image_url", {{"url", "data:image/png;base64," + base64_encode(*bundle.image)}}}},
    });
  } else {
    content = bundle.text();
  }
  nlohmann::json body{
    {"model", config.model},
    {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})},
  };
  if (config.temperature) {
    body["temperature"] = *config.temperature;
  }
  return body;
}

Completion read_completion(const nlohmann::json & response)
{
  try {
    const auto & message = response.at("choices").at(0).at("message");
    Completion c;
    const auto & content = message.at("content");
    if (content.is_string()) {
      c.text = content.get<std::string>();
    } else if (content.is_array()) {
      for (const auto & part : content) {
        if (part.contains("text")) {
          c.text += part.at("text").get<std::string>();
        }
      }
    } else {
      throw GeneratorError("completion has no text content");
    }
    if (response.contains("usage") && response.at("usage").is_object()) {
      c.usage.prompt_tokens = response.at("usage").value("prompt_tokens", 0L);
      c.usage.completion_tokens = response.at("usage").value("completion_tokens", 0L);
    }
    return c;
  } catch (const nlohmann::json::exception & e) {
    throw GeneratorError(std::string("unexpected completion payload: ") + e.what());
  }
}

HttpGenerator::HttpGenerator(HttpConfig config) : config_(std::move(config))
{
  split_url(config_.url);
  if (config_.timeout_s <= 0.0 || config_.retries < 0) {
    throw std::invalid_argument("http timeout must be positive and retries non-negative");
  }
}

std::string HttpGenerator::identity() const
{
  return "http:" + config_.model + "@" + config_.url;
}

Completion HttpGenerator::complete(const PromptBundle & bundle, int /*agent_id*/) const
{
  const Endpoint ep = split_url(config_.url);
  httplib::Client client(ep.scheme_host_port);
  const auto secs = static_cast<time_t>(config_.timeout_s);
  const auto usecs = static_cast<time_t>((config_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (auto key = env(config_.api_key_env.c_str())) {
    headers.emplace("Authorization", "Bearer " + *key);
  }
  const std::string body = build_request(config_, bundle).dump();

  std::string last_error;
  const auto start = std::chrono::steady_clock::now();
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    auto res = client.Post(ep.path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      if (retryable(res->status)) {
        continue;
      }
      throw GeneratorError(last_error);
    }
    nlohmann::json payload;
    try {
      payload = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception & e) {
      throw GeneratorError(std::string("completion is not JSON: ") + e.what());
    }
    Completion c = read_completion(payload);
    c.usage.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return c;
  }
  throw GeneratorError(last_error);
}

}  // namespace toolsmith

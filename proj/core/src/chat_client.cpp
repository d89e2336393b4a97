#include "srkit/chat_client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace srkit {

namespace {

using json = nlohmann::json;

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

bool retryable(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

ChatConfig ChatConfig::from_environment() {
  ChatConfig c;
  c.base_url = env_or_empty(kChatBaseUrlEnv);
  c.model = env_or_empty(kChatModelEnv);
  c.api_key = env_or_empty(kChatApiKeyEnv);
  if (c.base_url.empty()) throw ChatError(std::string(kChatBaseUrlEnv) + " is not set");
  if (c.model.empty()) throw ChatError(std::string(kChatModelEnv) + " is not set");
  return c;
}

std::string chat_request_body(std::string_view model, std::span<const ChatMessage> messages, double temperature) {
  json body;
  body["model"] = model;
  body["messages"] = json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  body["temperature"] = temperature;
  return body.dump();
}

std::string chat_response_content(std::string_view body) {
  json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) throw ChatError("chat response is not valid JSON");
  if (!parsed.is_object() || !parsed.contains("choices")) throw ChatError("chat response has no 'choices'");
  const json& choices = parsed["choices"];
  if (!choices.is_array() || choices.empty()) throw ChatError("chat response has empty 'choices'");
  const json& first = choices.front();
  if (!first.contains("message") || !first["message"].contains("content") || !first["message"]["content"].is_string()) {
    throw ChatError("chat response has no choices[0].message.content");
  }
  return first["message"]["content"].get<std::string>();
}

ChatClient::ChatClient(ChatConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.base_url.find("://");
  if (scheme_end == std::string::npos) throw ChatError("base URL must start with http:// or https://");
  const auto path_start = config_.base_url.find('/', scheme_end + 3);
  origin_ = config_.base_url.substr(0, path_start);
  path_ = path_start == std::string::npos ? std::string() : config_.base_url.substr(path_start);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
}

std::string ChatClient::complete(std::span<const ChatMessage> messages, double temperature) {
  const std::string body = chat_request_body(config_.model, messages, temperature);
  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_error;
  int last_status = 0;
  for (std::size_t attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.backoff_base * (1LL << (attempt - 1)));
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      last_status = 0;
      continue;
    }
    if (res->status >= 200 && res->status < 300) return chat_response_content(res->body);
    last_status = res->status;
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
    if (!retryable(res->status)) break;
  }
  throw ChatError("chat completion failed: " + last_error, last_status);
}

}  // namespace srkit

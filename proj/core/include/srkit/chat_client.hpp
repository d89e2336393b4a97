#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srkit {

struct ChatMessage {
  std::string role;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// Anything that can answer a chat-completions style request.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(std::span<const ChatMessage> messages, double temperature) = 0;
};

class ChatError : public std::runtime_error {
 public:
  ChatError(const std::string& message, int status = 0) : std::runtime_error(message), status_(status) {}
  /// HTTP status, or 0 for transport failures.
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Environment variables read by ChatConfig::from_environment.
inline constexpr const char* kChatBaseUrlEnv = "SRKIT_CHAT_BASE_URL";
inline constexpr const char* kChatModelEnv = "SRKIT_CHAT_MODEL";
inline constexpr const char* kChatApiKeyEnv = "SRKIT_CHAT_API_KEY";

struct ChatConfig {
  /// e.g. "https://api.openai.com/v1"; "/chat/completions" is appended.
  std::string base_url;
  std::string model;
  std::string api_key;
  std::chrono::seconds timeout{120};
  std::size_t max_retries = 3;
  std::chrono::milliseconds backoff_base{1000};

  /// Reads SRKIT_CHAT_BASE_URL, SRKIT_CHAT_MODEL and SRKIT_CHAT_API_KEY. Throws
  /// ChatError when the base URL or model is unset.
  static ChatConfig from_environment();
};

/// JSON body {model, messages: [{role, content}...], temperature}.
std::string chat_request_body(std::string_view model, std::span<const ChatMessage> messages, double temperature);

/// choices[0].message.content of a response body. Throws ChatError if absent.
std::string chat_response_content(std::string_view body);

/// Blocking HTTP(S) client for OpenAI-compatible chat-completions endpoints.
/// Transport errors, 408, 429 and 5xx are retried up to max_retries times with
/// exponential backoff (backoff_base * 2^attempt).
class ChatClient final : public ChatBackend {
 public:
  explicit ChatClient(ChatConfig config);

  std::string complete(std::span<const ChatMessage> messages, double temperature) override;

  const ChatConfig& config() const noexcept { return config_; }

 private:
  ChatConfig config_;
  std::string origin_;
  std::string path_;
};

}  // namespace srkit

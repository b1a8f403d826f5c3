#pragma once

#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "verbatim/completion.hpp"
#include "verbatim/errors.hpp"

namespace verbatim {

inline constexpr const char* kProviderKeyEnv = "VERBATIM_PROVIDER_KEY";

struct HttpProviderConfig {
  std::string base_url;  // scheme://host[:port][/prefix]
  std::string model;
  std::optional<std::string> api_key;
  double timeout_s = 60.0;
};

/// Generic JSON chat endpoint. POSTs to <base_url>/chat:
///
///   {"model": ..., "system": ..., "messages": [{"role": "user", "content": ...}],
///    "attachments": [{"kind": "audio", "uri": ...}]}
///
/// and accepts {"text": ...}, {"output_text": ...} or an OpenAI-style
/// {"choices": [{"message": {"content": ...}}]} body in reply.
class HttpProvider final : public CompletionProvider {
public:
  explicit HttpProvider(HttpProviderConfig cfg) : cfg_(std::move(cfg)) {
    auto scheme = cfg_.base_url.find("://");
    if (scheme == std::string::npos) {
      throw ValidationError("provider.base_url '" + cfg_.base_url + "' has no scheme");
    }
    auto slash = cfg_.base_url.find('/', scheme + 3);
    host_ = cfg_.base_url.substr(0, slash);
    prefix_ = slash == std::string::npos ? "" : cfg_.base_url.substr(slash);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    if (cfg_.model.empty()) throw ValidationError("provider.model is empty");
    if (!(cfg_.timeout_s > 0)) throw ValidationError("provider.timeout_s must be positive");
  }

  // Reads the key from VERBATIM_PROVIDER_KEY when the config has none.
  static HttpProvider from_env(HttpProviderConfig cfg) {
    if (!cfg.api_key) {
      if (const char* key = std::getenv(kProviderKeyEnv); key && *key) cfg.api_key = key;
    }
    return HttpProvider(std::move(cfg));
  }

  std::string name() const override { return "http:" + cfg_.model; }

  static nlohmann::json request_body(const std::string& model, const Prompt& prompt) {
    nlohmann::json body;
    body["model"] = model;
    body["system"] = prompt.system_instruction;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt.user_message}}});
    if (prompt.attachment) {
      body["attachments"] = nlohmann::json::array(
          {{{"kind", prompt.attachment->kind}, {"uri", prompt.attachment->uri}}});
    }
    return body;
  }

  static std::string response_text(const std::string& body) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ProviderError(std::string("provider reply is not JSON: ") + e.what());
    }
    if (j.contains("text") && j["text"].is_string()) return j["text"];
    if (j.contains("output_text") && j["output_text"].is_string()) return j["output_text"];
    if (auto c = j.find("choices"); c != j.end() && c->is_array() && !c->empty()) {
      const auto& msg = (*c)[0].value("message", nlohmann::json::object());
      if (msg.contains("content") && msg["content"].is_string()) return msg["content"];
    }
    throw ProviderError("provider reply has no text field");
  }

  std::string send(const Prompt& prompt) const override {
    httplib::Client client(host_);
    const auto timeout = std::chrono::duration<double>(cfg_.timeout_s);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    httplib::Headers headers;
    if (cfg_.api_key) headers.emplace("Authorization", "Bearer " + *cfg_.api_key);

    auto res = client.Post(prefix_ + "/chat", headers, request_body(cfg_.model, prompt).dump(),
                           "application/json");
    if (!res) throw ProviderError("provider request failed: " + httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403) {
      throw ProviderError("provider rejected credentials (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status < 200 || res->status >= 300) {
      throw ProviderError("provider returned HTTP " + std::to_string(res->status));
    }
    return response_text(res->body);
  }

private:
  HttpProviderConfig cfg_;
  std::string host_;
  std::string prefix_;
};

}  // namespace verbatim

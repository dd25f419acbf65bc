#pragma once

#include "rehearse/llm/chat.hpp"
#include "rehearse/llm/gateway.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace rehearse::llm {

/// OpenAI-style chat-completion client over HTTP(S).
///
/// Request:  POST <endpoint>  {"model": ..., "messages": [{"role","content"}]}
/// Response: {"choices": [{"message": {"role": "assistant", "content": ...}}]}
///
/// The bearer token is read from the environment variable named by
/// ProviderConfig::credential on every call. Endpoints are selected per
/// request by matching the model name against the configured slots.
class HttpChatProvider final : public ChatProvider {
public:
    explicit HttpChatProvider(GatewayConfig config) : config_(std::move(config)) {}

    std::string chat(const ChatRequest& request, std::chrono::milliseconds timeout) override;

    static nlohmann::json encode_request(const ChatRequest& request);
    /// Throws ProviderError(Malformed) when the body lacks choices[0].message.content.
    static std::string decode_response(const std::string& body);

private:
    const ProviderConfig& config_for(const std::string& model) const;

    GatewayConfig config_;
};

}  // namespace rehearse::llm

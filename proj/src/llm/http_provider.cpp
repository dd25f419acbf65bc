#include "rehearse/llm/http_provider.hpp"

#include "rehearse/error.hpp"

#include <httplib.h>

#include <cstdlib>

namespace rehearse::llm {

namespace {

struct SplitUrl {
    std::string base;
    std::string path;
};

SplitUrl split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint needs a scheme: " + endpoint);
    const auto path_begin = endpoint.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_begin), endpoint.substr(path_begin)};
}

}  // namespace

nlohmann::json HttpChatProvider::encode_request(const ChatRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", to_string(message.role)}, {"content", message.content}});
    }
    return {{"model", request.model}, {"messages", std::move(messages)}};
}

std::string HttpChatProvider::decode_response(const std::string& body) {
    nlohmann::json document;
    try {
        document = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
        throw ProviderError(ProviderFailure::Malformed, "response body is not JSON");
    }
    const auto* choices = document.is_object() && document.contains("choices") ? &document["choices"] : nullptr;
    if (!choices || !choices->is_array() || choices->empty()) {
        throw ProviderError(ProviderFailure::Malformed, "response has no choices");
    }
    const auto& first = (*choices)[0];
    if (!first.is_object() || !first.contains("message") || !first["message"].is_object() ||
        !first["message"].contains("content") || !first["message"]["content"].is_string()) {
        throw ProviderError(ProviderFailure::Malformed, "response has no message content");
    }
    return first["message"]["content"].get<std::string>();
}

const ProviderConfig& HttpChatProvider::config_for(const std::string& model) const {
    if (model == config_.feedback.model_name) return config_.feedback;
    return config_.simulation;
}

std::string HttpChatProvider::chat(const ChatRequest& request, std::chrono::milliseconds timeout) {
    const auto& cfg = config_for(request.model);
    const auto url = split_endpoint(cfg.endpoint);

    httplib::Client client(url.base);
    const auto secs = timeout.count() / 1000;
    const auto usecs = (timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    if (!cfg.credential.empty()) {
        const char* secret = std::getenv(cfg.credential.c_str());
        if (secret == nullptr || *secret == '\0') {
            throw ProviderError(ProviderFailure::Rejected,
                                "credential variable " + cfg.credential + " is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + secret);
    }

    const auto started = std::chrono::steady_clock::now();
    const auto result = client.Post(url.path, headers, encode_request(request).dump(), "application/json");
    if (!result) {
        const auto elapsed = std::chrono::steady_clock::now() - started;
        const auto error = result.error();
        if (error == httplib::Error::ConnectionTimeout ||
            (error == httplib::Error::Read && elapsed + std::chrono::milliseconds{50} >= timeout)) {
            throw ProviderError(ProviderFailure::Timeout, "request to " + url.base + " timed out");
        }
        throw ProviderError(ProviderFailure::Transport,
                            "request to " + url.base + " failed: " + httplib::to_string(error));
    }
    const int status = result->status;
    if (status == 408 || status == 429 || status >= 500) {
        throw ProviderError(ProviderFailure::Transport, "provider returned HTTP " + std::to_string(status));
    }
    if (status < 200 || status >= 300) {
        throw ProviderError(ProviderFailure::Rejected, "provider returned HTTP " + std::to_string(status));
    }
    return decode_response(result->body);
}

}  // namespace rehearse::llm

#pragma once

#include "rehearse/llm/chat.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace rehearse::llm {

/// One scripted reply: text, or an injected failure, optionally delayed.
struct MockReply {
    std::optional<std::string> text;
    std::optional<ProviderFailure> failure;
    std::chrono::milliseconds delay{0};
};

/// Reply chosen by matching a regular expression against the content of the
/// last message in the request. `$1`-style references in `response` expand to
/// capture groups.
struct MockRule {
    std::string pattern;
    std::regex compiled;
    std::string response;
};

enum class MockFallback { Echo, Fail };

/// Deterministic provider for offline runs and tests.
///
/// Resolution order for each call:
///   1. the scripted queue, front first;
///   2. the first rule whose pattern is found in the last message;
///   3. the fallback (echo the last message, or fail as Malformed).
///
/// Script file format (JSON):
///   {
///     "responses": ["text", {"error": "transport"}, {"text": "x", "delay_ms": 5}],
///     "rules": [{"match": "question: (.*)$", "response": "Next: $1"}],
///     "fallback": "echo" | "fail"
///   }
class MockProvider final : public ChatProvider {
public:
    MockProvider() = default;

    static std::shared_ptr<MockProvider> from_json(const nlohmann::json& script);
    static std::shared_ptr<MockProvider> from_file(const std::filesystem::path& path);

    void queue_text(std::string text);
    void queue_failure(ProviderFailure failure);
    void queue(MockReply reply);
    void add_rule(std::string pattern, std::string response);
    void set_fallback(MockFallback fallback) { fallback_ = fallback; }

    std::string chat(const ChatRequest& request, std::chrono::milliseconds timeout) override;

    /// Every request received, in arrival order.
    std::vector<ChatRequest> requests() const;
    std::size_t call_count() const;
    std::size_t queued() const;

private:
    mutable std::mutex mutex_;
    std::deque<MockReply> queue_;
    std::vector<MockRule> rules_;
    MockFallback fallback_ = MockFallback::Echo;
    std::vector<ChatRequest> requests_;
};

}  // namespace rehearse::llm

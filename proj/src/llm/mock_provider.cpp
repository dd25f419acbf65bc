#include "rehearse/llm/mock_provider.hpp"

#include "rehearse/error.hpp"

#include <fstream>
#include <thread>

namespace rehearse::llm {

namespace {

ProviderFailure failure_from_string(const std::string& text) {
    if (text == "timeout") return ProviderFailure::Timeout;
    if (text == "transport") return ProviderFailure::Transport;
    if (text == "malformed") return ProviderFailure::Malformed;
    if (text == "rejected") return ProviderFailure::Rejected;
    throw ConfigError("unknown scripted failure: " + text);
}

MockReply reply_from_json(const nlohmann::json& item) {
    MockReply reply;
    if (item.is_string()) {
        reply.text = item.get<std::string>();
        return reply;
    }
    if (!item.is_object()) throw ConfigError("scripted response must be a string or object");
    if (item.contains("error")) reply.failure = failure_from_string(item.at("error").get<std::string>());
    if (item.contains("text")) reply.text = item.at("text").get<std::string>();
    if (!reply.text && !reply.failure) throw ConfigError("scripted response needs text or error");
    reply.delay = std::chrono::milliseconds{item.value("delay_ms", 0)};
    return reply;
}

}  // namespace

std::shared_ptr<MockProvider> MockProvider::from_json(const nlohmann::json& script) {
    auto mock = std::make_shared<MockProvider>();
    try {
        for (const auto& item : script.value("responses", nlohmann::json::array())) {
            mock->queue(reply_from_json(item));
        }
        for (const auto& rule : script.value("rules", nlohmann::json::array())) {
            mock->add_rule(rule.at("match").get<std::string>(), rule.at("response").get<std::string>());
        }
        const auto fallback = script.value("fallback", std::string("echo"));
        if (fallback == "echo") {
            mock->set_fallback(MockFallback::Echo);
        } else if (fallback == "fail") {
            mock->set_fallback(MockFallback::Fail);
        } else {
            throw ConfigError("unknown mock fallback: " + fallback);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed mock script: " + std::string(e.what()));
    }
    return mock;
}

std::shared_ptr<MockProvider> MockProvider::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read mock script " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("mock script is not valid JSON: " + std::string(e.what()));
    }
}

void MockProvider::queue_text(std::string text) {
    MockReply reply;
    reply.text = std::move(text);
    queue(std::move(reply));
}

void MockProvider::queue_failure(ProviderFailure failure) {
    MockReply reply;
    reply.failure = failure;
    queue(std::move(reply));
}

void MockProvider::queue(MockReply reply) {
    std::lock_guard lock(mutex_);
    queue_.push_back(std::move(reply));
}

void MockProvider::add_rule(std::string pattern, std::string response) {
    try {
        std::regex compiled(pattern, std::regex::ECMAScript);
        std::lock_guard lock(mutex_);
        rules_.push_back({std::move(pattern), std::move(compiled), std::move(response)});
    } catch (const std::regex_error& e) {
        throw ConfigError("invalid mock rule pattern '" + pattern + "': " + e.what());
    }
}

std::string MockProvider::chat(const ChatRequest& request, std::chrono::milliseconds timeout) {
    MockReply reply;
    {
        std::lock_guard lock(mutex_);
        requests_.push_back(request);
        const std::string last = request.messages.empty() ? std::string() : request.messages.back().content;
        if (!queue_.empty()) {
            reply = std::move(queue_.front());
            queue_.pop_front();
        } else {
            bool matched = false;
            for (const auto& rule : rules_) {
                std::smatch match;
                if (std::regex_search(last, match, rule.compiled)) {
                    reply.text = match.format(rule.response);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                if (fallback_ == MockFallback::Echo) {
                    reply.text = last;
                } else {
                    reply.failure = ProviderFailure::Malformed;
                }
            }
        }
    }
    if (reply.delay > std::chrono::milliseconds::zero()) {
        if (reply.delay > timeout) {
            std::this_thread::sleep_for(timeout);
            throw ProviderError(ProviderFailure::Timeout, "mock reply exceeded the call timeout");
        }
        std::this_thread::sleep_for(reply.delay);
    }
    if (reply.failure) {
        throw ProviderError(*reply.failure, "scripted " + std::string(to_string(*reply.failure)) + " failure");
    }
    return *reply.text;
}

std::vector<ChatRequest> MockProvider::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

std::size_t MockProvider::call_count() const {
    std::lock_guard lock(mutex_);
    return requests_.size();
}

std::size_t MockProvider::queued() const {
    std::lock_guard lock(mutex_);
    return queue_.size();
}

}  // namespace rehearse::llm

#include "rehearse/llm/gateway.hpp"

#include "rehearse/coverage.hpp"
#include "rehearse/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <condition_variable>
#include <fstream>
#include <mutex>

namespace rehearse::llm {

using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;

std::string_view to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

Role role_from_string(std::string_view text) {
    if (text == "system") return Role::System;
    if (text == "user") return Role::User;
    if (text == "assistant") return Role::Assistant;
    throw InvalidArgument("unknown chat role: " + std::string(text));
}

std::string_view to_string(ProviderFailure failure) {
    switch (failure) {
        case ProviderFailure::Timeout: return "timeout";
        case ProviderFailure::Transport: return "transport";
        case ProviderFailure::Malformed: return "malformed";
        case ProviderFailure::Rejected: return "rejected";
        case ProviderFailure::Cancelled: return "cancelled";
    }
    return "transport";
}

void ProviderConfig::validate() const {
    if (timeout <= milliseconds::zero()) throw ConfigError("provider timeout must be positive");
    if (max_retries < 0 || max_retries > 10) throw ConfigError("max_retries must be within 0..10");
    if (initial_backoff < milliseconds::zero() || max_backoff < initial_backoff) {
        throw ConfigError("backoff bounds are inconsistent");
    }
}

namespace {

ProviderConfig slot_from_json(const nlohmann::json& defaults, const nlohmann::json& slot) {
    nlohmann::json merged = defaults.is_object() ? defaults : nlohmann::json::object();
    if (slot.is_object()) merged.update(slot);
    ProviderConfig config;
    config.endpoint = merged.value("endpoint", "");
    config.model_name = merged.value("model", "");
    config.timeout = milliseconds{merged.value("timeout_ms", 30000)};
    config.max_retries = merged.value("max_retries", 2);
    config.credential = merged.value("credential_env", "");
    config.initial_backoff = milliseconds{merged.value("initial_backoff_ms", 250)};
    config.max_backoff = milliseconds{merged.value("max_backoff_ms", 4000)};
    if (config.model_name.empty()) throw ConfigError("provider slot is missing \"model\"");
    config.validate();
    return config;
}

thread_local std::optional<Clock::time_point> ambient_deadline;

void default_sleep(milliseconds delay, std::stop_token stop) {
    if (delay <= milliseconds::zero()) return;
    std::mutex m;
    std::condition_variable_any cv;
    std::unique_lock lock(m);
    cv.wait_for(lock, stop, delay, [] { return false; });
}

}  // namespace

GatewayConfig GatewayConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read provider config " + path.string());
    nlohmann::json document;
    try {
        document = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("provider config is not valid JSON: " + std::string(e.what()));
    }
    const auto defaults = document.value("defaults", nlohmann::json::object());
    GatewayConfig config;
    try {
        config.simulation = slot_from_json(defaults, document.value("simulation", nlohmann::json{}));
        config.feedback = slot_from_json(defaults, document.value("feedback", nlohmann::json{}));
        config.anti_sycophancy = document.value("anti_sycophancy", false);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("provider config has a wrongly typed field: " + std::string(e.what()));
    }
    return config;
}

GatewayConfig GatewayConfig::for_mock() {
    ProviderConfig mock;
    mock.endpoint = "mock:";
    mock.model_name = "mock";
    mock.timeout = milliseconds{5000};
    mock.max_retries = 2;
    mock.initial_backoff = milliseconds{0};
    mock.max_backoff = milliseconds{0};
    GatewayConfig config;
    config.simulation = mock;
    config.simulation.model_name = "mock-simulation";
    config.feedback = mock;
    config.feedback.model_name = "mock-feedback";
    return config;
}

ScopedDeadline::ScopedDeadline(Clock::time_point deadline) : previous_(ambient_deadline) {
    if (!ambient_deadline || deadline < *ambient_deadline) ambient_deadline = deadline;
}

ScopedDeadline::~ScopedDeadline() { ambient_deadline = previous_; }

std::optional<Clock::time_point> ScopedDeadline::current() { return ambient_deadline; }

Gateway::Gateway(std::shared_ptr<ChatProvider> provider, GatewayConfig config)
    : provider_(std::move(provider)), config_(std::move(config)), sleeper_(default_sleep) {
    if (!provider_) throw ConfigError("gateway needs a provider");
    config_.simulation.validate();
    config_.feedback.validate();
}

std::string Gateway::complete(ModelSlot slot, const std::vector<ChatMessage>& messages,
                              std::stop_token stop) const {
    note_operation("complete");
    if (messages.empty()) throw InvalidArgument("complete() needs at least one message");

    const auto& cfg = config_.slot(slot);
    auto deadline = Clock::now() + cfg.timeout * (cfg.max_retries + 1);
    if (const auto ambient = ScopedDeadline::current(); ambient && *ambient < deadline) {
        deadline = *ambient;
    }

    const ChatRequest request{cfg.model_name, messages};
    int attempts = 0;
    auto backoff = cfg.initial_backoff;
    for (;;) {
        if (stop.stop_requested()) {
            throw ProviderError(ProviderFailure::Cancelled, "call cancelled", attempts);
        }
        const auto remaining = std::chrono::duration_cast<milliseconds>(deadline - Clock::now());
        if (remaining <= milliseconds::zero()) {
            throw ProviderError(ProviderFailure::Timeout,
                                "deadline exceeded after " + std::to_string(attempts) + " attempt(s)",
                                attempts);
        }
        ++attempts;
        try {
            return provider_->chat(request, std::min(cfg.timeout, remaining));
        } catch (const ProviderError& e) {
            if (!e.transient() || attempts > cfg.max_retries) {
                throw ProviderError(e.failure(),
                                    std::string(e.what()) + " (after " + std::to_string(attempts) +
                                        " attempt(s))",
                                    attempts);
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw ProviderError(ProviderFailure::Transport, e.what(), attempts);
        }
        const auto left = std::chrono::duration_cast<milliseconds>(deadline - Clock::now());
        sleeper_(std::clamp(backoff, milliseconds::zero(), std::max(left, milliseconds::zero())), stop);
        backoff = std::min(cfg.max_backoff, backoff * 2);
    }
}

}  // namespace rehearse::llm

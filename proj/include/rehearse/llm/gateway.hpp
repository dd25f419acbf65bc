#pragma once

#include "rehearse/llm/chat.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

namespace rehearse::llm {

struct ProviderConfig {
    std::string endpoint;
    std::string model_name;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;
    /// Name of the environment variable holding the API key. The value is
    /// read at call time and never stored.
    std::string credential;
    std::chrono::milliseconds initial_backoff{250};
    std::chrono::milliseconds max_backoff{4000};

    /// Throws ConfigError.
    void validate() const;
};

/// Which configured model a call goes to.
enum class ModelSlot { Simulation, Feedback };

struct GatewayConfig {
    ProviderConfig simulation;
    ProviderConfig feedback;
    /// Append the anti-sycophancy suffix to dialogic-feedback prompts.
    bool anti_sycophancy = false;

    const ProviderConfig& slot(ModelSlot s) const {
        return s == ModelSlot::Simulation ? simulation : feedback;
    }

    /// Reads the JSON provider-config file (see docs/provider-protocol.md).
    static GatewayConfig load(const std::filesystem::path& path);
    /// Defaults suitable for the mock provider: short timeouts, no backoff.
    static GatewayConfig for_mock();
};

/// Installs a deadline that every Gateway::complete call on this thread
/// honours for the lifetime of the scope. Nested scopes keep the earlier
/// deadline.
class ScopedDeadline {
public:
    explicit ScopedDeadline(std::chrono::steady_clock::time_point deadline);
    explicit ScopedDeadline(std::chrono::milliseconds budget)
        : ScopedDeadline(std::chrono::steady_clock::now() + budget) {}
    ~ScopedDeadline();
    ScopedDeadline(const ScopedDeadline&) = delete;
    ScopedDeadline& operator=(const ScopedDeadline&) = delete;

    static std::optional<std::chrono::steady_clock::time_point> current();

private:
    std::optional<std::chrono::steady_clock::time_point> previous_;
};

/// Retrying front door to a ChatProvider. Stateless per call and safe for
/// concurrent use.
class Gateway {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds, std::stop_token)>;

    Gateway(std::shared_ptr<ChatProvider> provider, GatewayConfig config);

    /// Sends `messages` to the slot's model. Transient failures are retried
    /// up to max_retries times with exponential backoff; the whole call is
    /// bounded by timeout * (max_retries + 1) and any ScopedDeadline.
    /// Throws InvalidArgument for an empty message list, ProviderError
    /// (carrying the attempt count) otherwise.
    std::string complete(ModelSlot slot, const std::vector<ChatMessage>& messages,
                         std::stop_token stop = {}) const;

    const GatewayConfig& config() const { return config_; }

    /// Replaces the backoff sleep; tests use it to record delays.
    void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

private:
    std::shared_ptr<ChatProvider> provider_;
    GatewayConfig config_;
    Sleeper sleeper_;
};

}  // namespace rehearse::llm

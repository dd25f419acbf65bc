#pragma once

#include "rehearse/error.hpp"

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace rehearse::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct ChatMessage {
    Role role = Role::User;
    std::string content;
    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
};

enum class ProviderFailure { Timeout, Transport, Malformed, Rejected, Cancelled };
std::string_view to_string(ProviderFailure failure);

/// Failure talking to a model provider. `attempts` is the number of calls
/// made before giving up (0 when raised by a provider implementation and not
/// yet accounted by the gateway).
class ProviderError : public Error {
public:
    ProviderError(ProviderFailure failure, const std::string& message, int attempts = 0)
        : Error(ErrorCode::provider_error, "ProviderError", message),
          failure_(failure),
          attempts_(attempts) {}

    ProviderFailure failure() const noexcept { return failure_; }
    int attempts() const noexcept { return attempts_; }
    /// Transport failures and timeouts are worth another attempt.
    bool transient() const noexcept {
        return failure_ == ProviderFailure::Transport || failure_ == ProviderFailure::Timeout;
    }

private:
    ProviderFailure failure_;
    int attempts_;
};

/// A chat-completion backend. Implementations must be safe for concurrent use
/// and must give up after `timeout`, throwing ProviderError(Timeout).
class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string chat(const ChatRequest& request, std::chrono::milliseconds timeout) = 0;
};

}  // namespace rehearse::llm

#pragma once

#include "rehearse/annotation/annotation.hpp"
#include "rehearse/llm/gateway.hpp"
#include "rehearse/llm/prompt_template.hpp"
#include "rehearse/time.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rehearse::feedback {

enum class MessageRole { UserQuestion, AssistantFeedback, UserRevision, AssistantAssessment };

std::string_view to_string(MessageRole role);
MessageRole message_role_from_string(std::string_view text);
bool is_user_role(MessageRole role);

struct FeedbackMessage {
    MessageRole role = MessageRole::UserQuestion;
    /// Raw text; for assistant messages exactly what the provider returned.
    std::string text;
    /// Sanitized assistant markup, or escaped user text.
    std::string html_safe;
    Timestamp at{};
    std::optional<std::string> audio_ref;
    friend bool operator==(const FeedbackMessage&, const FeedbackMessage&) = default;
};

enum class ThreadState { Open, Saved };
std::string_view to_string(ThreadState state);
ThreadState thread_state_from_string(std::string_view text);

struct FeedbackThread {
    std::string thread_id;
    std::string annotation_id;
    std::vector<FeedbackMessage> messages;
    ThreadState state = ThreadState::Open;
    /// User message whose reply failed; resent by DialogicFeedback::retry.
    std::optional<FeedbackMessage> pending;

    bool has_feedback() const;
    /// Number of completed (user, assistant) exchanges.
    std::size_t exchanges() const { return messages.size() / 2; }
    /// Number of revisions submitted so far.
    std::size_t revision_count() const;
    friend bool operator==(const FeedbackThread&, const FeedbackThread&) = default;
};

/// The three-step loop around one annotation: ask, revise, re-assess.
/// Stateless; callers serialize calls on a given thread.
class DialogicFeedback {
public:
    DialogicFeedback(const llm::Gateway& gateway, const llm::TemplateSet& templates, Clock& clock)
        : gateway_(gateway), templates_(templates), clock_(clock) {}

    FeedbackThread start_thread(std::string thread_id, const annotation::Annotation& annotation) const;

    /// Appends the question and the provider's reply as one exchange.
    /// Throws WrongState if the thread is saved or has a pending message.
    const FeedbackMessage& ask(FeedbackThread& thread, const annotation::Annotation& annotation,
                               std::string user_text) const;

    /// Throws NoPriorFeedback before the first assistant reply.
    const FeedbackMessage& submit_revision(FeedbackThread& thread,
                                           const annotation::Annotation& annotation,
                                           std::string revised_text,
                                           std::optional<std::string> audio_ref = std::nullopt) const;

    /// Resends the pending user message.
    const FeedbackMessage& retry(FeedbackThread& thread, const annotation::Annotation& annotation) const;

    void save(FeedbackThread& thread) const;

    /// Request for the next reply: the rendered mentor prompt as a system
    /// message, the thread history in order, then `next` as a user message.
    std::vector<llm::ChatMessage> assemble(const FeedbackThread& thread,
                                           const annotation::Annotation& annotation,
                                           const FeedbackMessage& next) const;

private:
    const FeedbackMessage& exchange(FeedbackThread& thread, const annotation::Annotation& annotation,
                                    FeedbackMessage user_message) const;

    const llm::Gateway& gateway_;
    const llm::TemplateSet& templates_;
    Clock& clock_;
};

}  // namespace rehearse::feedback

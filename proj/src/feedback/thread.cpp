#include "rehearse/feedback/thread.hpp"

#include "rehearse/coverage.hpp"
#include "rehearse/error.hpp"
#include "rehearse/feedback/sanitizer.hpp"

#include <algorithm>
#include <cctype>

namespace rehearse::feedback {

std::string_view to_string(MessageRole role) {
    switch (role) {
        case MessageRole::UserQuestion: return "user_question";
        case MessageRole::AssistantFeedback: return "assistant_feedback";
        case MessageRole::UserRevision: return "user_revision";
        case MessageRole::AssistantAssessment: return "assistant_assessment";
    }
    return "user_question";
}

MessageRole message_role_from_string(std::string_view text) {
    if (text == "user_question") return MessageRole::UserQuestion;
    if (text == "assistant_feedback") return MessageRole::AssistantFeedback;
    if (text == "user_revision") return MessageRole::UserRevision;
    if (text == "assistant_assessment") return MessageRole::AssistantAssessment;
    throw InvalidArgument("unknown feedback role: " + std::string(text));
}

bool is_user_role(MessageRole role) {
    return role == MessageRole::UserQuestion || role == MessageRole::UserRevision;
}

std::string_view to_string(ThreadState state) { return state == ThreadState::Open ? "open" : "saved"; }

ThreadState thread_state_from_string(std::string_view text) {
    if (text == "open") return ThreadState::Open;
    if (text == "saved") return ThreadState::Saved;
    throw InvalidArgument("unknown thread state: " + std::string(text));
}

bool FeedbackThread::has_feedback() const {
    return std::any_of(messages.begin(), messages.end(),
                       [](const FeedbackMessage& m) { return m.role == MessageRole::AssistantFeedback; });
}

std::size_t FeedbackThread::revision_count() const {
    return static_cast<std::size_t>(std::count_if(messages.begin(), messages.end(), [](const FeedbackMessage& m) {
        return m.role == MessageRole::UserRevision;
    }));
}

namespace {

bool blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
}

void require_open(const FeedbackThread& thread) {
    if (thread.state != ThreadState::Open) throw WrongState("thread " + thread.thread_id + " is saved");
}

void require_no_pending(const FeedbackThread& thread) {
    if (thread.pending) {
        throw WrongState("thread " + thread.thread_id + " has an unanswered message; retry it first");
    }
}

}  // namespace

FeedbackThread DialogicFeedback::start_thread(std::string thread_id,
                                              const annotation::Annotation& annotation) const {
    note_operation("start_thread");
    FeedbackThread thread;
    thread.thread_id = std::move(thread_id);
    thread.annotation_id = annotation.annotation_id;
    return thread;
}

const FeedbackMessage& DialogicFeedback::ask(FeedbackThread& thread, const annotation::Annotation& annotation,
                                             std::string user_text) const {
    note_operation("ask");
    require_open(thread);
    require_no_pending(thread);
    FeedbackMessage message;
    message.role = MessageRole::UserQuestion;
    message.text = std::move(user_text);
    return exchange(thread, annotation, std::move(message));
}

const FeedbackMessage& DialogicFeedback::submit_revision(FeedbackThread& thread,
                                                         const annotation::Annotation& annotation,
                                                         std::string revised_text,
                                                         std::optional<std::string> audio_ref) const {
    note_operation("submit_revision");
    require_open(thread);
    require_no_pending(thread);
    if (!thread.has_feedback()) {
        throw NoPriorFeedback("thread " + thread.thread_id + " has no feedback to revise against yet");
    }
    FeedbackMessage message;
    message.role = MessageRole::UserRevision;
    message.text = std::move(revised_text);
    message.audio_ref = std::move(audio_ref);
    return exchange(thread, annotation, std::move(message));
}

const FeedbackMessage& DialogicFeedback::retry(FeedbackThread& thread,
                                               const annotation::Annotation& annotation) const {
    require_open(thread);
    if (!thread.pending) throw WrongState("thread " + thread.thread_id + " has nothing to retry");
    FeedbackMessage message = std::move(*thread.pending);
    thread.pending.reset();
    return exchange(thread, annotation, std::move(message));
}

void DialogicFeedback::save(FeedbackThread& thread) const {
    note_operation("save_thread");
    require_open(thread);
    require_no_pending(thread);
    thread.state = ThreadState::Saved;
}

std::vector<llm::ChatMessage> DialogicFeedback::assemble(const FeedbackThread& thread,
                                                         const annotation::Annotation& annotation,
                                                         const FeedbackMessage& next) const {
    std::string system = templates_.get(llm::TemplateName::DialogicFeedback)
                             .render({{"transcript", annotation.excerpt}, {"comment", annotation.self_reflection}});
    if (const auto marker = system.find(llm::kAppendConversationMarker); marker != std::string::npos) {
        system.erase(marker);
    }
    while (!system.empty() && std::isspace(static_cast<unsigned char>(system.back()))) system.pop_back();
    if (gateway_.config().anti_sycophancy && templates_.anti_sycophancy_suffix()) {
        std::string suffix = *templates_.anti_sycophancy_suffix();
        while (!suffix.empty() && std::isspace(static_cast<unsigned char>(suffix.back()))) suffix.pop_back();
        system += "\n\n" + suffix;
    }

    std::vector<llm::ChatMessage> messages;
    messages.reserve(thread.messages.size() + 2);
    messages.push_back({llm::Role::System, std::move(system)});
    for (const auto& message : thread.messages) {
        messages.push_back({is_user_role(message.role) ? llm::Role::User : llm::Role::Assistant, message.text});
    }
    messages.push_back({llm::Role::User, next.text});
    return messages;
}

const FeedbackMessage& DialogicFeedback::exchange(FeedbackThread& thread, const annotation::Annotation& annotation,
                                                  FeedbackMessage user_message) const {
    if (blank(user_message.text)) throw InvalidArgument("feedback message text must not be empty");
    if (annotation.annotation_id != thread.annotation_id) {
        throw InvalidArgument("annotation " + annotation.annotation_id + " does not own thread " +
                              thread.thread_id);
    }
    user_message.at = clock_.now();
    user_message.html_safe = escape_html(user_message.text);

    std::string reply;
    try {
        reply = gateway_.complete(llm::ModelSlot::Feedback, assemble(thread, annotation, user_message));
    } catch (const llm::ProviderError&) {
        thread.pending = std::move(user_message);
        throw;
    }
    if (blank(reply)) {
        thread.pending = std::move(user_message);
        throw llm::ProviderError(llm::ProviderFailure::Malformed, "provider returned empty feedback", 1);
    }

    FeedbackMessage assistant;
    assistant.role = user_message.role == MessageRole::UserQuestion ? MessageRole::AssistantFeedback
                                                                    : MessageRole::AssistantAssessment;
    assistant.html_safe = sanitize_html(reply);
    assistant.text = std::move(reply);
    assistant.at = clock_.now();

    thread.messages.push_back(std::move(user_message));
    thread.messages.push_back(std::move(assistant));
    return thread.messages.back();
}

}  // namespace rehearse::feedback

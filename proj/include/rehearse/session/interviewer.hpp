#pragma once

#include "rehearse/ids.hpp"
#include "rehearse/llm/gateway.hpp"
#include "rehearse/llm/prompt_template.hpp"
#include "rehearse/session/session.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rehearse::session {

struct FollowUpAsked {
    Question question;
};
struct MainAsked {
    Question question;
};
struct SessionCompleted {};

using NextStep = std::variant<FollowUpAsked, MainAsked, SessionCompleted>;

struct AnswerInput {
    std::string text;
    std::optional<std::string> audio_ref;
    /// Omitted spans are placed right after the current end of the timeline
    /// with a length estimated from the text.
    std::optional<TimeRange> span;
};

/// Synthetic timing for text-mode sessions.
struct SpeechTiming {
    std::int64_t ms_per_char = 60;
    std::int64_t min_utterance_ms = 500;

    std::int64_t estimate(std::string_view text) const;
};

/// Drives the interview state machine. Holds no per-session state; callers
/// serialize calls on a given session.
class Interviewer {
public:
    Interviewer(const llm::Gateway& gateway, const llm::TemplateSet& templates, Clock& clock,
                IdSource& ids, SpeechTiming timing = {})
        : gateway_(gateway), templates_(templates), clock_(clock), ids_(ids), timing_(timing) {}

    /// A session in state Created: nothing asked yet, no provider call.
    InterviewSession open(JobContext job, InterviewScript script) const;

    /// Asks the greeting and first main question. On ProviderError the
    /// session is left untouched in state Created.
    void start(InterviewSession& session) const;

    /// open() followed by start(); throws instead of returning a session when
    /// the provider fails.
    InterviewSession create_session(JobContext job, InterviewScript script) const;

    /// Records the answer, then generates the follow-up or next main question.
    /// On ProviderError the answer is kept, question_pending is set, and the
    /// error is rethrown; call retry_question() to continue.
    NextStep submit_answer(InterviewSession& session, AnswerInput answer) const;

    /// Regenerates a question whose generation previously failed.
    NextStep retry_question(InterviewSession& session) const;

    /// Chat history used for question generation: the opening system prompt,
    /// then questions as assistant turns and answers as user turns.
    std::vector<llm::ChatMessage> history(const InterviewSession& session) const;

private:
    NextStep ask_next(InterviewSession& session) const;
    void record_question(InterviewSession& session, QuestionKind kind, std::size_t main_index,
                         std::string text) const;
    std::string opening_prompt(const InterviewSession& session) const;

    const llm::Gateway& gateway_;
    const llm::TemplateSet& templates_;
    Clock& clock_;
    IdSource& ids_;
    SpeechTiming timing_;
};

}  // namespace rehearse::session
